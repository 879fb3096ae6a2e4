#include "crtcover/gaussian_field.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "crtcover/stats.hpp"
#include "crtcover/walk.hpp"

namespace crtcover {

GaussianFieldSample sample_tree_gaussian(const DiscreteTree& tree, int root,
                                         double scale, Rng& rng) {
    if (!(scale > 0.0)) throw std::invalid_argument("sample_tree_gaussian: scale <= 0");
    GaussianFieldSample field;
    field.root = root;
    field.scale = scale;
    field.values.assign(tree.n, 0.0);

    // BFS from the chosen root over undirected edges; one centered Gaussian
    // increment of variance scale per edge.
    const double sd = std::sqrt(scale);
    std::vector<int> queue;
    std::vector<std::uint8_t> seen(tree.n, 0);
    queue.push_back(root);
    seen[root] = 1;
    for (std::size_t head = 0; head < queue.size(); ++head) {
        const int v = queue[head];
        auto relax = [&](int w) {
            if (seen[w]) return;
            seen[w] = 1;
            field.values[w] = field.values[v] + sd * rng.normal();
            queue.push_back(w);
        };
        if (v != tree.root) relax(tree.parent[v]);
        for (int c : tree.children[v]) relax(c);
    }
    return field;
}

SigmaMatrices build_sigma_matrices(const TreeMetricIndex& index, int x, int y,
                                   std::span<const int> marks) {
    const DiscreteTree& tree = index.tree();
    SigmaMatrices out;
    out.x = x;
    out.y = y;

    struct MarkInfo {
        int vertex;
        int attach_dist;  // R(y, branch(x,y,z))
        bool on_arc;
        int comp_key;  // first vertex off the arc towards z, -1 on the arc
    };
    std::vector<MarkInfo> info;
    info.reserve(marks.size());
    for (int z : marks) {
        if (z == y) throw std::invalid_argument("build_sigma_matrices: marks must exclude y");
        MarkInfo mi;
        mi.vertex = z;
        const int attach = index.branch_point(x, y, z);
        mi.attach_dist = index.graph_distance(y, attach);
        mi.on_arc = attach == z;
        mi.comp_key = -1;
        if (!mi.on_arc) {
            // Neighbor of the attach point towards z; marks share it exactly
            // when they sit in the same component of T \ [[x,y]].
            if (index.lca(z, attach) == attach) {
                int w = z;
                while (tree.parent[w] != attach) w = tree.parent[w];
                mi.comp_key = w;
            } else {
                mi.comp_key = tree.parent[attach];
            }
        }
        info.push_back(mi);
    }

    std::stable_sort(info.begin(), info.end(), [](const MarkInfo& a, const MarkInfo& b) {
        if (a.attach_dist != b.attach_dist) return a.attach_dist < b.attach_dist;
        if (a.on_arc != b.on_arc) return a.on_arc;
        return a.comp_key < b.comp_key;
    });

    const auto m = info.size();
    out.marks.resize(m);
    out.component.resize(m);
    for (std::size_t i = 0; i < m; ++i) {
        out.marks[i] = info[i].vertex;
        out.component[i] = info[i].on_arc ? -1 : info[i].comp_key;
    }
    out.sigma.assign(m, std::vector<double>(m, 0.0));
    out.sigma_hat.assign(m, std::vector<double>(m, 0.0));
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = 0; j < m; ++j) {
            const int zi = out.marks[i];
            const int zj = out.marks[j];
            const double rij = static_cast<double>(
                index.graph_distance(y, index.branch_point(y, zi, zj)));
            out.sigma[i][j] = rij;
            out.sigma_hat[i][j] = rij - static_cast<double>(info[j].attach_dist);
        }
    }
    return out;
}

double mgf_determinant(const SigmaMatrices& m, std::span<const double> lambdas) {
    const auto k = m.marks.size();
    if (lambdas.size() != k) {
        throw std::invalid_argument("mgf_determinant: lambda count mismatch");
    }
    if (k == 0) return 1.0;
    Eigen::MatrixXd num = Eigen::MatrixXd::Identity(static_cast<int>(k), static_cast<int>(k));
    Eigen::MatrixXd den = num;
    for (std::size_t i = 0; i < k; ++i) {
        for (std::size_t j = 0; j < k; ++j) {
            num(static_cast<int>(i), static_cast<int>(j)) -= m.sigma_hat[i][j] * lambdas[j];
            den(static_cast<int>(i), static_cast<int>(j)) -= m.sigma[i][j] * lambdas[j];
        }
    }
    const double den_det = den.determinant();
    if (!(den_det > 0.0)) {
        throw std::domain_error("mgf_determinant: lambda too large (denominator not positive)");
    }
    return num.determinant() / den_det;
}

std::vector<IsomorphismMarkReport> check_isomorphism(const DiscreteTree& tree, int x,
                                                     int y, std::span<const int> marks,
                                                     std::size_t replicas, Rng& rng) {
    TreeMetricIndex index(tree);
    WalkEngine engine(tree);
    const WalkMode mode{WalkKind::ConstantSpeed, SpeedMeasure::Conductance};

    std::vector<int> branch(marks.size());
    for (std::size_t i = 0; i < marks.size(); ++i) {
        branch[i] = index.branch_point(x, y, marks[i]);
    }

    const auto m = marks.size();
    std::vector<RunningMoments> lhs1(m), lhs2(m), rhs1(m), rhs2(m);
    for (std::size_t rep = 0; rep < replicas; ++rep) {
        auto [time, lt] = engine.run_until_hit(mode, x, y, marks, rng);
        (void)time;
        auto g = sample_tree_gaussian(tree, y, 0.5, rng);
        auto gbar = sample_tree_gaussian(tree, y, 0.5, rng);
        auto g2 = sample_tree_gaussian(tree, y, 0.5, rng);
        auto gbar2 = sample_tree_gaussian(tree, y, 0.5, rng);
        for (std::size_t i = 0; i < m; ++i) {
            const int z = marks[i];
            const int b = branch[i];
            const double dg = g.values[z] - g.values[b];
            const double dgbar = gbar.values[z] - gbar.values[b];
            const double lhs = lt.values[i] + dg * dg + dgbar * dgbar;
            const double rhs =
                g2.values[z] * g2.values[z] + gbar2.values[z] * gbar2.values[z];
            lhs1[i].add(lhs);
            lhs2[i].add(lhs * lhs);
            rhs1[i].add(rhs);
            rhs2[i].add(rhs * rhs);
        }
    }

    std::vector<IsomorphismMarkReport> out(m);
    auto zscore = [](const RunningMoments& a, const RunningMoments& b) {
        const double se2 = a.variance() / static_cast<double>(a.count) +
                           b.variance() / static_cast<double>(b.count);
        return se2 > 0.0 ? (a.mean - b.mean) / std::sqrt(se2) : 0.0;
    };
    for (std::size_t i = 0; i < m; ++i) {
        out[i].mark = marks[i];
        out[i].z_mean = zscore(lhs1[i], rhs1[i]);
        out[i].z_second = zscore(lhs2[i], rhs2[i]);
        out[i].lhs_mean = lhs1[i].mean;
        out[i].rhs_mean = rhs1[i].mean;
    }
    return out;
}

double gff_max_expectation(const DiscreteTree& tree, int root, std::size_t replicas,
                           Rng& rng) {
    if (replicas == 0) throw std::invalid_argument("gff_max_expectation: no replicas");
    RunningMoments acc;
    for (std::size_t rep = 0; rep < replicas; ++rep) {
        auto field = sample_tree_gaussian(tree, root, 1.0, rng);
        acc.add(*std::max_element(field.values.begin(), field.values.end()));
    }
    return acc.mean;
}

double bdnp_bound(const DiscreteTree& tree) {
    const int n = tree.n;
    if (n < 4) throw std::invalid_argument("bdnp_bound: n >= 4 required");
    const int diam = diameter(tree);
    if (diam == 0) return 0.0;
    const int levels =
        std::max(1, static_cast<int>(std::floor(std::log2(std::log(static_cast<double>(n))))));
    double bracket = 0.0;
    for (int i = 1; i <= levels; ++i) {
        const double radius = std::ldexp(static_cast<double>(diam), -i);
        const int a_i = covering_number(tree, static_cast<int>(std::floor(radius)));
        bracket += std::sqrt(std::ldexp(std::log(static_cast<double>(a_i)), -i));
    }
    return bracket * static_cast<double>(n) * static_cast<double>(diam);
}

}  // namespace crtcover
