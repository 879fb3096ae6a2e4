#include "crtcover/excursion.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace crtcover {

namespace {

// Brownian bridge 0 -> 0 on the m-grid by Gaussian increments and a linear
// correction; exact in law at the grid points.
std::vector<double> gaussian_bridge(std::size_t m, Rng& rng) {
    std::vector<double> bridge(m + 1, 0.0);
    const double sd = std::sqrt(1.0 / static_cast<double>(m));
    double walk = 0.0;
    for (std::size_t i = 1; i <= m; ++i) {
        walk += sd * rng.normal();
        bridge[i] = walk;
    }
    const double drift = bridge[m];
    for (std::size_t i = 1; i < m; ++i) {
        bridge[i] -= drift * static_cast<double>(i) / static_cast<double>(m);
    }
    bridge[m] = 0.0;
    return bridge;
}

}  // namespace

ExcursionPath sample_excursion_conditioned(std::size_t m, Rng& rng) {
    if (m < 2) throw std::invalid_argument("sample_excursion_conditioned: m < 2");
    // Three-dimensional Bessel bridge: the root of the sum of three squared
    // independent bridges has the law of the normalized excursion, jointly
    // exact at the grid points. (A rotation of one bridge at its argmin is
    // only asymptotically exact on a grid; the tests keep it as an oracle.)
    ExcursionPath out;
    out.m = m;
    out.values.assign(m + 1, 0.0);
    const auto a = gaussian_bridge(m, rng);
    const auto b = gaussian_bridge(m, rng);
    const auto c = gaussian_bridge(m, rng);
    for (std::size_t i = 1; i < m; ++i) {
        out.values[i] = std::sqrt(a[i] * a[i] + b[i] * b[i] + c[i] * c[i]);
    }
    return out;
}

ExcursionPath sample_excursion_vervaat(std::size_t m, Rng& rng) {
    if (m < 2) throw std::invalid_argument("sample_excursion_vervaat: m < 2");
    ExcursionPath out;
    out.m = m;
    const auto bridge = gaussian_bridge(m, rng);

    std::size_t argmin = 0;
    for (std::size_t i = 1; i < m; ++i) {
        if (bridge[i] < bridge[argmin]) argmin = i;
    }
    const double low = bridge[argmin];

    out.values.assign(m + 1, 0.0);
    for (std::size_t j = 1; j < m; ++j) {
        out.values[j] = bridge[(argmin + j) % m] - low;
    }
    return out;
}

double excursion_distance(const ExcursionPath& path, std::size_t s, std::size_t t) {
    if (s > t) std::swap(s, t);
    double low = path.values[s];
    for (std::size_t i = s; i <= t; ++i) low = std::min(low, path.values[i]);
    return path.values[s] + path.values[t] - 2.0 * low;
}

namespace {

// Left-to-right Harris construction: the stack holds the rightmost path of
// the partial tree, heights strictly increasing.
SpannedTree build_spanned_tree(const ExcursionPath& path,
                               std::vector<std::size_t> indices,
                               double metric_factor) {
    SpannedTree out;
    out.indices = std::move(indices);
    RealTree& tree = out.tree;
    out.node_of_index.assign(out.indices.size(), -1);

    struct Open {
        int node;
        double height;  // in zeta units
    };
    std::vector<Open> stack;
    tree.add_node(-1, 0.0, 0);  // root = equivalence class of grid index 0
    stack.push_back({0, 0.0});

    std::size_t prev = 0;
    for (std::size_t pos = 0; pos < out.indices.size(); ++pos) {
        const std::size_t idx = out.indices[pos];
        if (idx == 0) {
            out.node_of_index[pos] = 0;
            continue;
        }
        double merge = path.values[prev];
        for (std::size_t i = prev; i <= idx; ++i) merge = std::min(merge, path.values[i]);
        prev = idx;
        const double h = path.values[idx];

        // Pop branches that ended above the merge height.
        Open last = stack.back();
        while (stack.back().height > merge) {
            last = stack.back();
            stack.pop_back();
        }
        int attach;
        if (stack.back().height == merge) {
            attach = stack.back().node;
        } else {
            // Split the edge between the stack top and the last popped node
            // and re-parent the popped branch onto the midpoint.
            const int below = stack.back().node;
            const int mid = tree.add_node(
                below, metric_factor * (merge - stack.back().height), -1);
            tree.nodes[mid].height = metric_factor * merge;
            auto& kids = tree.nodes[below].children;
            kids.erase(std::find(kids.begin(), kids.end(), last.node));
            tree.nodes[last.node].parent = mid;
            tree.nodes[last.node].edge_length = metric_factor * (last.height - merge);
            tree.nodes[mid].children.push_back(last.node);
            stack.push_back({mid, merge});
            attach = mid;
        }
        if (h == merge) {
            // Zero d_zeta distance to the attach point: merge, no new node.
            if (tree.nodes[attach].grid_label < 0) {
                tree.nodes[attach].grid_label = static_cast<int>(idx);
            }
            out.node_of_index[pos] = attach;
            continue;
        }
        const int leaf =
            tree.add_node(attach, metric_factor * (h - merge), static_cast<int>(idx));
        tree.nodes[leaf].height = metric_factor * h;
        out.node_of_index[pos] = leaf;
        stack.push_back({leaf, h});
    }
    return out;
}

}  // namespace

SpannedTree reduced_tree_from_excursion(const ExcursionPath& path,
                                        std::span<const std::size_t> indices,
                                        double metric_factor) {
    std::vector<std::size_t> sorted(indices.begin(), indices.end());
    std::sort(sorted.begin(), sorted.end());
    sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
    for (std::size_t idx : sorted) {
        if (idx > path.m) throw std::invalid_argument("reduced_tree_from_excursion: index outside grid");
    }
    return build_spanned_tree(path, std::move(sorted), metric_factor);
}

RealTree tree_from_excursion(const ExcursionPath& path, double metric_factor) {
    std::vector<std::size_t> all(path.m + 1);
    for (std::size_t i = 0; i <= path.m; ++i) all[i] = i;
    return std::move(build_spanned_tree(path, std::move(all), metric_factor).tree);
}

}  // namespace crtcover
