#include "crtcover/besq.hpp"

#include <cmath>
#include <stdexcept>

namespace crtcover {

double besq_transition(double x, double dt, double dim, Rng& rng) {
    if (!(dt > 0.0)) throw std::invalid_argument("besq_transition: dt <= 0");
    if (x < 0.0 || dim < 0.0) throw std::invalid_argument("besq_transition: negative input");
    double total = 0.0;
    if (x > 0.0) {
        const long long n = rng.poisson(x / (2.0 * dt));
        if (n > 0) total += rng.gamma(static_cast<double>(n));
    }
    if (dim > 0.0) total += rng.gamma(dim / 2.0);
    return 2.0 * dt * total;
}

std::vector<double> euler_maruyama_besq(double x, double step, double horizon,
                                        double dim, Rng& rng) {
    if (!(step > 0.0) || step > horizon) {
        throw std::invalid_argument("euler_maruyama_besq: need 0 < step <= horizon");
    }
    const auto count = static_cast<std::size_t>(std::llround(horizon / step));
    std::vector<double> path;
    path.reserve(count + 1);
    path.push_back(x);
    const double sqrt_step = std::sqrt(step);
    double cur = x;
    for (std::size_t i = 0; i < count; ++i) {
        if (dim == 0.0 && cur <= 0.0) {
            cur = 0.0;  // absorbed
        } else {
            cur += 2.0 * std::sqrt(std::max(cur, 0.0)) * sqrt_step * rng.normal() +
                   dim * step;
            if (cur < 0.0) cur = dim > 0.0 ? -cur : 0.0;
        }
        path.push_back(cur);
    }
    return path;
}

TreeBesqField tree_indexed_besq(const RealTree& tree, double z0, BesqClock clock,
                                Rng& rng) {
    if (z0 < 0.0) throw std::invalid_argument("tree_indexed_besq: z0 < 0");
    TreeBesqField field;
    field.tree = &tree;
    field.clock = clock;
    field.z0 = z0;
    field.values.assign(tree.nodes.size(), 0.0);
    const double clock_factor = clock == BesqClock::MetricDistance ? 1.0 : 0.5;

    // Preorder: parents precede children in RealTree by construction order?
    // Not guaranteed, so walk explicitly. Zero values propagate without
    // sampling (absorption).
    std::vector<int> stack{0};
    field.values[0] = z0;
    while (!stack.empty()) {
        const int v = stack.back();
        stack.pop_back();
        const double value = field.values[v];
        for (int c : tree.nodes[v].children) {
            field.values[c] =
                value == 0.0
                    ? 0.0
                    : besq_transition(value, clock_factor * tree.nodes[c].edge_length,
                                      0.0, rng);
            stack.push_back(c);
        }
    }
    return field;
}

ZeroStatistics zero_statistics(const TreeBesqField& field) {
    ZeroStatistics out;
    std::size_t grid_nodes = 0, grid_zeros = 0;
    for (std::size_t i = 0; i < field.values.size(); ++i) {
        const bool zero = field.values[i] == 0.0;
        out.hit_zero = out.hit_zero || zero;
        if (field.tree->nodes[i].grid_label >= 0) {
            ++grid_nodes;
            if (zero) ++grid_zeros;
        }
    }
    if (grid_nodes > 0) {
        out.zero_mass = static_cast<double>(grid_zeros) / static_cast<double>(grid_nodes);
    }
    return out;
}

}  // namespace crtcover
