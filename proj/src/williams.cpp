#include "crtcover/williams.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "crtcover/besq.hpp"
#include "crtcover/excursion.hpp"

namespace crtcover {

namespace {

constexpr std::size_t kAtomBudget = 4'000'000;

// Mean number of atoms (both sides together) with height in (eps, position]
// on a spine of length h: (1/2) ((h - eps)/eps - log(h/eps)).
double spine_atom_mean(double h, double eps) {
    if (h <= eps) return 0.0;
    return 0.5 * ((h - eps) / eps - std::log(h / eps));
}

// Height draw from the density u^-2 restricted to (lo, hi].
double truncated_height(double lo, double hi, Rng& rng) {
    const double u = rng.uniform();
    return 1.0 / (1.0 / lo - u * (1.0 / lo - 1.0 / hi));
}

}  // namespace

WilliamsSkeleton sample_williams_skeleton(double h, double eps, Rng& rng,
                                          int max_generation) {
    if (!(h > 0.0) || !(eps > 0.0)) {
        throw std::invalid_argument("sample_williams_skeleton: h and eps must be positive");
    }
    WilliamsSkeleton out;
    out.tree.add_node(-1, 0.0);

    struct Pending {
        int base_node;
        double length;
        int generation;
    };
    std::vector<Pending> queue;
    queue.push_back({0, h, 0});

    while (!queue.empty()) {
        const Pending spine = queue.back();
        queue.pop_back();
        const int spine_id = static_cast<int>(out.spines.size());

        // Atom positions from the tip, density proportional to
        // (1/eps - 1/x) on (eps, length]; rejection under the flat envelope.
        std::vector<SpineAtom> atoms;
        const auto count =
            static_cast<std::size_t>(rng.poisson(spine_atom_mean(spine.length, eps)));
        if (out.atoms.size() + count > kAtomBudget) {
            throw std::runtime_error("sample_williams_skeleton: atom budget exceeded");
        }
        for (std::size_t i = 0; i < count; ++i) {
            double x;
            const double envelope = 1.0 / eps - 1.0 / spine.length;
            do {
                x = eps + rng.uniform() * (spine.length - eps);
            } while (rng.uniform() * envelope > 1.0 / eps - 1.0 / x);
            SpineAtom atom;
            atom.position = x;
            atom.height = truncated_height(eps, x, rng);
            atom.side = rng.uniform() < 0.5 ? SpineSide::Left : SpineSide::Right;
            atom.generation = spine.generation;
            atom.spine = spine_id;
            atoms.push_back(atom);
        }
        // Base-to-tip order along the spine.
        std::sort(atoms.begin(), atoms.end(), [](const SpineAtom& a, const SpineAtom& b) {
            return a.position > b.position;
        });

        int cur = spine.base_node;
        double from_base = 0.0;
        const bool expand =
            max_generation < 0 || spine.generation + 1 <= max_generation;
        for (const auto& atom : atoms) {
            const double d = spine.length - atom.position;
            if (d > from_base) {
                cur = out.tree.add_node(cur, d - from_base);
                from_base = d;
            }
            if (expand) queue.push_back({cur, atom.height, spine.generation + 1});
            out.atoms.push_back(atom);
        }
        const int tip = out.tree.add_node(cur, spine.length - from_base);
        out.spines.push_back({spine.base_node, tip, spine.length, spine.generation});
    }
    return out;
}

std::vector<ComponentAtom> sample_poisson_components(const WilliamsSkeleton& skeleton,
                                                     double eps, double h_min,
                                                     Rng& rng) {
    if (!(h_min > 0.0) || h_min >= eps) {
        throw std::invalid_argument("sample_poisson_components: need 0 < h_min < eps");
    }
    std::vector<ComponentAtom> out;
    for (std::size_t s = 0; s < skeleton.spines.size(); ++s) {
        const double length = skeleton.spines[s].length;
        if (length <= h_min) continue;
        const double cap = std::min(length, eps);
        // Integrated intensity: (1/2) int_0^length (1/h_min - 1/(t^eps))+ dt.
        double mean = 0.5 * ((cap - h_min) / h_min - std::log(cap / h_min));
        if (length > eps) {
            mean += 0.5 * (length - eps) * (1.0 / h_min - 1.0 / eps);
        }
        const auto count = static_cast<std::size_t>(rng.poisson(mean));
        const double envelope = 1.0 / h_min - 1.0 / cap;
        for (std::size_t i = 0; i < count; ++i) {
            double t, ceiling;
            do {
                t = h_min + rng.uniform() * (length - h_min);
                ceiling = std::min(t, eps);
            } while (rng.uniform() * envelope > 1.0 / h_min - 1.0 / ceiling);
            ComponentAtom atom;
            atom.spine = static_cast<int>(s);
            atom.distance_to_tip = t;
            atom.height = truncated_height(h_min, ceiling, rng);
            out.push_back(atom);
        }
    }
    return out;
}

WilliamsSkeleton expand_component(double height, double eps, Rng& rng) {
    return sample_williams_skeleton(height, eps, rng);
}

double estimate_zero_hit_probability(double v, std::size_t m, std::size_t replicas,
                                     Rng& rng) {
    if (!(v > 0.0)) throw std::invalid_argument("estimate_zero_hit_probability: v <= 0");
    std::size_t hits = 0;
    for (std::size_t rep = 0; rep < replicas; ++rep) {
        const ExcursionPath excursion = sample_excursion_conditioned(m, rng);
        const RealTree tree = tree_from_excursion(excursion, 1.0);
        const TreeBesqField field = tree_indexed_besq(tree, v, BesqClock::MetricDistance, rng);
        if (zero_statistics(field).hit_zero) ++hits;
    }
    return static_cast<double>(hits) / static_cast<double>(replicas);
}

}  // namespace crtcover
