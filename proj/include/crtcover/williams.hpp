#pragma once

#include <cstddef>
#include <vector>

#include "crtcover/real_tree.hpp"
#include "crtcover/rng.hpp"

namespace crtcover {

enum class SpineSide { Left, Right };

// One decorated point of a Williams spine: position measured from the top
// vertex, so the subtree height is bounded by it.
struct SpineAtom {
    double position = 0.0;  // distance from the spine tip, in [0, h]
    double height = 0.0;    // subtree height, in (eps, position]
    SpineSide side = SpineSide::Left;
    int generation = 0;     // 0 = atoms of the root spine
    int spine = 0;          // index into WilliamsSkeleton::spines
};

struct WilliamsSkeleton {
    RealTree tree;
    std::vector<SpineAtom> atoms;
    struct Spine {
        int base_node = 0;  // attachment (root for the top spine)
        int tip_node = 0;
        double length = 0.0;
        int generation = 0;
    };
    std::vector<Spine> spines;
};

// Spine of length h decorated by the Poisson process of subtree heights
// (per-side intensity (1/4) 1_[0,h](x) dx int 1{eps < u <= x} u^-2 du);
// atoms taller than eps are expanded recursively up to max_generation.
// max_generation = 0 keeps only the bare decorated spine, < 0 expands until
// the process dies out (a.s. finite).
WilliamsSkeleton sample_williams_skeleton(double h, double eps, Rng& rng,
                                          int max_generation = -1);

// Heights-only atom of the small-component process along a skeleton.
struct ComponentAtom {
    int spine = 0;
    double distance_to_tip = 0.0;  // h_x of the carrying branch
    double height = 0.0;           // in (h_min, h_x ^ eps]
};

// Components of heights in (h_min, eps] grafted along the skeleton with
// intensity (1/2) lambda(dx) u^-2 du 1{u <= h_x ^ eps}; the lower cutoff
// h_min keeps the total mass finite and is the resolution of the draw.
std::vector<ComponentAtom> sample_poisson_components(const WilliamsSkeleton& skeleton,
                                                     double eps, double h_min,
                                                     Rng& rng);

// A component of the given height expanded into its own skeleton.
WilliamsSkeleton expand_component(double height, double eps, Rng& rng);

// F(v): probability that a tree-indexed BESQ^0 started at v and indexed by
// the d_zeta tree of a duration-1 excursion (lifetime clock) hits zero.
// Fresh (excursion, field) pair per replica on the full m-grid tree.
double estimate_zero_hit_probability(double v, std::size_t m, std::size_t replicas,
                                     Rng& rng);

}  // namespace crtcover
