#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "crtcover/real_tree.hpp"
#include "crtcover/rng.hpp"

namespace crtcover {

// Nonnegative path on a uniform grid over [0,1] with zero endpoints; codes
// one tree realization.
struct ExcursionPath {
    std::size_t m = 0;  // grid size; values has m+1 entries
    std::vector<double> values;

    double dt() const { return 1.0 / static_cast<double>(m); }
};

// Standard Brownian excursion of duration 1 on an m-grid, as the
// three-dimensional Bessel bridge (exact in law at the grid points).
ExcursionPath sample_excursion_conditioned(std::size_t m, Rng& rng);

// Bridge + Vervaat rotation at the grid argmin. Exact only as m -> infinity
// (the rotation point misses the continuum minimum by O(m^{-1/2})); kept as
// an independent construction for cross-checks.
ExcursionPath sample_excursion_vervaat(std::size_t m, Rng& rng);

// d_zeta(s,t) = zeta(s) + zeta(t) - 2 min_[s,t] zeta.
double excursion_distance(const ExcursionPath& path, std::size_t s, std::size_t t);

// Tree spanned by the root (grid 0) and the chosen grid points under
// d_zeta scaled by metric_factor (1: excursion units, 2: the Aldous
// normalization). Zero-length duplicates are merged; node_of_index maps
// each requested index (sorted, deduplicated) to its node.
struct SpannedTree {
    RealTree tree;
    std::vector<std::size_t> indices;
    std::vector<int> node_of_index;
};

SpannedTree reduced_tree_from_excursion(const ExcursionPath& path,
                                        std::span<const std::size_t> indices,
                                        double metric_factor);

// Same over the full grid.
RealTree tree_from_excursion(const ExcursionPath& path, double metric_factor);

}  // namespace crtcover
