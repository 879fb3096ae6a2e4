#pragma once

#include <cstdint>
#include <vector>

#include "crtcover/discrete_tree.hpp"
#include "crtcover/offspring.hpp"
#include "crtcover/rng.hpp"

namespace crtcover {

// Conditioned Galton-Watson sampling: rejection on the i.i.d. offspring
// vector until the total hits n-1, then the cycle-lemma rotation.
struct GwSampler {
    // Attempts before declaring the conditioning event numerically
    // unreachable. Acceptance is Theta(n^{-1/2}) for aperiodic laws, so
    // this is never close for workloads the tool supports.
    static constexpr std::uint64_t kMaxAttempts = 1u << 24;
};

DiscreteTree sample_conditioned_gw(const OffspringLaw& law, std::uint64_t n, Rng& rng);

// Rotation index of the unique cyclic shift turning an offspring vector
// with sum n-1 into a valid Lukasiewicz encoding (one past the first
// minimum of the partial sums of xi_i - 1).
std::size_t cycle_lemma_rotation(const std::vector<int>& offspring);

std::vector<int> rotate_offspring(const std::vector<int>& offspring, std::size_t start);

}  // namespace crtcover
