#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "crtcover/discrete_tree.hpp"
#include "crtcover/rng.hpp"

namespace crtcover {

enum class WalkKind { DiscreteTime, ConstantSpeed };
enum class SpeedMeasure { Counting, Conductance };

// ConstantSpeed runs the same jump chain with unit-mean exponential holding
// times; the measure picks the local-time normalization mu (Counting: 1,
// Conductance: degree).
struct WalkMode {
    WalkKind kind = WalkKind::DiscreteTime;
    SpeedMeasure measure = SpeedMeasure::Conductance;
};

struct CoverRecord {
    double tau_cov = 0.0;       // steps (DiscreteTime) or real time
    double tau_cov_plus = 0.0;  // first visit to start at or after tau_cov
    int start = 0;
    int last_covered = 0;
    std::optional<std::vector<double>> local_times_at_cover;
    std::optional<std::vector<double>> local_times_at_cover_plus;
};

struct LocalTimeVector {
    std::vector<double> values;  // occupation / mu, zero exactly at unvisited vertices
    SpeedMeasure normalization = SpeedMeasure::Conductance;
};

struct CoverOptions {
    bool local_times_at_cover = false;
    bool local_times_at_cover_plus = false;
};

// Simple random walk on a fixed tree with flat adjacency and reusable
// scratch, so replica loops allocate nothing. The tree must outlive the
// engine. Engines are not shared across threads; the tree is.
class WalkEngine {
public:
    explicit WalkEngine(const DiscreteTree& tree);

    static constexpr std::uint64_t kStepBudget = 10'000'000'000ULL;

    const DiscreteTree& tree() const { return *tree_; }
    int degree(int v) const { return offsets_[v + 1] - offsets_[v]; }
    double mu(int v, SpeedMeasure measure) const {
        return measure == SpeedMeasure::Counting ? 1.0 : static_cast<double>(degree(v));
    }

    CoverRecord run_cover(WalkMode mode, int start, Rng& rng,
                          const CoverOptions& opts = {});

    // Local times at the marks when target is first hit; occupation counted
    // strictly before the arrival at target.
    std::pair<double, LocalTimeVector> run_until_hit(WalkMode mode, int start,
                                                     int target,
                                                     std::span<const int> marks,
                                                     Rng& rng);

private:
    const DiscreteTree* tree_;
    std::vector<int> offsets_;
    std::vector<int> neighbors_;
    std::vector<double> occupation_;
    std::vector<std::uint8_t> visited_;

    int step_to(int v, Rng& rng) {
        const int deg = offsets_[v + 1] - offsets_[v];
        return neighbors_[offsets_[v] + static_cast<int>(rng.below(
                              static_cast<std::uint64_t>(deg)))];
    }
};

// E_x[tau_y] by direct linear solve of the one-step equations (identical
// for DiscreteTime and ConstantSpeed).
double expected_hitting_exact(const DiscreteTree& tree, WalkMode mode, int x, int y);

// Exact expected cover time by dynamic programming on (visited set, current
// vertex), one dense solve per visited-set stratum. n <= 14.
double expected_cover_exact_small(const DiscreteTree& tree, WalkMode mode, int start);

// E_x[exp(sum_i lambda_i L_{tau_y}(z_i))] via the killed Feynman-Kac
// system. Throws if the system is not positive definite (lambda too large,
// the transform is infinite). Independent oracle for the determinant
// formula.
double mgf_local_times_exact(const DiscreteTree& tree, SpeedMeasure measure, int x,
                             int y, std::span<const int> marks,
                             std::span<const double> lambdas);

// Killed potential density u_{tau_y}(z, w) = R(y, branch(y,z,w)) in
// resistance units (= graph distance for unit conductances).
double green_killed(const TreeMetricIndex& index, int y, int z, int w);

}  // namespace crtcover
