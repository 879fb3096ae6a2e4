#pragma once

#include <cstddef>
#include <vector>

#include "crtcover/real_tree.hpp"
#include "crtcover/rng.hpp"

namespace crtcover {

// Exact draw from the BESQ^dim transition over time dt started at x:
// N ~ Poisson(x / 2dt), return 2dt * (Gamma(N) + Gamma(dim/2)). Returns an
// exact 0 when dim = 0 and N = 0, so absorption needs no thresholding.
double besq_transition(double x, double dt, double dim, Rng& rng);

// Explicit Euler scheme for the defining SDE, oracle only: reflection at
// zero for dim > 0, absorption for dim = 0. Returns the path at the grid
// times 0, step, 2*step, ..., horizon.
std::vector<double> euler_maruyama_besq(double x, double step, double horizon,
                                        double dim, Rng& rng);

enum class BesqClock {
    MetricDistance,  // edge lengths as given (excursion/lifetime units)
    HalfResistance,  // half the resistance distance (walk local-time clock)
};

struct TreeBesqField {
    const RealTree* tree = nullptr;
    std::vector<double> values;  // one per node; zero set is descendant-closed
    BesqClock clock = BesqClock::MetricDistance;
    double z0 = 0.0;
};

// Tree-indexed BESQ^0 field: root value z0, each child drawn from the
// transition over the clock-scaled edge length, branches conditionally
// independent given the branch-point value.
TreeBesqField tree_indexed_besq(const RealTree& tree, double z0, BesqClock clock,
                                Rng& rng);

struct ZeroStatistics {
    bool hit_zero = false;
    double zero_mass = 0.0;  // fraction of grid-labelled nodes at exact zero
};

ZeroStatistics zero_statistics(const TreeBesqField& field);

}  // namespace crtcover
