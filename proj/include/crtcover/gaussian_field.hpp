#pragma once

#include <span>
#include <vector>

#include "crtcover/discrete_tree.hpp"
#include "crtcover/rng.hpp"

namespace crtcover {

// Centered Gaussian field on a tree with Cov(G_w, G_z) =
// scale * R(root, branch(root, w, z)); G(root) = 0. Sampled by independent
// edge increments of variance scale (unit resistance per edge).
struct GaussianFieldSample {
    std::vector<double> values;
    int root = 0;
    double scale = 1.0;
};

GaussianFieldSample sample_tree_gaussian(const DiscreteTree& tree, int root,
                                         double scale, Rng& rng);

// Sigma and SigmaHat of the local-time transform, in discrete resistance
// units (the continuum factor 2 in Sigma = 2 d_T is absorbed by R = 2 d_T).
// Marks are reordered: nondecreasing R(y, branch(x,y,z)), arc vertices
// before the subtrees hanging off them, one off-arc component contiguous.
struct SigmaMatrices {
    std::vector<std::vector<double>> sigma;
    std::vector<std::vector<double>> sigma_hat;
    std::vector<int> marks;  // reordered
    int x = 0;
    int y = 0;
    // Component id per mark: -1 for marks on [[x,y]], otherwise an id shared
    // exactly by marks in the same component of T \ [[x,y]].
    std::vector<int> component;
};

SigmaMatrices build_sigma_matrices(const TreeMetricIndex& index, int x, int y,
                                   std::span<const int> marks);

// det(I - SigmaHat Lambda) / det(I - Sigma Lambda). Lambdas follow the
// reordered marks. Throws when det(I - Sigma Lambda) <= 0.
double mgf_determinant(const SigmaMatrices& m, std::span<const double> lambdas);

struct IsomorphismMarkReport {
    int mark = 0;
    double z_mean = 0.0;    // z-score of E[lhs] - E[rhs]
    double z_second = 0.0;  // z-score of E[lhs^2] - E[rhs^2]
    double lhs_mean = 0.0;
    double rhs_mean = 0.0;
};

// Monte Carlo check of the coupling identity
//   L_{tau_y}(z) + (G_z - G_b)^2 + (Gbar_z - Gbar_b)^2  =d=  G_z^2 + Gbar_z^2
// with b = branch(x,y,z) and G, Gbar independent fields of scale 1/2 rooted
// at y, independent of the walk.
std::vector<IsomorphismMarkReport> check_isomorphism(const DiscreteTree& tree, int x,
                                                     int y, std::span<const int> marks,
                                                     std::size_t replicas, Rng& rng);

// EMC estimate of eta_T = E[max_x G(x)] for the free field rooted at root
// (scale 1, covariance d(root, branch(root, x, y))).
double gff_max_expectation(const DiscreteTree& tree, int root, std::size_t replicas,
                           Rng& rng);

// Cover-time upper bound functional: (sum_{i=1}^{log2 log n}
// sqrt(2^{-i} log A_i)) * n * D_n with C = 1 and A_i the covering number at
// radius floor(2^{-i} D_n). Diagnostic only.
double bdnp_bound(const DiscreteTree& tree);

}  // namespace crtcover
