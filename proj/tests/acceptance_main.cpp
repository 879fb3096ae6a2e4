// Acceptance suite: one line per criterion, nonzero exit if any fails.
// Every tolerance is pinned here; nothing is calibrated at run time.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include "crtcover/besq.hpp"
#include "crtcover/discrete_tree.hpp"
#include "crtcover/excursion.hpp"
#include "crtcover/experiments.hpp"
#include "crtcover/gaussian_field.hpp"
#include "crtcover/gw.hpp"
#include "crtcover/offspring.hpp"
#include "crtcover/rng.hpp"
#include "crtcover/stats.hpp"
#include "crtcover/walk.hpp"
#include "crtcover/williams.hpp"

using namespace crtcover;

namespace {

constexpr std::uint64_t kSeed = 7'041'776;

struct Outcome {
    bool pass = false;
    std::string detail;
};

const WalkMode kDiscrete{WalkKind::DiscreteTime, SpeedMeasure::Conductance};
const WalkMode kConstantSpeed{WalkKind::ConstantSpeed, SpeedMeasure::Conductance};

std::string fmt(const char* format, ...) {
    char buf[512];
    va_list args;
    va_start(args, format);
    std::vsnprintf(buf, sizeof(buf), format, args);
    va_end(args);
    return buf;
}

std::vector<DiscreteTree> all_trees_up_to(int max_n) {
    std::vector<DiscreteTree> trees;
    for (int n = 1; n <= max_n; ++n) {
        for_each_rooted_tree(n, [&](const DiscreteTree& t) { trees.push_back(t); });
    }
    return trees;
}

// z-score of a sample variance against a target, via the asymptotic
// standard error sqrt((m4 - s^4) / N).
double variance_zscore(std::span<const double> xs, double target) {
    RunningMoments m;
    for (double x : xs) m.add(x);
    const double s2 = m.variance();
    double m4 = 0.0;
    for (double x : xs) {
        const double d = x - m.mean;
        m4 += d * d * d * d;
    }
    m4 /= static_cast<double>(xs.size());
    const double se = std::sqrt(std::max(m4 - s2 * s2, 1e-300) /
                                static_cast<double>(xs.size()));
    return (s2 - target) / se;
}

double mean_zscore(const RunningMoments& m, double target) {
    const double se = std::sqrt(m.variance() / static_cast<double>(m.count));
    return se > 0.0 ? (m.mean - target) / se : 0.0;
}

// Vertices of the arc from x to y, inclusive.
std::vector<int> arc_vertices(const DiscreteTree& tree, const TreeMetricIndex& index,
                              int x, int y) {
    const int meet = index.lca(x, y);
    std::vector<int> down, up;
    for (int v = x; v != meet; v = tree.parent[v]) down.push_back(v);
    down.push_back(meet);
    for (int v = y; v != meet; v = tree.parent[v]) up.push_back(v);
    std::reverse(up.begin(), up.end());
    down.insert(down.end(), up.begin(), up.end());
    return down;
}

// ---------------------------------------------------------------------------
// Criterion 1: determinant transform vs the killed Feynman-Kac system on
// every rooted tree with n <= 8.
// ---------------------------------------------------------------------------
Outcome criterion_determinant_mgf() {
    const auto trees = all_trees_up_to(8);
    double worst = 0.0;
    Rng rng = stream_for(kSeed, "acc/determinant", 8, 0);
    for (const auto& tree : trees) {
        TreeMetricIndex index(tree);
        for (int config = 0; config < 5; ++config) {
            const int x = static_cast<int>(rng.below(tree.n));
            int y = static_cast<int>(rng.below(tree.n));
            if (tree.n > 1) {
                while (y == x) y = static_cast<int>(rng.below(tree.n));
            }
            std::vector<int> marks;
            for (int v = 0; v < tree.n; ++v) {
                if (v != y && rng.uniform() < 0.6) marks.push_back(v);
            }
            const SigmaMatrices m = build_sigma_matrices(index, x, y, marks);
            for (int draw = 0; draw < 5; ++draw) {
                std::vector<double> lambdas(m.marks.size());
                for (std::size_t i = 0; i < lambdas.size(); ++i) {
                    const double cap = std::max(m.sigma[i][i], 1.0);
                    lambdas[i] = 0.9 * (2.0 * rng.uniform() - 1.0) /
                                 (static_cast<double>(std::max<std::size_t>(
                                      lambdas.size(), 1)) *
                                  cap);
                }
                const double via_det = mgf_determinant(m, lambdas);
                const double via_system = mgf_local_times_exact(
                    tree, SpeedMeasure::Conductance, x, y, m.marks, lambdas);
                worst = std::max(worst, std::fabs(via_det - via_system));
            }
        }
    }
    return {worst < 1e-8,
            fmt("%zu trees, max |det - oracle| = %.3g (tol 1e-8)", trees.size(), worst)};
}

// ---------------------------------------------------------------------------
// Criterion 2: commute identity E_x tau_y + E_y tau_x = 2(n-1) d(x,y).
// ---------------------------------------------------------------------------
Outcome criterion_commute() {
    const auto law = OffspringLaw::poisson1();
    Rng rng = stream_for(kSeed, "acc/commute", 200, 0);
    double worst = 0.0;
    for (int t = 0; t < 50; ++t) {
        const std::uint64_t n = 2 + rng.below(199);  // 2..200
        const auto tree = sample_conditioned_gw(law, n, rng);
        TreeMetricIndex index(tree);
        for (int pair = 0; pair < 20; ++pair) {
            const int x = static_cast<int>(rng.below(tree.n));
            const int y = static_cast<int>(rng.below(tree.n));
            const double commute = expected_hitting_exact(tree, kDiscrete, x, y) +
                                   expected_hitting_exact(tree, kDiscrete, y, x);
            const double target =
                2.0 * static_cast<double>(tree.n - 1) * index.graph_distance(x, y);
            worst = std::max(worst, std::fabs(commute - target));
        }
    }
    return {worst < 1e-9, fmt("50 trees x 20 pairs, max |commute - 2(n-1)d| = %.3g (tol 1e-9)", worst)};
}

// ---------------------------------------------------------------------------
// Criterion 3: tau_cov = min{t : all local times > 0} on every replica.
// ---------------------------------------------------------------------------
Outcome criterion_cover_identity() {
    const auto law = OffspringLaw::poisson1();
    const std::vector<std::pair<std::uint64_t, std::size_t>> plan = {
        {16, 50'000}, {64, 30'000}, {256, 15'000}, {1000, 5'000}};
    CoverOptions opts;
    opts.local_times_at_cover = true;
    std::size_t checked = 0;
    for (const auto& [n, reps] : plan) {
        Rng rng = stream_for(kSeed, "acc/cover-identity", n, 0);
        for (std::size_t r = 0; r < reps; ++r) {
            const auto tree = sample_conditioned_gw(law, n, rng);
            WalkEngine engine(tree);
            const auto record = engine.run_cover(kDiscrete, tree.root, rng, opts);
            const auto& lt = *record.local_times_at_cover;
            double min_lt = 1e300;
            for (double v : lt) min_lt = std::min(min_lt, v);
            // All vertices carry positive local time at tau_cov, and the
            // last-covered one was first visited exactly at tau_cov (so one
            // step earlier its local time was zero).
            const bool ok =
                min_lt > 0.0 &&
                lt[record.last_covered] ==
                    1.0 / static_cast<double>(engine.degree(record.last_covered));
            if (!ok) {
                return {false, fmt("violated at n=%llu replica %zu",
                                   static_cast<unsigned long long>(n), r)};
            }
            ++checked;
        }
    }
    return {true, fmt("identity held on all %zu replicas (sizes 16..1000)", checked)};
}

// ---------------------------------------------------------------------------
// Criterion 4: Monte Carlo cover means vs the subset-DP oracle.
// ---------------------------------------------------------------------------
Outcome criterion_cover_oracle() {
    const auto law = OffspringLaw::poisson1();
    std::vector<DiscreteTree> trees = all_trees_up_to(8);
    {
        Rng rng = stream_for(kSeed, "acc/cover-oracle-trees", 12, 0);
        for (int i = 0; i < 20; ++i) {
            trees.push_back(sample_conditioned_gw(law, 9 + rng.below(4), rng));
        }
    }
    // Hand value: the 3-path from its center.
    const double hand = expected_cover_exact_small(DiscreteTree::path(3), kDiscrete, 1);
    if (std::fabs(hand - 5.0) > 1e-9) {
        return {false, fmt("3-path oracle value %.12f != 5", hand)};
    }

    double worst_z = 0.0;
    std::vector<double> zs(trees.size(), 0.0);
    parallel_for(trees.size(), 0, [&](std::size_t t) {
        const auto& tree = trees[t];
        Rng rng = stream_for(kSeed, "acc/cover-oracle", tree.n, t);
        const double exact = expected_cover_exact_small(tree, kDiscrete, tree.root);
        WalkEngine engine(tree);
        RunningMoments mc;
        for (int r = 0; r < 100'000; ++r) {
            mc.add(engine.run_cover(kDiscrete, tree.root, rng).tau_cov);
        }
        zs[t] = mean_zscore(mc, exact);
    });
    for (double z : zs) worst_z = std::max(worst_z, std::fabs(z));
    return {worst_z < 4.0,
            fmt("%zu trees (exhaustive n<=8 + 20 random n<=12), 1e5 replicas each, "
                "max |z| = %.2f (tol 4)",
                trees.size(), worst_z)};
}

// ---------------------------------------------------------------------------
// Criterion 5: Ray-Knight local-time profiles at a hitting time.
// ---------------------------------------------------------------------------
Outcome criterion_rayknight_profiles() {
    const auto law = OffspringLaw::poisson1();
    double worst_z = 0.0;
    int arc_checks = 0, branch_checks = 0;
    for (int config = 0; config < 10; ++config) {
        Rng rng = stream_for(kSeed, "acc/rayknight", 50, config);
        const auto tree = sample_conditioned_gw(law, 10 + rng.below(41), rng);
        TreeMetricIndex index(tree);
        WalkEngine engine(tree);

        int x = 0, y = 0;
        do {
            x = static_cast<int>(rng.below(tree.n));
            y = static_cast<int>(rng.below(tree.n));
        } while (index.graph_distance(x, y) < 3);
        const auto arc = arc_vertices(tree, index, x, y);

        // Up to three interior arc marks, plus up to three off-arc marks
        // paired with their attach points.
        std::vector<int> on_arc;
        for (std::size_t i = 1; i + 1 < arc.size() && on_arc.size() < 3; i += 2) {
            on_arc.push_back(arc[i]);
        }
        std::vector<std::pair<int, int>> off_arc;  // (w, attach)
        for (int v = 0; v < tree.n && off_arc.size() < 3; ++v) {
            if (std::find(arc.begin(), arc.end(), v) != arc.end()) continue;
            const int attach = index.branch_point(x, y, v);
            if (attach != y) off_arc.emplace_back(v, attach);
        }

        std::vector<int> marks = on_arc;
        for (const auto& [w, attach] : off_arc) {
            marks.push_back(w);
            marks.push_back(attach);
        }

        std::vector<RunningMoments> first(marks.size());
        std::vector<std::vector<double>> samples(marks.size());
        std::vector<RunningMoments> branch_mean(off_arc.size()), branch_var(off_arc.size());
        const std::size_t reps = 100'000;
        for (auto& s : samples) s.reserve(reps);
        for (std::size_t r = 0; r < reps; ++r) {
            const auto lt = engine.run_until_hit(kConstantSpeed, x, y, marks, rng).second;
            for (std::size_t i = 0; i < marks.size(); ++i) {
                first[i].add(lt.values[i]);
                samples[i].push_back(lt.values[i]);
            }
            for (std::size_t i = 0; i < off_arc.size(); ++i) {
                const double lw = lt.values[on_arc.size() + 2 * i];
                const double lr = lt.values[on_arc.size() + 2 * i + 1];
                const double resistance = index.graph_distance(off_arc[i].second,
                                                               off_arc[i].first);
                branch_mean[i].add(lw - lr);
                branch_var[i].add((lw - lr) * (lw - lr) - 2.0 * resistance * lr);
            }
        }
        for (std::size_t i = 0; i < on_arc.size(); ++i) {
            const double r_yz = index.graph_distance(y, on_arc[i]);
            worst_z = std::max(worst_z, std::fabs(mean_zscore(first[i], r_yz)));
            worst_z = std::max(worst_z, std::fabs(variance_zscore(samples[i], r_yz * r_yz)));
            ++arc_checks;
        }
        for (std::size_t i = 0; i < off_arc.size(); ++i) {
            worst_z = std::max(worst_z, std::fabs(mean_zscore(branch_mean[i], 0.0)));
            worst_z = std::max(worst_z, std::fabs(mean_zscore(branch_var[i], 0.0)));
            ++branch_checks;
        }
    }
    return {worst_z < 4.0,
            fmt("10 trees, %d arc and %d branch checks at 1e5 replicas, max |z| = %.2f (tol 4)",
                arc_checks, branch_checks, worst_z)};
}

// ---------------------------------------------------------------------------
// Criterion 6: the coupling identity between local times and squared fields.
// ---------------------------------------------------------------------------
Outcome criterion_isomorphism() {
    const auto law = OffspringLaw::poisson1();
    double worst_z = 0.0;
    for (int config = 0; config < 10; ++config) {
        Rng rng = stream_for(kSeed, "acc/isomorphism", 30, config);
        const auto tree = sample_conditioned_gw(law, 15 + rng.below(26), rng);
        const int x = static_cast<int>(rng.below(tree.n));
        int y = static_cast<int>(rng.below(tree.n));
        while (y == x) y = static_cast<int>(rng.below(tree.n));
        std::vector<int> marks;
        while (marks.size() < 4) {
            const int z = static_cast<int>(rng.below(tree.n));
            if (z != y && std::find(marks.begin(), marks.end(), z) == marks.end()) {
                marks.push_back(z);
            }
        }
        for (const auto& report : check_isomorphism(tree, x, y, marks, 100'000, rng)) {
            worst_z = std::max({worst_z, std::fabs(report.z_mean),
                                std::fabs(report.z_second)});
        }
    }
    return {worst_z < 4.0,
            fmt("10 configurations x 4 marks x 2 moments at 1e5 replicas, max |z| = %.2f (tol 4)",
                worst_z)};
}

// ---------------------------------------------------------------------------
// Criterion 7: exact squared-Bessel transitions (absorption, moments, SDE).
// ---------------------------------------------------------------------------
Outcome criterion_besq() {
    Rng rng = stream_for(kSeed, "acc/besq", 0, 0);
    const std::size_t reps = 100'000;

    std::size_t zeros = 0;
    RunningMoments mean0;
    std::vector<double> draws0;
    draws0.reserve(reps);
    for (std::size_t i = 0; i < reps; ++i) {
        const double d = besq_transition(1.0, 1.0, 0.0, rng);
        if (d == 0.0) ++zeros;
        mean0.add(d);
        draws0.push_back(d);
    }
    const double p0 = std::exp(-0.5);
    const double z_atom = (static_cast<double>(zeros) / reps - p0) /
                          std::sqrt(p0 * (1.0 - p0) / reps);
    const double z_mean0 = mean_zscore(mean0, 1.0);
    const double z_var0 = variance_zscore(draws0, 4.0);

    RunningMoments mean2;
    std::vector<double> draws2;
    draws2.reserve(reps);
    for (std::size_t i = 0; i < reps; ++i) {
        const double d = besq_transition(2.0, 0.5, 2.0, rng);
        mean2.add(d);
        draws2.push_back(d);
    }
    const double z_mean2 = mean_zscore(mean2, 3.0);          // x + dim t
    const double z_var2 = variance_zscore(draws2, 5.0);      // 4tx + 2 dim t^2

    std::vector<double> exact(10'000), euler(10'000);
    parallel_for(exact.size(), 0, [&](std::size_t i) {
        Rng path_rng = stream_for(kSeed, "acc/besq-euler", 1, i);
        exact[i] = besq_transition(1.0, 1.0, 0.0, path_rng);
        euler[i] = euler_maruyama_besq(1.0, 1e-4, 1.0, 0.0, path_rng).back();
    });
    const double ks = ks_distance(exact, euler);

    const double worst_z = std::max({std::fabs(z_atom), std::fabs(z_mean0),
                                     std::fabs(z_var0), std::fabs(z_mean2),
                                     std::fabs(z_var2)});
    return {worst_z < 4.0 && ks < 0.02,
            fmt("absorption/mean/variance max |z| = %.2f (tol 4), exact-vs-Euler KS = %.4f "
                "(tol 0.02)",
                worst_z, ks)};
}

// ---------------------------------------------------------------------------
// Criterion 8: Williams spine statistics.
// ---------------------------------------------------------------------------
Outcome criterion_williams() {
    const double h = 1.0, cut = 0.1, trunc = 1e-3;
    const double count_target = 0.5 * (h / cut - 1.0 - std::log(h / cut));  // 3.3487
    const double sum_target = h * h / 4.0 - (trunc * h / 2.0 - trunc * trunc / 4.0);

    RunningMoments count, sum2;
    const std::size_t reps = 100'000;
    Rng rng = stream_for(kSeed, "acc/williams", 1, 0);
    for (std::size_t i = 0; i < reps; ++i) {
        count.add(static_cast<double>(sample_williams_skeleton(h, cut, rng, 0).atoms.size()));
        const auto fine = sample_williams_skeleton(h, trunc, rng, 0);
        double s = 0.0;
        for (const auto& atom : fine.atoms) s += atom.height * atom.height;
        sum2.add(s);
    }
    const double z_count = mean_zscore(count, count_target);
    const double z_sum = mean_zscore(sum2, sum_target);
    const bool pass = std::fabs(z_count) < 4.0 && std::fabs(z_sum) < 4.0;
    return {pass, fmt("count mean %.4f vs %.4f (z=%.2f), sum H^2 mean %.5f vs %.5f (z=%.2f), tol 4",
                      count.mean, count_target, z_count, sum2.mean, sum_target, z_sum)};
}

// ---------------------------------------------------------------------------
// Criterion 9: small-component Poisson process counts.
// ---------------------------------------------------------------------------
Outcome criterion_components() {
    const double h = 2.0, eps = 0.5, lo = 0.1;
    const double target = 0.5 * (h - eps) * (1.0 / lo - 1.0 / eps);
    RunningMoments band;
    const std::size_t reps = 100'000;
    Rng rng = stream_for(kSeed, "acc/components", 2, 0);
    for (std::size_t i = 0; i < reps; ++i) {
        const auto skeleton = sample_williams_skeleton(h, h, rng, 0);
        const auto atoms = sample_poisson_components(skeleton, eps, lo, rng);
        double in_band = 0.0;
        for (const auto& atom : atoms) {
            if (atom.distance_to_tip >= eps) in_band += 1.0;
        }
        band.add(in_band);
    }
    const double z = mean_zscore(band, target);
    return {std::fabs(z) < 4.0,
            fmt("band count mean %.4f vs %.4f on h_x >= eps segment, z = %.2f (tol 4)",
                band.mean, target, z)};
}

// ---------------------------------------------------------------------------
// Criterion 10: the snake zero-hit integral.
// ---------------------------------------------------------------------------
Outcome criterion_snake_integral() {
    ExperimentConfig cfg;
    cfg.experiment = "snake-integral";
    cfg.seed = kSeed;
    cfg.grid = 1u << 14;
    cfg.replicas = 20'000;
    cfg.workers = 0;
    const auto result = run_experiment(cfg);

    std::vector<double> v_grid;
    for (double v = 0.125; v <= 16.0; v *= 2.0) v_grid.push_back(v);
    std::vector<double> fhat(v_grid.size(), 0.0);
    std::vector<double> counts(v_grid.size(), 0.0);
    for (const auto& record : result.records) {
        counts[record.n] += record.values[1].second;
        fhat[record.n] += record.values[2].second;
    }
    for (std::size_t i = 0; i < fhat.size(); ++i) fhat[i] /= counts[i];

    std::vector<double> grid = {0.0}, values = {1.0};
    for (std::size_t i = 0; i < v_grid.size(); ++i) {
        grid.push_back(v_grid[i]);
        values.push_back(fhat[i]);
    }
    double integral = trapezoid_integral(grid, values);
    const std::size_t k = v_grid.size();
    if (fhat[k - 1] > 0.0 && fhat[k - 2] > fhat[k - 1]) {
        const double b =
            std::log(fhat[k - 2] / fhat[k - 1]) / (v_grid[k - 1] - v_grid[k - 2]);
        integral += fhat[k - 1] / b;
    }
    const double target = 2.0 * std::sqrt(2.0 * M_PI);
    const double rel = std::fabs(integral - target) / target;
    return {rel < 0.10,
            fmt("integral %.4f vs 2 sqrt(2 pi) = %.4f, relative error %.3f (tol 0.10)",
                integral, target, rel)};
}

struct LadderOutcome {
    Outcome scaling;   // criterion 11
    Outcome aldous;    // criterion 12
    Outcome moments;   // criterion 14
};

// ---------------------------------------------------------------------------
// Criteria 11, 12, 14 share one annealed ladder run.
// ---------------------------------------------------------------------------
LadderOutcome run_ladder_criteria() {
    ExperimentConfig cfg;
    cfg.experiment = "cover-scaling";
    cfg.seed = kSeed;
    cfg.sizes = {500, 1000, 2000, 4000};
    cfg.replicas = 10'000;
    cfg.mode = kDiscrete;
    cfg.workers = 0;
    const auto result = run_experiment(cfg);

    std::vector<std::vector<double>> scaled, scaled_plus;
    for (std::uint64_t n : cfg.sizes) {
        std::vector<double> a, b;
        for (const auto& record : result.records) {
            if (record.n != n) continue;
            a.push_back(record.values[2].second);       // scaled_cov
            b.push_back(record.values[3].second);       // scaled_cov_plus
        }
        scaled.push_back(std::move(a));
        scaled_plus.push_back(std::move(b));
    }

    LadderOutcome out;

    // 11: KS between consecutive scaled laws nonincreasing, last < 0.05.
    std::vector<double> ks;
    for (std::size_t i = 0; i + 1 < scaled.size(); ++i) {
        ks.push_back(ks_distance(scaled[i], scaled[i + 1]));
    }
    bool monotone = true;
    for (std::size_t i = 0; i + 1 < ks.size(); ++i) {
        monotone = monotone && ks[i + 1] <= ks[i];
    }
    out.scaling = {monotone && ks.back() < 0.05,
                   fmt("KS(500,1000)=%.4f KS(1000,2000)=%.4f KS(2000,4000)=%.4f "
                       "(nonincreasing, last < 0.05)",
                       ks[0], ks[1], ks[2])};

    // 12: mean of n^{-3/2} tau_cov_plus at n = 4000 within 20%% of 6 sqrt(2 pi).
    RunningMoments aldous;
    for (double v : scaled_plus.back()) aldous.add(v);
    const double conjecture = 6.0 * std::sqrt(2.0 * M_PI);
    const double ratio = aldous.mean / conjecture;
    const double half_ci =
        1.96 * std::sqrt(aldous.variance() / static_cast<double>(aldous.count));
    out.aldous = {ratio > 0.8 && ratio < 1.2,
                  fmt("mean %.4f (CI95 +-%.4f) vs conjectured %.4f, ratio %.3f "
                      "(band [0.8, 1.2])",
                      aldous.mean, half_ci, conjecture, ratio)};

    // 14: p-th moments stable across the ladder (consecutive ratios in
    // [0.8, 1.25]).
    bool stable = true;
    std::string detail;
    for (double p : {1.0, 2.0, 4.0}) {
        std::vector<double> moments;
        for (const auto& column : scaled) {
            double total = 0.0;
            for (double v : column) total += std::pow(v, p);
            moments.push_back(total / static_cast<double>(column.size()));
        }
        detail += fmt("p=%g:", p);
        for (std::size_t i = 0; i + 1 < moments.size(); ++i) {
            const double r = moments[i + 1] / moments[i];
            stable = stable && r > 0.8 && r < 1.25;
            detail += fmt(" %.3f", r);
        }
        detail += "  ";
    }
    out.moments = {stable, detail + "(ratios in [0.8, 1.25])"};
    return out;
}

// ---------------------------------------------------------------------------
// Criterion 13: quenched concentration tail.
// ---------------------------------------------------------------------------
Outcome criterion_concentration() {
    ExperimentConfig cfg;
    cfg.experiment = "concentration-tail";
    cfg.seed = kSeed;
    cfg.sizes = {2000};
    cfg.replicas = 100'000;
    cfg.mode = kDiscrete;
    cfg.workers = 0;
    const auto result = run_experiment(cfg);

    std::vector<double> taus;
    taus.reserve(result.records.size());
    for (const auto& record : result.records) taus.push_back(record.values[0].second);

    std::vector<double> lambda_grid;
    for (double l = 1.0; l <= 3.0 + 1e-9; l += 0.25) lambda_grid.push_back(l);
    std::vector<TailFitPoint> points;
    const auto [slope, intercept] = survival_tail_fit(taus, lambda_grid, &points);
    const auto& last = points.back();
    const double residual = last.log_survival - (intercept + slope * last.lambda);
    return {slope < 0.0 && residual <= 0.3,
            fmt("slope %.3f (< 0), last-point residual %.3f (<= 0.3, "
                "exponential-or-better tail)",
                slope, residual)};
}

}  // namespace

int main() {
    struct Criterion {
        int id;
        const char* name;
        std::function<Outcome()> run;
    };

    LadderOutcome ladder;
    bool ladder_ran = false;
    auto ensure_ladder = [&]() -> LadderOutcome& {
        if (!ladder_ran) {
            ladder = run_ladder_criteria();
            ladder_ran = true;
        }
        return ladder;
    };

    const std::vector<Criterion> criteria = {
        {1, "determinant local-time transform vs killed-system oracle",
         criterion_determinant_mgf},
        {2, "commute time identity", criterion_commute},
        {3, "cover time equals first time of positive local times",
         criterion_cover_identity},
        {4, "Monte Carlo cover means vs subset-DP oracle", criterion_cover_oracle},
        {5, "local-time profiles at hitting times", criterion_rayknight_profiles},
        {6, "squared-field coupling identity", criterion_isomorphism},
        {7, "squared-Bessel transition sampler", criterion_besq},
        {8, "spine decoration statistics", criterion_williams},
        {9, "small-component Poisson counts", criterion_components},
        {10, "zero-hit probability integral", criterion_snake_integral},
        {11, "scaled cover laws converge along the ladder",
         [&] { return ensure_ladder().scaling; }},
        {12, "cover-and-return constant probe", [&] { return ensure_ladder().aldous; }},
        {13, "quenched tail decays exponentially or better", criterion_concentration},
        {14, "scaled moments stay bounded along the ladder",
         [&] { return ensure_ladder().moments; }},
    };

    int failures = 0;
    for (const auto& criterion : criteria) {
        const auto start = std::chrono::steady_clock::now();
        Outcome outcome;
        try {
            outcome = criterion.run();
        } catch (const std::exception& e) {
            outcome = {false, std::string("exception: ") + e.what()};
        }
        const double seconds =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
                .count();
        std::printf("criterion %2d [%s] %s: %s (%.1fs)\n", criterion.id,
                    outcome.pass ? "PASS" : "FAIL", criterion.name,
                    outcome.detail.c_str(), seconds);
        std::fflush(stdout);
        if (!outcome.pass) ++failures;
    }
    if (failures == 0) {
        std::printf("acceptance: all %zu criteria passed\n", criteria.size());
    } else {
        std::printf("acceptance: %d of %zu criteria FAILED\n", failures, criteria.size());
    }
    return failures == 0 ? 0 : 1;
}
