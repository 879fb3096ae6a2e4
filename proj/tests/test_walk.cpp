#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "crtcover/discrete_tree.hpp"
#include "crtcover/gw.hpp"
#include "crtcover/offspring.hpp"
#include "crtcover/rng.hpp"
#include "crtcover/stats.hpp"
#include "crtcover/walk.hpp"

using namespace crtcover;

namespace {

const WalkMode kDiscrete{WalkKind::DiscreteTime, SpeedMeasure::Conductance};
const WalkMode kConstantSpeed{WalkKind::ConstantSpeed, SpeedMeasure::Conductance};

DiscreteTree random_tree(std::uint64_t n, Rng& rng) {
    static const OffspringLaw law = OffspringLaw::poisson1();
    return sample_conditioned_gw(law, n, rng);
}

}  // namespace

TEST_CASE("two-vertex tree has forced cover times") {
    const auto tree = DiscreteTree::path(2);
    WalkEngine engine(tree);
    Rng rng(1);
    for (int i = 0; i < 25; ++i) {
        const auto record = engine.run_cover(kDiscrete, 0, rng);
        CHECK(record.tau_cov == 1.0);
        CHECK(record.tau_cov_plus == 2.0);
        CHECK(record.last_covered == 1);
    }
}

TEST_CASE("three-path expected cover time from the center is 5") {
    const auto tree = DiscreteTree::path(3);
    CHECK(expected_cover_exact_small(tree, kDiscrete, 1) == doctest::Approx(5.0).epsilon(1e-9));
    CHECK(expected_cover_exact_small(DiscreteTree::path(2), kDiscrete, 0) ==
          doctest::Approx(1.0));

    WalkEngine engine(tree);
    Rng rng(2);
    RunningMoments mc;
    for (int i = 0; i < 100'000; ++i) {
        mc.add(engine.run_cover(kDiscrete, 1, rng).tau_cov);
    }
    const double se = std::sqrt(mc.variance() / static_cast<double>(mc.count));
    CHECK(std::fabs(mc.mean - 5.0) < 4.0 * se);
}

TEST_CASE("cover identity: local times positive exactly at the cover time") {
    Rng rng(3);
    CoverOptions opts;
    opts.local_times_at_cover = true;
    opts.local_times_at_cover_plus = true;
    for (int round = 0; round < 40; ++round) {
        const auto tree = random_tree(2 + rng.below(60), rng);
        WalkEngine engine(tree);
        const int start = static_cast<int>(rng.below(tree.n));
        const auto record = engine.run_cover(kDiscrete, start, rng, opts);
        REQUIRE(record.local_times_at_cover.has_value());
        double min_lt = 1e300;
        for (double lt : *record.local_times_at_cover) min_lt = std::min(min_lt, lt);
        CHECK(min_lt > 0.0);
        // The last covered vertex has been visited exactly once at tau_cov.
        const int last = record.last_covered;
        CHECK((*record.local_times_at_cover)[last] ==
              1.0 / static_cast<double>(engine.degree(last)));
        CHECK(record.tau_cov_plus >= record.tau_cov);
        auto ecc = bfs_distances(tree, start);
        CHECK(record.tau_cov >= *std::max_element(ecc.begin(), ecc.end()));
    }
}

TEST_CASE("expected hitting times and the commute identity") {
    const auto two = DiscreteTree::path(2);
    CHECK(expected_hitting_exact(two, kDiscrete, 0, 1) +
              expected_hitting_exact(two, kDiscrete, 1, 0) ==
          doctest::Approx(2.0).epsilon(1e-12));

    const auto three = DiscreteTree::path(3);
    CHECK(expected_hitting_exact(three, kDiscrete, 0, 2) == doctest::Approx(4.0).epsilon(1e-12));

    Rng rng(4);
    for (int round = 0; round < 8; ++round) {
        const auto tree = random_tree(2 + rng.below(199), rng);
        TreeMetricIndex index(tree);
        for (int q = 0; q < 8; ++q) {
            const int x = static_cast<int>(rng.below(tree.n));
            const int y = static_cast<int>(rng.below(tree.n));
            const double commute = expected_hitting_exact(tree, kDiscrete, x, y) +
                                   expected_hitting_exact(tree, kDiscrete, y, x);
            const double target =
                2.0 * static_cast<double>(tree.n - 1) * index.graph_distance(x, y);
            CHECK(std::fabs(commute - target) < 1e-9 * std::max(1.0, target));
        }
    }
}

TEST_CASE("run_until_hit basics and first-moment Green identity") {
    const auto three = DiscreteTree::path(3);
    WalkEngine engine(three);
    Rng rng(5);

    const std::vector<int> self_marks = {1, 2};
    const auto [t0, lt0] = engine.run_until_hit(kConstantSpeed, 2, 2, self_marks, rng);
    CHECK(t0 == 0.0);
    CHECK(lt0.values[0] == 0.0);
    CHECK(lt0.values[1] == 0.0);

    // E[L_{tau_0}(2)] from start 2 equals R(0,2) = 2.
    RunningMoments acc;
    const std::vector<int> marks = {2};
    for (int i = 0; i < 100'000; ++i) {
        acc.add(engine.run_until_hit(kConstantSpeed, 2, 0, marks, rng).second.values[0]);
    }
    const double se = std::sqrt(acc.variance() / static_cast<double>(acc.count));
    CHECK(std::fabs(acc.mean - 2.0) < 4.0 * se);
}

TEST_CASE("mean local times match green_killed on random configurations") {
    Rng rng(6);
    for (int config = 0; config < 20; ++config) {
        const auto tree = random_tree(2 + rng.below(25), rng);
        TreeMetricIndex index(tree);
        WalkEngine engine(tree);
        const int x = static_cast<int>(rng.below(tree.n));
        int y = static_cast<int>(rng.below(tree.n));
        while (y == x) y = static_cast<int>(rng.below(tree.n));
        int z = static_cast<int>(rng.below(tree.n));
        while (z == y) z = static_cast<int>(rng.below(tree.n));
        const std::vector<int> marks = {z};
        RunningMoments acc;
        const std::size_t reps = 30'000;
        for (std::size_t i = 0; i < reps; ++i) {
            acc.add(engine.run_until_hit(kConstantSpeed, x, y, marks, rng).second.values[0]);
        }
        const double target = green_killed(index, y, x, z);
        const double se = std::sqrt(acc.variance() / static_cast<double>(acc.count));
        INFO("config ", config, ": target ", target, " mean ", acc.mean);
        CHECK(std::fabs(acc.mean - target) < 4.0 * std::max(se, 1e-12));
    }
}

TEST_CASE("green_killed closed form") {
    const auto three = DiscreteTree::path(3);
    TreeMetricIndex index(three);
    CHECK(green_killed(index, 0, 0, 2) == 0.0);
    CHECK(green_killed(index, 0, 2, 0) == 0.0);
    CHECK(green_killed(index, 0, 2, 2) == 2.0);
    CHECK(green_killed(index, 0, 1, 2) == 1.0);
}

TEST_CASE("local-time transform oracle") {
    const auto three = DiscreteTree::path(3);
    const std::vector<int> marks = {1};

    std::vector<double> zero = {0.0};
    CHECK(mgf_local_times_exact(three, SpeedMeasure::Conductance, 2, 0, marks, zero) ==
          doctest::Approx(1.0));

    for (double lambda : {0.2, 0.5, 0.9}) {
        std::vector<double> l = {lambda};
        CHECK(mgf_local_times_exact(three, SpeedMeasure::Conductance, 2, 0, marks, l) ==
              doctest::Approx(1.0 / (1.0 - lambda)).epsilon(1e-12));
    }
    std::vector<double> too_large = {1.5};
    CHECK_THROWS_AS(
        (void)mgf_local_times_exact(three, SpeedMeasure::Conductance, 2, 0, marks, too_large),
        std::domain_error);
}

TEST_CASE("discrete and constant-speed cover times share their mean") {
    const auto tree = DiscreteTree::path(3);
    WalkEngine engine(tree);
    Rng rng(7);
    RunningMoments continuous;
    for (int i = 0; i < 100'000; ++i) {
        continuous.add(engine.run_cover(kConstantSpeed, 1, rng).tau_cov);
    }
    const double se = std::sqrt(continuous.variance() / static_cast<double>(continuous.count));
    CHECK(std::fabs(continuous.mean - 5.0) < 4.0 * se);
}

TEST_CASE("local-time profile matches the squared-Bessel moments on the arc") {
    // Walk from one end of a path to the other: at distance-from-target r,
    // local times have mean r and variance r^2 (dimension-2 profile at
    // clock r/2).
    const auto path = DiscreteTree::path(5);
    WalkEngine engine(path);
    Rng rng(8);
    const std::vector<int> marks = {1, 2, 3};
    std::vector<RunningMoments> first(3), second(3);
    const std::size_t reps = 100'000;
    for (std::size_t i = 0; i < reps; ++i) {
        const auto lt = engine.run_until_hit(kConstantSpeed, 4, 0, marks, rng).second;
        for (int j = 0; j < 3; ++j) {
            first[j].add(lt.values[j]);
            second[j].add(lt.values[j] * lt.values[j]);
        }
    }
    for (int j = 0; j < 3; ++j) {
        const double r = static_cast<double>(marks[j]);
        const double se1 = std::sqrt(first[j].variance() / static_cast<double>(reps));
        CHECK(std::fabs(first[j].mean - r) < 4.0 * se1);
        // E[L^2] = Var + mean^2 = 2 r^2.
        const double se2 = std::sqrt(second[j].variance() / static_cast<double>(reps));
        CHECK(std::fabs(second[j].mean - 2.0 * r * r) < 4.0 * se2);
    }
}

TEST_CASE("off-arc local times behave like a dimension-0 branch") {
    // Path 0-1-2 with an extra leaf 3 under vertex 1; walk 2 -> 0.
    DiscreteTree tree;
    tree.n = 4;
    tree.root = 0;
    tree.parent = {-1, 0, 1, 1};
    tree.children = {{1}, {2, 3}, {}, {}};
    REQUIRE(tree.valid());

    WalkEngine engine(tree);
    Rng rng(9);
    const std::vector<int> marks = {1, 3};  // branch root and off-arc leaf
    RunningMoments diff, diff2_minus;
    const std::size_t reps = 200'000;
    for (std::size_t i = 0; i < reps; ++i) {
        const auto lt = engine.run_until_hit(kConstantSpeed, 2, 0, marks, rng).second;
        const double at_root = lt.values[0];
        const double at_leaf = lt.values[1];
        diff.add(at_leaf - at_root);
        // Conditional variance of the branch value is 2 R(1,3) L(1).
        diff2_minus.add((at_leaf - at_root) * (at_leaf - at_root) - 2.0 * at_root);
    }
    const double se1 = std::sqrt(diff.variance() / static_cast<double>(reps));
    CHECK(std::fabs(diff.mean) < 4.0 * se1);
    const double se2 = std::sqrt(diff2_minus.variance() / static_cast<double>(reps));
    CHECK(std::fabs(diff2_minus.mean) < 4.0 * se2);
}

TEST_CASE("exact cover oracle agrees with simulation on small trees") {
    Rng rng(10);
    for (int n = 2; n <= 8; ++n) {
        // A few shapes per size keeps this test quick; the acceptance suite
        // runs the exhaustive version.
        std::vector<DiscreteTree> trees;
        for_each_rooted_tree(n, [&](const DiscreteTree& t) { trees.push_back(t); });
        for (std::size_t pick = 0; pick < std::min<std::size_t>(3, trees.size()); ++pick) {
            const auto& tree = trees[rng.below(trees.size())];
            WalkEngine engine(tree);
            const double exact = expected_cover_exact_small(tree, kDiscrete, tree.root);
            RunningMoments mc;
            for (int i = 0; i < 20'000; ++i) {
                mc.add(engine.run_cover(kDiscrete, tree.root, rng).tau_cov);
            }
            const double se = std::sqrt(mc.variance() / static_cast<double>(mc.count));
            CHECK(std::fabs(mc.mean - exact) < 4.0 * std::max(se, 1e-12));
        }
    }
    CHECK_THROWS((void)expected_cover_exact_small(DiscreteTree::path(15), kDiscrete, 0));
}
