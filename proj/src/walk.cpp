#include "crtcover/walk.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <stdexcept>

namespace crtcover {

WalkEngine::WalkEngine(const DiscreteTree& tree) : tree_(&tree) {
    const int n = tree.n;
    offsets_.assign(n + 1, 0);
    for (int v = 0; v < n; ++v) {
        offsets_[v + 1] = offsets_[v] + static_cast<int>(tree.children[v].size()) +
                          (v == tree.root ? 0 : 1);
    }
    neighbors_.assign(offsets_[n], 0);
    std::vector<int> cursor(offsets_.begin(), offsets_.end() - 1);
    for (int v = 0; v < n; ++v) {
        if (v != tree.root) neighbors_[cursor[v]++] = tree.parent[v];
        for (int c : tree.children[v]) neighbors_[cursor[v]++] = c;
    }
    occupation_.assign(n, 0.0);
    visited_.assign(n, 0);
}

CoverRecord WalkEngine::run_cover(WalkMode mode, int start, Rng& rng,
                                  const CoverOptions& opts) {
    const int n = tree_->n;
    const bool continuous = mode.kind == WalkKind::ConstantSpeed;
    const bool track_occupation =
        opts.local_times_at_cover || opts.local_times_at_cover_plus;

    std::fill(visited_.begin(), visited_.end(), 0);
    if (track_occupation) std::fill(occupation_.begin(), occupation_.end(), 0.0);

    CoverRecord record;
    record.start = start;

    auto snapshot_local_times = [&](std::optional<std::vector<double>>& slot) {
        slot.emplace(n);
        for (int v = 0; v < n; ++v) {
            (*slot)[v] = occupation_[v] / mu(v, mode.measure);
        }
    };

    int pos = start;
    int uncovered = n;
    visited_[pos] = 1;
    --uncovered;
    double clock = 0.0;
    // Discrete local times count the time-t position as well, so the cover
    // identity tau_cov = min{t : all local times > 0} holds exactly.
    if (track_occupation) occupation_[pos] += continuous ? 0.0 : 1.0;

    if (uncovered == 0) {
        record.tau_cov = 0.0;
        record.last_covered = pos;
        if (opts.local_times_at_cover) snapshot_local_times(record.local_times_at_cover);
        record.tau_cov_plus = 0.0;
        if (opts.local_times_at_cover_plus) {
            snapshot_local_times(record.local_times_at_cover_plus);
        }
        return record;
    }

    bool covered = false;
    for (std::uint64_t step = 0; step < kStepBudget; ++step) {
        double hold = 0.0;
        if (continuous) {
            hold = rng.exponential();
            if (track_occupation) occupation_[pos] += hold;
            clock += hold;
        } else {
            clock += 1.0;
        }
        pos = step_to(pos, rng);
        if (!continuous && track_occupation) occupation_[pos] += 1.0;
        if (!covered) {
            if (!visited_[pos]) {
                visited_[pos] = 1;
                if (--uncovered == 0) {
                    covered = true;
                    record.tau_cov = clock;
                    record.last_covered = pos;
                    if (opts.local_times_at_cover) {
                        snapshot_local_times(record.local_times_at_cover);
                    }
                }
            }
        }
        if (covered && pos == start) {
            record.tau_cov_plus = clock;
            if (opts.local_times_at_cover_plus) {
                snapshot_local_times(record.local_times_at_cover_plus);
            }
            return record;
        }
    }
    throw std::runtime_error("run_cover: step budget exceeded (check the rng stream)");
}

std::pair<double, LocalTimeVector> WalkEngine::run_until_hit(WalkMode mode, int start,
                                                             int target,
                                                             std::span<const int> marks,
                                                             Rng& rng) {
    const bool continuous = mode.kind == WalkKind::ConstantSpeed;
    std::fill(occupation_.begin(), occupation_.end(), 0.0);

    LocalTimeVector out;
    out.normalization = mode.measure;
    out.values.assign(marks.size(), 0.0);

    double clock = 0.0;
    int pos = start;
    if (pos != target) {
        bool hit = false;
        for (std::uint64_t step = 0; step < kStepBudget; ++step) {
            if (continuous) {
                const double hold = rng.exponential();
                occupation_[pos] += hold;
                clock += hold;
            } else {
                occupation_[pos] += 1.0;
                clock += 1.0;
            }
            pos = step_to(pos, rng);
            if (pos == target) {
                hit = true;
                break;
            }
        }
        if (!hit) {
            throw std::runtime_error("run_until_hit: step budget exceeded");
        }
    }
    for (std::size_t i = 0; i < marks.size(); ++i) {
        out.values[i] = occupation_[marks[i]] / mu(marks[i], mode.measure);
    }
    return {clock, std::move(out)};
}

double expected_hitting_exact(const DiscreteTree& tree, WalkMode /*mode*/, int x, int y) {
    if (x == y) return 0.0;
    const int n = tree.n;
    if (n > 2000) throw std::invalid_argument("expected_hitting_exact: dense solve capped at n=2000");
    WalkEngine engine(tree);

    // Unknowns: h(v) for v != y, with h(v) = 1 + mean of h over neighbors.
    // Hitting times reach ~2 n d, so keeping sub-1e-9 absolute accuracy
    // needs extended precision plus refinement.
    using Mat = Eigen::Matrix<long double, Eigen::Dynamic, Eigen::Dynamic>;
    using Vec = Eigen::Matrix<long double, Eigen::Dynamic, 1>;
    std::vector<int> row(n, -1);
    int m = 0;
    for (int v = 0; v < n; ++v) {
        if (v != y) row[v] = m++;
    }
    Mat a = Mat::Zero(m, m);
    Vec b = Vec::Ones(m);
    for (int v = 0; v < n; ++v) {
        if (v == y) continue;
        a(row[v], row[v]) = 1.0L;
        const long double inv_deg = 1.0L / static_cast<long double>(engine.degree(v));
        auto add = [&](int w) {
            if (w != y) a(row[v], row[w]) -= inv_deg;
        };
        if (v != tree.root) add(tree.parent[v]);
        for (int c : tree.children[v]) add(c);
    }
    Eigen::PartialPivLU<Mat> lu(a);
    Vec h = lu.solve(b);
    for (int refine = 0; refine < 2; ++refine) {
        h += lu.solve(Vec(b - a * h));
    }
    const long double residual = (a * h - b).cwiseAbs().maxCoeff();
    if (!(residual < 1e-6L)) {
        throw std::runtime_error("expected_hitting_exact: singular system");
    }
    return static_cast<double>(h(row[x]));
}

double expected_cover_exact_small(const DiscreteTree& tree, WalkMode /*mode*/, int start) {
    const int n = tree.n;
    if (n > 14) throw std::invalid_argument("expected_cover_exact_small: n > 14");
    if (n == 1) return 0.0;
    WalkEngine engine(tree);

    const std::uint32_t full = (1u << n) - 1;
    // value[mask * n + v]: expected remaining time from v with visited mask.
    std::vector<double> value(static_cast<std::size_t>(full + 1) * n, 0.0);

    std::vector<std::uint32_t> masks(full + 1);
    for (std::uint32_t m = 0; m <= full; ++m) masks[m] = m;
    std::sort(masks.begin(), masks.end(), [](std::uint32_t a, std::uint32_t b) {
        const int pa = __builtin_popcount(a), pb = __builtin_popcount(b);
        return pa != pb ? pa > pb : a < b;
    });

    std::vector<int> members;
    for (std::uint32_t mask : masks) {
        if (mask == full || mask == 0) continue;
        members.clear();
        for (int v = 0; v < n; ++v) {
            if (mask & (1u << v)) members.push_back(v);
        }
        const int k = static_cast<int>(members.size());
        Eigen::MatrixXd a = Eigen::MatrixXd::Identity(k, k);
        Eigen::VectorXd b = Eigen::VectorXd::Ones(k);
        std::vector<int> pos_of(n, -1);
        for (int i = 0; i < k; ++i) pos_of[members[i]] = i;
        for (int i = 0; i < k; ++i) {
            const int v = members[i];
            const double inv_deg = 1.0 / static_cast<double>(engine.degree(v));
            auto visit = [&](int w) {
                if (mask & (1u << w)) {
                    a(i, pos_of[w]) -= inv_deg;
                } else {
                    const std::uint32_t next = mask | (1u << w);
                    b(i) += inv_deg * value[static_cast<std::size_t>(next) * n + w];
                }
            };
            if (v != tree.root) visit(tree.parent[v]);
            for (int c : tree.children[v]) visit(c);
        }
        Eigen::VectorXd h = a.partialPivLu().solve(b);
        for (int i = 0; i < k; ++i) {
            value[static_cast<std::size_t>(mask) * n + members[i]] = h(i);
        }
    }
    return value[(static_cast<std::size_t>(1u << start)) * n + start];
}

double mgf_local_times_exact(const DiscreteTree& tree, SpeedMeasure /*measure*/, int x,
                             int y, std::span<const int> marks,
                             std::span<const double> lambdas) {
    if (marks.size() != lambdas.size()) {
        throw std::invalid_argument("mgf_local_times_exact: marks/lambdas length mismatch");
    }
    if (x == y) return 1.0;
    const int n = tree.n;
    WalkEngine engine(tree);

    std::vector<double> lambda_at(n, 0.0);
    for (std::size_t i = 0; i < marks.size(); ++i) lambda_at[marks[i]] += lambdas[i];

    // mu-free form of (generator + V)h = 0 off y, h(y) = 1:
    //   (deg(v) - lambda_v) h(v) - sum_{w ~ v, w != y} h(w) = 1{v ~ y}.
    // The matrix is symmetric; positive definiteness is exactly the
    // smallness condition on lambda.
    std::vector<int> row(n, -1);
    int m = 0;
    for (int v = 0; v < n; ++v) {
        if (v != y) row[v] = m++;
    }
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(m, m);
    Eigen::VectorXd b = Eigen::VectorXd::Zero(m);
    for (int v = 0; v < n; ++v) {
        if (v == y) continue;
        a(row[v], row[v]) = static_cast<double>(engine.degree(v)) - lambda_at[v];
        auto couple = [&](int w) {
            if (w == y) {
                b(row[v]) += 1.0;
            } else {
                a(row[v], row[w]) -= 1.0;
            }
        };
        if (v != tree.root) couple(tree.parent[v]);
        for (int c : tree.children[v]) couple(c);
    }
    Eigen::LLT<Eigen::MatrixXd> llt(a);
    if (llt.info() != Eigen::Success) {
        throw std::domain_error("mgf_local_times_exact: lambda too large (system not positive)");
    }
    Eigen::VectorXd h = llt.solve(b);
    return h(row[x]);
}

double green_killed(const TreeMetricIndex& index, int y, int z, int w) {
    return static_cast<double>(index.graph_distance(y, index.branch_point(y, z, w)));
}

}  // namespace crtcover
