#include "crtcover/experiments.hpp"

#include <json.hpp>

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <mutex>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "crtcover/besq.hpp"
#include "crtcover/excursion.hpp"
#include "crtcover/gaussian_field.hpp"
#include "crtcover/gw.hpp"
#include "crtcover/stats.hpp"
#include "crtcover/williams.hpp"

namespace crtcover {

namespace {

using nlohmann::json;

constexpr const char* kToolVersion = "crtcover 0.1.0";

// ---------------------------------------------------------------------------
// Minimal JSON emitter with %.17g floats, so outputs are byte-stable.
// ---------------------------------------------------------------------------

std::string escape_json(const std::string& text) {
    std::string out;
    out.reserve(text.size() + 2);
    for (char c : text) {
        switch (c) {
            case '"': out += "\\\""; break;
            case '\\': out += "\\\\"; break;
            case '\n': out += "\\n"; break;
            case '\t': out += "\\t"; break;
            default: out += c;
        }
    }
    return out;
}

class JsonWriter {
public:
    JsonWriter& begin_object() { return token("{"); }
    JsonWriter& end_object() {
        trailing_comma_ = false;
        buffer_ += '}';
        pending_comma_ = true;
        return *this;
    }
    JsonWriter& begin_array() { return token("["); }
    JsonWriter& end_array() {
        trailing_comma_ = false;
        buffer_ += ']';
        pending_comma_ = true;
        return *this;
    }
    JsonWriter& key(const std::string& name) {
        comma();
        buffer_ += '"';
        buffer_ += escape_json(name);
        buffer_ += "\":";
        pending_comma_ = false;
        return *this;
    }
    JsonWriter& value(double v) {
        comma();
        buffer_ += format_double(v);
        pending_comma_ = true;
        return *this;
    }
    JsonWriter& value(std::uint64_t v) {
        comma();
        buffer_ += std::to_string(v);
        pending_comma_ = true;
        return *this;
    }
    JsonWriter& value(std::int64_t v) {
        comma();
        buffer_ += std::to_string(v);
        pending_comma_ = true;
        return *this;
    }
    JsonWriter& value(bool v) {
        comma();
        buffer_ += v ? "true" : "false";
        pending_comma_ = true;
        return *this;
    }
    JsonWriter& value(const std::string& v) {
        comma();
        buffer_ += '"';
        buffer_ += escape_json(v);
        buffer_ += '"';
        pending_comma_ = true;
        return *this;
    }
    const std::string& str() const { return buffer_; }

private:
    JsonWriter& token(const char* t) {
        comma();
        buffer_ += t;
        pending_comma_ = false;
        return *this;
    }
    void comma() {
        if (pending_comma_) buffer_ += ',';
        pending_comma_ = false;
    }
    std::string buffer_;
    bool pending_comma_ = false;
    bool trailing_comma_ = false;
};

std::string iso_timestamp() {
    const auto now = std::chrono::system_clock::now();
    const std::time_t t = std::chrono::system_clock::to_time_t(now);
    char buf[32];
    std::tm tm_utc{};
    gmtime_r(&t, &tm_utc);
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm_utc);
    return buf;
}

// ---------------------------------------------------------------------------
// Shared helpers
// ---------------------------------------------------------------------------

SummaryRow make_row(const std::string& experiment, std::uint64_t n,
                    std::span<const double> samples) {
    const SummaryStats stats = summarize(samples);
    SummaryRow row;
    row.experiment = experiment;
    row.n = n;
    row.count = stats.count;
    row.mean = stats.mean;
    row.stderr_mean = stats.stderr_mean;
    row.q05 = stats.quantiles[1];
    row.q50 = stats.quantiles[3];
    row.q95 = stats.quantiles[5];
    return row;
}

std::vector<double> column(const std::vector<ReplicaRecord>& records, std::uint64_t n,
                           const std::string& name) {
    std::vector<double> out;
    for (const auto& record : records) {
        if (record.n != n) continue;
        for (const auto& [key, value] : record.values) {
            if (key == name) out.push_back(value);
        }
    }
    return out;
}

double empirical_moment(std::span<const double> samples, double p) {
    double total = 0.0;
    for (double x : samples) total += std::pow(x, p);
    return total / static_cast<double>(samples.size());
}

std::vector<DiscreteTree> exhaustive_trees_up_to(int max_n) {
    std::vector<DiscreteTree> trees;
    for (int n = 1; n <= max_n; ++n) {
        for_each_rooted_tree(n, [&](const DiscreteTree& t) { trees.push_back(t); });
    }
    return trees;
}

// Admissible lambda draw for the local-time transform: scaled so the
// spectral radius of Sigma Lambda stays below 0.9.
std::vector<double> draw_admissible_lambdas(const SigmaMatrices& m, Rng& rng) {
    const auto k = m.marks.size();
    std::vector<double> lambdas(k, 0.0);
    for (std::size_t i = 0; i < k; ++i) {
        const double sigma_ii = std::max(m.sigma[i][i], 1.0);
        const double u = 2.0 * rng.uniform() - 1.0;
        lambdas[i] = 0.9 * u / (static_cast<double>(k) * sigma_ii);
    }
    return lambdas;
}

struct LadderData {
    std::vector<ReplicaRecord> records;
};

// Annealed (or quenched) cover/cover-and-return ladder shared by the
// scaling, moment and Aldous runs.
LadderData run_cover_ladder(const ExperimentConfig& cfg) {
    LadderData data;
    const OffspringLaw law = OffspringLaw::from_name(cfg.law);

    for (std::uint64_t n : cfg.sizes) {
        const ScalingConstants scaling = scaling_constants(law, n);
        DiscreteTree quenched_tree;
        if (cfg.quenched) {
            Rng tree_rng = stream_for(cfg.seed, cfg.experiment + "/tree", n, 0);
            quenched_tree = sample_conditioned_gw(law, n, tree_rng);
        }
        std::vector<ReplicaRecord> batch(cfg.replicas);
        parallel_for(cfg.replicas, cfg.workers, [&](std::size_t r) {
            Rng rng = stream_for(cfg.seed, cfg.experiment, n, r);
            const DiscreteTree tree =
                cfg.quenched ? quenched_tree : sample_conditioned_gw(law, n, rng);
            WalkEngine engine(tree);
            const CoverRecord cover = engine.run_cover(cfg.mode, tree.root, rng);
            ReplicaRecord record;
            record.n = n;
            record.replica = r;
            record.stream_id = stream_key(cfg.seed, cfg.experiment, n, r);
            const double scale = scaling.sigma * std::pow(static_cast<double>(n), -1.5);
            record.values = {
                {"tau_cov", cover.tau_cov},
                {"tau_cov_plus", cover.tau_cov_plus},
                {"scaled_cov", scale * cover.tau_cov},
                {"scaled_cov_plus", scale * cover.tau_cov_plus},
            };
            batch[r] = std::move(record);
        });
        for (auto& record : batch) data.records.push_back(std::move(record));
    }
    return data;
}

// ---------------------------------------------------------------------------
// Experiments
// ---------------------------------------------------------------------------

ExperimentResult experiment_cover_scaling(const ExperimentConfig& cfg) {
    ExperimentResult result;
    result.records = run_cover_ladder(cfg).records;

    JsonWriter w;
    w.begin_object();
    w.key("experiment").value(cfg.experiment);
    w.key("per_n").begin_array();
    std::vector<std::vector<double>> scaled_by_n;
    for (std::uint64_t n : cfg.sizes) {
        auto scaled = column(result.records, n, "scaled_cov");
        result.table.push_back(make_row(cfg.experiment, n, scaled));
        const SummaryStats stats = summarize(scaled);
        w.begin_object();
        w.key("n").value(n);
        w.key("mean").value(stats.mean);
        w.key("stderr").value(stats.stderr_mean);
        w.key("moment_p1").value(empirical_moment(scaled, 1.0));
        w.key("moment_p2").value(empirical_moment(scaled, 2.0));
        w.key("moment_p4").value(empirical_moment(scaled, 4.0));
        w.end_object();
        scaled_by_n.push_back(std::move(scaled));
    }
    w.end_array();
    w.key("ks_consecutive").begin_array();
    for (std::size_t i = 0; i + 1 < scaled_by_n.size(); ++i) {
        w.value(ks_distance(scaled_by_n[i], scaled_by_n[i + 1]));
    }
    w.end_array();
    w.end_object();
    result.summary_json = w.str();
    return result;
}

ExperimentResult experiment_aldous_probe(const ExperimentConfig& cfg) {
    ExperimentResult result;
    result.records = run_cover_ladder(cfg).records;

    const double target = 6.0 * std::sqrt(2.0 * M_PI);
    JsonWriter w;
    w.begin_object();
    w.key("experiment").value(cfg.experiment);
    w.key("target_cover_and_return").value(target);
    w.key("per_n").begin_array();
    for (std::uint64_t n : cfg.sizes) {
        auto scaled = column(result.records, n, "scaled_cov_plus");
        result.table.push_back(make_row(cfg.experiment, n, scaled));
        const SummaryStats stats = summarize(scaled);
        w.begin_object();
        w.key("n").value(n);
        w.key("mean").value(stats.mean);
        w.key("stderr").value(stats.stderr_mean);
        w.key("ci95_low").value(stats.mean - 1.96 * stats.stderr_mean);
        w.key("ci95_high").value(stats.mean + 1.96 * stats.stderr_mean);
        w.key("ratio_to_target").value(stats.mean / target);
        w.end_object();
    }
    w.end_array();
    w.end_object();
    result.summary_json = w.str();
    return result;
}

ExperimentResult experiment_cover_return_moments(const ExperimentConfig& cfg) {
    ExperimentResult result;
    result.records = run_cover_ladder(cfg).records;

    JsonWriter w;
    w.begin_object();
    w.key("experiment").value(cfg.experiment);
    w.key("per_n").begin_array();
    std::map<double, std::vector<double>> moments_by_p;
    for (std::uint64_t n : cfg.sizes) {
        auto scaled = column(result.records, n, "scaled_cov_plus");
        result.table.push_back(make_row(cfg.experiment, n, scaled));
        w.begin_object();
        w.key("n").value(n);
        for (double p : {1.0, 2.0, 4.0}) {
            const double m = empirical_moment(scaled, p);
            w.key("moment_p" + std::to_string(static_cast<int>(p))).value(m);
            moments_by_p[p].push_back(m);
        }
        w.end_object();
    }
    w.end_array();
    w.key("moment_ratios").begin_array();
    for (double p : {1.0, 2.0, 4.0}) {
        const auto& ms = moments_by_p[p];
        w.begin_object();
        w.key("p").value(p);
        w.key("ratios").begin_array();
        for (std::size_t i = 0; i + 1 < ms.size(); ++i) w.value(ms[i + 1] / ms[i]);
        w.end_array();
        w.end_object();
    }
    w.end_array();
    w.end_object();
    result.summary_json = w.str();
    return result;
}

ExperimentResult experiment_rayknight_mgf(const ExperimentConfig& cfg) {
    const int max_n =
        cfg.sizes.empty() ? 8 : static_cast<int>(*std::max_element(cfg.sizes.begin(),
                                                                   cfg.sizes.end()));
    if (max_n > 10) throw std::invalid_argument("rayknight-mgf: exhaustive shapes capped at n=10");
    const auto trees = exhaustive_trees_up_to(max_n);

    ExperimentResult result;
    result.records.resize(trees.size());
    parallel_for(trees.size(), cfg.workers, [&](std::size_t t) {
        const DiscreteTree& tree = trees[t];
        Rng rng = stream_for(cfg.seed, cfg.experiment, tree.n, t);
        TreeMetricIndex index(tree);
        double worst = 0.0;
        for (std::size_t c = 0; c < 5; ++c) {
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
            for (std::size_t l = 0; l < 5; ++l) {
                const auto lambdas = draw_admissible_lambdas(m, rng);
                const double det_value = mgf_determinant(m, lambdas);
                const double oracle =
                    mgf_local_times_exact(tree, cfg.mode.measure, x, y, m.marks, lambdas);
                worst = std::max(worst, std::fabs(det_value - oracle));
            }
        }
        ReplicaRecord record;
        record.n = static_cast<std::uint64_t>(tree.n);
        record.replica = t;
        record.stream_id = stream_key(cfg.seed, cfg.experiment, tree.n, t);
        record.values = {{"max_abs_diff", worst}};
        result.records[t] = std::move(record);
    });

    double global_worst = 0.0;
    std::vector<double> diffs;
    for (const auto& record : result.records) {
        global_worst = std::max(global_worst, record.values[0].second);
        diffs.push_back(record.values[0].second);
    }
    result.table.push_back(make_row(cfg.experiment, max_n, diffs));
    JsonWriter w;
    w.begin_object();
    w.key("experiment").value(cfg.experiment);
    w.key("trees").value(static_cast<std::uint64_t>(trees.size()));
    w.key("max_abs_diff").value(global_worst);
    w.key("tolerance").value(1e-8);
    w.key("pass").value(global_worst < 1e-8);
    w.end_object();
    result.summary_json = w.str();
    return result;
}

ExperimentResult experiment_isomorphism(const ExperimentConfig& cfg) {
    const OffspringLaw law = OffspringLaw::from_name(cfg.law);
    ExperimentResult result;
    result.records.resize(cfg.configs);

    parallel_for(cfg.configs, cfg.workers, [&](std::size_t c) {
        Rng rng = stream_for(cfg.seed, cfg.experiment, 0, c);
        const std::uint64_t n = cfg.sizes.empty()
                                    ? 30
                                    : cfg.sizes[c % cfg.sizes.size()];
        const DiscreteTree tree = sample_conditioned_gw(law, n, rng);
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
        const auto reports = check_isomorphism(tree, x, y, marks, cfg.replicas, rng);
        ReplicaRecord record;
        record.n = n;
        record.replica = c;
        record.stream_id = stream_key(cfg.seed, cfg.experiment, 0, c);
        double worst = 0.0;
        for (const auto& report : reports) {
            worst = std::max({worst, std::fabs(report.z_mean), std::fabs(report.z_second)});
        }
        record.values = {{"max_abs_z", worst}};
        result.records[c] = std::move(record);
    });

    std::vector<double> zs;
    double worst = 0.0;
    for (const auto& record : result.records) {
        zs.push_back(record.values[0].second);
        worst = std::max(worst, record.values[0].second);
    }
    result.table.push_back(make_row(cfg.experiment, 0, zs));
    JsonWriter w;
    w.begin_object();
    w.key("experiment").value(cfg.experiment);
    w.key("configs").value(static_cast<std::uint64_t>(cfg.configs));
    w.key("replicas").value(static_cast<std::uint64_t>(cfg.replicas));
    w.key("max_abs_z").value(worst);
    w.key("threshold").value(4.0);
    w.key("pass").value(worst < 4.0);
    w.end_object();
    result.summary_json = w.str();
    return result;
}

ExperimentResult experiment_besq_validate(const ExperimentConfig& cfg) {
    ExperimentResult result;

    // Exact-transition moments and the absorption atom.
    struct MomentCase {
        double x, dim, t;
    };
    const std::vector<MomentCase> cases = {{1.0, 0.0, 1.0}, {2.0, 2.0, 0.5}, {0.7, 3.5, 2.0}};
    Rng rng = stream_for(cfg.seed, cfg.experiment, 0, 0);

    JsonWriter w;
    w.begin_object();
    w.key("experiment").value(cfg.experiment);
    w.key("moment_checks").begin_array();
    double worst_z = 0.0;
    for (const auto& mc : cases) {
        RunningMoments values;
        std::size_t zeros = 0;
        for (std::size_t r = 0; r < cfg.replicas; ++r) {
            const double draw = besq_transition(mc.x, mc.t, mc.dim, rng);
            values.add(draw);
            if (draw == 0.0) ++zeros;
        }
        const double mean_target = mc.x + mc.dim * mc.t;
        const double var_target = 4.0 * mc.t * mc.x + 2.0 * mc.dim * mc.t * mc.t;
        const double z_mean = (values.mean - mean_target) /
                              std::sqrt(values.variance() / static_cast<double>(values.count));
        w.begin_object();
        w.key("x").value(mc.x);
        w.key("dim").value(mc.dim);
        w.key("t").value(mc.t);
        w.key("z_mean").value(z_mean);
        w.key("var_sample").value(values.variance());
        w.key("var_target").value(var_target);
        if (mc.dim == 0.0) {
            const double p0 = std::exp(-mc.x / (2.0 * mc.t));
            const double phat =
                static_cast<double>(zeros) / static_cast<double>(cfg.replicas);
            const double se = std::sqrt(p0 * (1.0 - p0) / static_cast<double>(cfg.replicas));
            w.key("absorption_target").value(p0);
            w.key("absorption_estimate").value(phat);
            w.key("absorption_z").value((phat - p0) / se);
            worst_z = std::max(worst_z, std::fabs((phat - p0) / se));
        }
        worst_z = std::max(worst_z, std::fabs(z_mean));
        w.end_object();
    }
    w.end_array();

    // Exact sampler against the Euler-Maruyama oracle at horizon 1.
    const std::size_t paths = 10'000;
    std::vector<double> exact(paths), euler(paths);
    parallel_for(paths, cfg.workers, [&](std::size_t i) {
        Rng path_rng = stream_for(cfg.seed, cfg.experiment + "/em", 1, i);
        exact[i] = besq_transition(1.0, 1.0, 0.0, path_rng);
        euler[i] = euler_maruyama_besq(1.0, 1e-4, 1.0, 0.0, path_rng).back();
    });
    const double ks = ks_distance(exact, euler);
    w.key("euler_ks").value(ks);
    w.key("euler_ks_tolerance").value(0.02);
    w.key("max_abs_z").value(worst_z);
    w.key("pass").value(ks < 0.02 && worst_z < 4.0);
    w.end_object();

    ReplicaRecord record;
    record.n = 0;
    record.replica = 0;
    record.stream_id = stream_key(cfg.seed, cfg.experiment, 0, 0);
    record.values = {{"euler_ks", ks}, {"max_abs_z", worst_z}};
    result.records.push_back(record);
    std::vector<double> kss = {ks};
    result.table.push_back(make_row(cfg.experiment, 0, kss));
    result.summary_json = w.str();
    return result;
}

ExperimentResult experiment_williams_stats(const ExperimentConfig& cfg) {
    const double h = 1.0;
    const double count_cut = 0.1;
    const double trunc = 1e-3 * h;

    ExperimentResult result;
    result.records.resize(cfg.replicas);
    parallel_for(cfg.replicas, cfg.workers, [&](std::size_t r) {
        Rng rng = stream_for(cfg.seed, cfg.experiment, 1, r);
        const auto counting = sample_williams_skeleton(h, count_cut, rng, 0);
        double sum_h2 = 0.0;
        const auto truncated = sample_williams_skeleton(h, trunc, rng, 0);
        for (const auto& atom : truncated.atoms) sum_h2 += atom.height * atom.height;
        ReplicaRecord record;
        record.n = 1;
        record.replica = r;
        record.stream_id = stream_key(cfg.seed, cfg.experiment, 1, r);
        record.values = {
            {"count_above_cut", static_cast<double>(counting.atoms.size())},
            {"sum_h2_truncated", sum_h2},
        };
        result.records[r] = std::move(record);
    });

    auto counts = column(result.records, 1, "count_above_cut");
    auto sums = column(result.records, 1, "sum_h2_truncated");
    result.table.push_back(make_row(cfg.experiment, 1, counts));

    const double count_target = 0.5 * (h / count_cut - 1.0 - std::log(h / count_cut));
    const double sum_target = h * h / 4.0 - (trunc * h / 2.0 - trunc * trunc / 4.0);
    const SummaryStats count_stats = summarize(counts);
    const SummaryStats sum_stats = summarize(sums);
    const double z_count = (count_stats.mean - count_target) / count_stats.stderr_mean;
    const double z_sum = (sum_stats.mean - sum_target) / sum_stats.stderr_mean;

    JsonWriter w;
    w.begin_object();
    w.key("experiment").value(cfg.experiment);
    w.key("spines").value(static_cast<std::uint64_t>(cfg.replicas));
    w.key("count_target").value(count_target);
    w.key("count_mean").value(count_stats.mean);
    w.key("count_z").value(z_count);
    w.key("sum_h2_target").value(sum_target);
    w.key("sum_h2_mean").value(sum_stats.mean);
    w.key("sum_h2_z").value(z_sum);
    w.key("pass").value(std::fabs(z_count) < 4.0 && std::fabs(z_sum) < 4.0);
    w.end_object();
    result.summary_json = w.str();
    return result;
}

ExperimentResult experiment_component_poisson(const ExperimentConfig& cfg) {
    const double h = 2.0;
    const double eps = 0.5;
    const double band_low = 0.1;

    ExperimentResult result;
    result.records.resize(cfg.replicas);
    parallel_for(cfg.replicas, cfg.workers, [&](std::size_t r) {
        Rng rng = stream_for(cfg.seed, cfg.experiment, 2, r);
        const auto skeleton = sample_williams_skeleton(h, h, rng, 0);  // bare spine
        const auto atoms = sample_poisson_components(skeleton, eps, band_low, rng);
        double band = 0.0, total = 0.0;
        for (const auto& atom : atoms) {
            total += 1.0;
            if (atom.distance_to_tip >= eps) band += 1.0;
        }
        ReplicaRecord record;
        record.n = 2;
        record.replica = r;
        record.stream_id = stream_key(cfg.seed, cfg.experiment, 2, r);
        record.values = {{"band_count", band}, {"total_count", total}};
        result.records[r] = std::move(record);
    });

    auto band = column(result.records, 2, "band_count");
    auto total = column(result.records, 2, "total_count");
    result.table.push_back(make_row(cfg.experiment, 2, band));

    const double band_target = 0.5 * (h - eps) * (1.0 / band_low - 1.0 / eps);
    const double homogeneous_bound = 0.5 * h * (1.0 / band_low - 1.0 / eps);
    const SummaryStats band_stats = summarize(band);
    const SummaryStats total_stats = summarize(total);
    const double z_band = (band_stats.mean - band_target) / band_stats.stderr_mean;
    const double z_total_onesided =
        (total_stats.mean - homogeneous_bound) / total_stats.stderr_mean;

    JsonWriter w;
    w.begin_object();
    w.key("experiment").value(cfg.experiment);
    w.key("band_target").value(band_target);
    w.key("band_mean").value(band_stats.mean);
    w.key("band_z").value(z_band);
    w.key("homogeneous_bound").value(homogeneous_bound);
    w.key("total_mean").value(total_stats.mean);
    w.key("domination_z_onesided").value(z_total_onesided);
    w.key("pass").value(std::fabs(z_band) < 4.0 && z_total_onesided < 4.0);
    w.end_object();
    result.summary_json = w.str();
    return result;
}

ExperimentResult experiment_snake_integral(const ExperimentConfig& cfg) {
    std::vector<double> v_grid = cfg.v_grid;
    if (v_grid.empty()) {
        for (double v = 0.125; v <= 16.0; v *= 2.0) v_grid.push_back(v);
    }
    const std::size_t batch_size = 500;
    const std::size_t batches =
        (cfg.replicas + batch_size - 1) / batch_size;

    ExperimentResult result;
    result.records.resize(v_grid.size() * batches);
    parallel_for(result.records.size(), cfg.workers, [&](std::size_t idx) {
        const std::size_t vi = idx / batches;
        const std::size_t batch = idx % batches;
        const std::size_t lo = batch * batch_size;
        const std::size_t hi = std::min(cfg.replicas, lo + batch_size);
        Rng rng = stream_for(cfg.seed, cfg.experiment, vi, batch);
        const double fhat = hi > lo
                                ? estimate_zero_hit_probability(v_grid[vi], cfg.grid,
                                                                hi - lo, rng)
                                : 0.0;
        ReplicaRecord record;
        record.n = vi;
        record.replica = batch;
        record.stream_id = stream_key(cfg.seed, cfg.experiment, vi, batch);
        record.values = {
            {"v", v_grid[vi]},
            {"replicas", static_cast<double>(hi - lo)},
            {"hits", fhat * static_cast<double>(hi - lo)},
        };
        result.records[idx] = std::move(record);
    });

    std::vector<double> fhat(v_grid.size(), 0.0);
    for (std::size_t vi = 0; vi < v_grid.size(); ++vi) {
        double hits = 0.0, count = 0.0;
        for (const auto& record : result.records) {
            if (record.n != vi) continue;
            count += record.values[1].second;
            hits += record.values[2].second;
        }
        fhat[vi] = hits / count;
        std::vector<double> one = {fhat[vi]};
        result.table.push_back(make_row(cfg.experiment, vi, one));
    }

    // Trapezoid over [0, v_max] anchored at F(0) = 1, plus an exponential
    // tail fitted to the last two grid points.
    std::vector<double> grid = {0.0};
    std::vector<double> values = {1.0};
    for (std::size_t i = 0; i < v_grid.size(); ++i) {
        grid.push_back(v_grid[i]);
        values.push_back(fhat[i]);
    }
    double integral = trapezoid_integral(grid, values);
    const std::size_t k = v_grid.size();
    double tail = 0.0;
    if (k >= 2 && fhat[k - 1] > 0.0 && fhat[k - 2] > fhat[k - 1]) {
        const double b = std::log(fhat[k - 2] / fhat[k - 1]) /
                         (v_grid[k - 1] - v_grid[k - 2]);
        tail = fhat[k - 1] / b;
    }
    integral += tail;
    const double target = 2.0 * std::sqrt(2.0 * M_PI);

    JsonWriter w;
    w.begin_object();
    w.key("experiment").value(cfg.experiment);
    w.key("grid_m").value(static_cast<std::uint64_t>(cfg.grid));
    w.key("v_grid").begin_array();
    for (double v : v_grid) w.value(v);
    w.end_array();
    w.key("f_hat").begin_array();
    for (double f : fhat) w.value(f);
    w.end_array();
    w.key("tail").value(tail);
    w.key("integral").value(integral);
    w.key("target").value(target);
    w.key("relative_error").value(std::fabs(integral - target) / target);
    w.key("pass").value(std::fabs(integral - target) / target < 0.10);
    w.end_object();
    result.summary_json = w.str();
    return result;
}

ExperimentResult experiment_covering_bound(const ExperimentConfig& cfg) {
    const OffspringLaw law = OffspringLaw::from_name(cfg.law);
    std::vector<std::uint64_t> sizes = cfg.sizes;
    if (sizes.empty()) {
        for (std::uint64_t n = 128; n <= 4096; n *= 2) sizes.push_back(n);
    }

    ExperimentResult result;
    const std::size_t trees_per_n = cfg.configs;
    result.records.resize(sizes.size() * trees_per_n);
    parallel_for(result.records.size(), cfg.workers, [&](std::size_t idx) {
        const std::uint64_t n = sizes[idx / trees_per_n];
        const std::size_t t = idx % trees_per_n;
        Rng rng = stream_for(cfg.seed, cfg.experiment, n, t);
        const DiscreteTree tree = sample_conditioned_gw(law, n, rng);
        const double bound = bdnp_bound(tree);
        WalkEngine engine(tree);
        RunningMoments cover;
        for (std::size_t r = 0; r < cfg.replicas; ++r) {
            cover.add(engine.run_cover(cfg.mode, tree.root, rng).tau_cov);
        }
        ReplicaRecord record;
        record.n = n;
        record.replica = t;
        record.stream_id = stream_key(cfg.seed, cfg.experiment, n, t);
        record.values = {
            {"t_cov_hat", cover.mean},
            {"bdnp_bound", bound},
            {"ratio", cover.mean / bound},
        };
        result.records[idx] = std::move(record);
    });

    JsonWriter w;
    w.begin_object();
    w.key("experiment").value(cfg.experiment);
    w.key("per_n").begin_array();
    double ratio_min = 1e300, ratio_max = 0.0;
    for (std::uint64_t n : sizes) {
        auto ratios = column(result.records, n, "ratio");
        result.table.push_back(make_row(cfg.experiment, n, ratios));
        const SummaryStats stats = summarize(ratios);
        ratio_min = std::min(ratio_min, *std::min_element(ratios.begin(), ratios.end()));
        ratio_max = std::max(ratio_max, *std::max_element(ratios.begin(), ratios.end()));
        w.begin_object();
        w.key("n").value(n);
        w.key("ratio_mean").value(stats.mean);
        w.key("ratio_q95").value(stats.quantiles[5]);
        w.end_object();
    }
    w.end_array();
    w.key("ratio_min").value(ratio_min);
    w.key("ratio_max").value(ratio_max);
    w.end_object();
    result.summary_json = w.str();
    return result;
}

ExperimentResult experiment_concentration_tail(const ExperimentConfig& cfg) {
    const OffspringLaw law = OffspringLaw::from_name(cfg.law);
    const std::uint64_t n = cfg.sizes.empty() ? 2000 : cfg.sizes[0];
    Rng tree_rng = stream_for(cfg.seed, cfg.experiment + "/tree", n, 0);
    const DiscreteTree tree = sample_conditioned_gw(law, n, tree_rng);

    ExperimentResult result;
    result.records.resize(cfg.replicas);
    parallel_for(cfg.replicas, cfg.workers, [&](std::size_t r) {
        Rng rng = stream_for(cfg.seed, cfg.experiment, n, r);
        WalkEngine engine(tree);
        const double tau = engine.run_cover(cfg.mode, tree.root, rng).tau_cov;
        ReplicaRecord record;
        record.n = n;
        record.replica = r;
        record.stream_id = stream_key(cfg.seed, cfg.experiment, n, r);
        record.values = {{"tau_cov", tau}};
        result.records[r] = std::move(record);
    });

    auto taus = column(result.records, n, "tau_cov");
    result.table.push_back(make_row(cfg.experiment, n, taus));

    std::vector<double> lambda_grid;
    for (double l = 1.0; l <= 3.0 + 1e-9; l += 0.25) lambda_grid.push_back(l);
    std::vector<TailFitPoint> points;
    const auto [slope, intercept] = survival_tail_fit(taus, lambda_grid, &points);
    double last_residual = 0.0;
    if (!points.empty()) {
        const auto& last = points.back();
        last_residual = last.log_survival - (intercept + slope * last.lambda);
    }

    JsonWriter w;
    w.begin_object();
    w.key("experiment").value(cfg.experiment);
    w.key("n").value(n);
    w.key("walks").value(static_cast<std::uint64_t>(cfg.replicas));
    w.key("slope").value(slope);
    w.key("intercept").value(intercept);
    w.key("points").begin_array();
    for (const auto& point : points) {
        w.begin_object();
        w.key("lambda").value(point.lambda);
        w.key("log_survival").value(point.log_survival);
        w.end_object();
    }
    w.end_array();
    w.key("last_point_residual").value(last_residual);
    w.key("pass").value(slope < 0.0 && last_residual <= 0.3);
    w.end_object();
    result.summary_json = w.str();
    return result;
}

ExperimentResult experiment_small_oracle_crosscheck(const ExperimentConfig& cfg) {
    const OffspringLaw law = OffspringLaw::from_name(cfg.law);
    std::vector<DiscreteTree> trees = exhaustive_trees_up_to(8);
    const std::size_t exhaustive_count = trees.size();
    {
        Rng rng = stream_for(cfg.seed, cfg.experiment + "/random-trees", 12, 0);
        for (std::size_t i = 0; i < 20; ++i) {
            const std::uint64_t n = 9 + rng.below(4);  // 9..12
            trees.push_back(sample_conditioned_gw(law, n, rng));
        }
    }

    ExperimentResult result;
    result.records.resize(trees.size());
    parallel_for(trees.size(), cfg.workers, [&](std::size_t t) {
        const DiscreteTree& tree = trees[t];
        Rng rng = stream_for(cfg.seed, cfg.experiment, tree.n, t);
        const double exact = expected_cover_exact_small(tree, cfg.mode, tree.root);
        WalkEngine engine(tree);
        RunningMoments mc;
        for (std::size_t r = 0; r < cfg.replicas; ++r) {
            mc.add(engine.run_cover(cfg.mode, tree.root, rng).tau_cov);
        }
        const double se = std::sqrt(mc.variance() / static_cast<double>(mc.count));
        ReplicaRecord record;
        record.n = static_cast<std::uint64_t>(tree.n);
        record.replica = t;
        record.stream_id = stream_key(cfg.seed, cfg.experiment, tree.n, t);
        record.values = {
            {"exact", exact},
            {"mc_mean", mc.mean},
            {"z", se > 0.0 ? (mc.mean - exact) / se : 0.0},
        };
        result.records[t] = std::move(record);
    });

    double worst = 0.0;
    std::vector<double> zs;
    for (const auto& record : result.records) {
        zs.push_back(record.values[2].second);
        worst = std::max(worst, std::fabs(record.values[2].second));
    }
    result.table.push_back(make_row(cfg.experiment, 8, zs));
    JsonWriter w;
    w.begin_object();
    w.key("experiment").value(cfg.experiment);
    w.key("exhaustive_trees").value(static_cast<std::uint64_t>(exhaustive_count));
    w.key("random_trees").value(static_cast<std::uint64_t>(trees.size() - exhaustive_count));
    w.key("max_abs_z").value(worst);
    w.key("threshold").value(4.0);
    w.key("pass").value(worst < 4.0);
    w.end_object();
    result.summary_json = w.str();
    return result;
}

using ExperimentFn = ExperimentResult (*)(const ExperimentConfig&);

const std::map<std::string, ExperimentFn>& experiment_table() {
    static const std::map<std::string, ExperimentFn> table = {
        {"cover-scaling", experiment_cover_scaling},
        {"aldous-probe", experiment_aldous_probe},
        {"cover-return-moments", experiment_cover_return_moments},
        {"rayknight-mgf", experiment_rayknight_mgf},
        {"isomorphism", experiment_isomorphism},
        {"besq-validate", experiment_besq_validate},
        {"williams-stats", experiment_williams_stats},
        {"component-poisson", experiment_component_poisson},
        {"snake-integral", experiment_snake_integral},
        {"covering-bound", experiment_covering_bound},
        {"concentration-tail", experiment_concentration_tail},
        {"small-oracle-crosscheck", experiment_small_oracle_crosscheck},
    };
    return table;
}

}  // namespace

// ---------------------------------------------------------------------------
// Public surface
// ---------------------------------------------------------------------------

std::string format_double(double value) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", value);
    return buf;
}

const std::vector<std::string>& experiment_registry() {
    static const std::vector<std::string> names = [] {
        std::vector<std::string> out;
        for (const auto& [name, fn] : experiment_table()) out.push_back(name);
        return out;
    }();
    return names;
}

int resolve_workers(int requested) {
    if (requested > 0) return requested;
    if (const char* env = std::getenv("CRTCOVER_WORKERS")) {
        const int parsed = std::atoi(env);
        if (parsed > 0) return parsed;
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : static_cast<int>(hw);
}

void parallel_for(std::size_t count, int workers,
                  const std::function<void(std::size_t)>& body) {
    const int k = std::min<std::size_t>(resolve_workers(workers), count == 0 ? 1 : count);
    if (k <= 1) {
        for (std::size_t i = 0; i < count; ++i) body(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::atomic<bool> failed{false};
    std::mutex error_mutex;
    std::string error;
    std::vector<std::thread> pool;
    pool.reserve(k);
    for (int w = 0; w < k; ++w) {
        pool.emplace_back([&] {
            while (!failed.load(std::memory_order_relaxed)) {
                const std::size_t i = next.fetch_add(1);
                if (i >= count) break;
                try {
                    body(i);
                } catch (const std::exception& e) {
                    std::scoped_lock lock(error_mutex);
                    failed = true;
                    if (error.empty()) error = e.what();
                }
            }
        });
    }
    for (auto& thread : pool) thread.join();
    if (failed) throw std::runtime_error("parallel_for: " + error);
}

ScalingConstants scaling_constants(const OffspringLaw& law, std::uint64_t n) {
    ScalingConstants out;
    out.sigma = std::sqrt(law.variance());
    const double nd = static_cast<double>(n);
    out.a_n = std::sqrt(nd) / (2.0 * out.sigma);
    out.b_n_v = nd;
    out.b_n_c = 2.0 * nd;
    out.time_scaling = out.a_n * out.b_n_c;
    return out;
}

ExperimentConfig ExperimentConfig::from_json_text(const std::string& text) {
    const json j = json::parse(text);
    ExperimentConfig cfg;
    cfg.experiment = j.at("experiment").get<std::string>();
    if (j.contains("law")) cfg.law = j.at("law").get<std::string>();
    if (j.contains("sizes")) cfg.sizes = j.at("sizes").get<std::vector<std::uint64_t>>();
    if (j.contains("replicas")) cfg.replicas = j.at("replicas").get<std::size_t>();
    if (j.contains("seed")) cfg.seed = j.at("seed").get<std::uint64_t>();
    if (j.contains("mode")) {
        const auto& mode = j.at("mode");
        if (mode.contains("kind")) {
            const auto kind = mode.at("kind").get<std::string>();
            if (kind == "discrete") {
                cfg.mode.kind = WalkKind::DiscreteTime;
            } else if (kind == "constant-speed") {
                cfg.mode.kind = WalkKind::ConstantSpeed;
            } else {
                throw std::invalid_argument("config: unknown walk kind " + kind);
            }
        }
        if (mode.contains("measure")) {
            const auto measure = mode.at("measure").get<std::string>();
            if (measure == "counting") {
                cfg.mode.measure = SpeedMeasure::Counting;
            } else if (measure == "conductance") {
                cfg.mode.measure = SpeedMeasure::Conductance;
            } else {
                throw std::invalid_argument("config: unknown measure " + measure);
            }
        }
    }
    if (j.contains("grid")) cfg.grid = j.at("grid").get<std::size_t>();
    if (j.contains("v_grid")) cfg.v_grid = j.at("v_grid").get<std::vector<double>>();
    if (j.contains("out")) cfg.out = j.at("out").get<std::string>();
    if (j.contains("workers")) cfg.workers = j.at("workers").get<int>();
    if (j.contains("quenched")) cfg.quenched = j.at("quenched").get<bool>();
    if (j.contains("configs")) cfg.configs = j.at("configs").get<std::size_t>();
    cfg.validate();
    return cfg;
}

ExperimentConfig ExperimentConfig::from_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("config: cannot open " + path);
    std::stringstream buffer;
    buffer << in.rdbuf();
    return from_json_text(buffer.str());
}

std::string ExperimentConfig::to_json_text() const {
    JsonWriter w;
    w.begin_object();
    w.key("experiment").value(experiment);
    w.key("law").value(law);
    w.key("sizes").begin_array();
    for (std::uint64_t n : sizes) w.value(n);
    w.end_array();
    w.key("replicas").value(static_cast<std::uint64_t>(replicas));
    w.key("seed").value(seed);
    w.key("mode").begin_object();
    w.key("kind").value(std::string(mode.kind == WalkKind::DiscreteTime ? "discrete"
                                                                        : "constant-speed"));
    w.key("measure").value(std::string(mode.measure == SpeedMeasure::Counting
                                           ? "counting"
                                           : "conductance"));
    w.end_object();
    w.key("grid").value(static_cast<std::uint64_t>(grid));
    w.key("v_grid").begin_array();
    for (double v : v_grid) w.value(v);
    w.end_array();
    w.key("out").value(out);
    w.key("workers").value(static_cast<std::int64_t>(workers));
    w.key("quenched").value(quenched);
    w.key("configs").value(static_cast<std::uint64_t>(configs));
    w.end_object();
    return w.str();
}

void ExperimentConfig::validate() const {
    if (experiment_table().find(experiment) == experiment_table().end()) {
        throw std::invalid_argument("config: unknown experiment " + experiment);
    }
    if (replicas < 1) throw std::invalid_argument("config: replicas must be >= 1");
    OffspringLaw::from_name(law);  // throws on unknown laws
    const bool needs_sizes = experiment == "cover-scaling" ||
                             experiment == "aldous-probe" ||
                             experiment == "cover-return-moments";
    if (needs_sizes && sizes.empty()) {
        throw std::invalid_argument("config: " + experiment + " requires sizes");
    }
    for (double v : v_grid) {
        if (!(v > 0.0)) throw std::invalid_argument("config: v_grid entries must be positive");
    }
    if (grid < 2) throw std::invalid_argument("config: grid must be >= 2");
}

ExperimentResult run_experiment(const ExperimentConfig& config) {
    config.validate();
    return experiment_table().at(config.experiment)(config);
}

namespace {

void write_records(const std::string& path, const ExperimentConfig& cfg,
                   const std::vector<ReplicaRecord>& records) {
    std::ofstream out(path, std::ios::binary);
    for (const auto& record : records) {
        JsonWriter w;
        w.begin_object();
        w.key("experiment").value(cfg.experiment);
        w.key("n").value(record.n);
        w.key("replica").value(record.replica);
        w.key("stream").value(std::to_string(record.stream_id));
        w.key("values").begin_object();
        for (const auto& [key, value] : record.values) {
            w.key(key).value(value);
        }
        w.end_object();
        w.end_object();
        out << w.str() << '\n';
    }
}

void write_csv(const std::string& path, const std::vector<SummaryRow>& rows) {
    std::ofstream out(path, std::ios::binary);
    out << "experiment,n,count,mean,stderr,q05,q50,q95\n";
    for (const auto& row : rows) {
        out << row.experiment << ',' << row.n << ',' << row.count << ','
            << format_double(row.mean) << ',' << format_double(row.stderr_mean) << ','
            << format_double(row.q05) << ',' << format_double(row.q50) << ','
            << format_double(row.q95) << '\n';
    }
}

std::string manifest_json(const ExperimentConfig& cfg, const std::string& started,
                          const std::string& finished) {
    const OffspringLaw law = OffspringLaw::from_name(cfg.law);
    JsonWriter w;
    w.begin_object();
    w.key("tool").value(std::string(kToolVersion));
    w.key("config").begin_object();
    w.key("experiment").value(cfg.experiment);
    w.key("law").value(cfg.law);
    w.key("replicas").value(static_cast<std::uint64_t>(cfg.replicas));
    w.key("quenched").value(cfg.quenched);
    w.key("grid").value(static_cast<std::uint64_t>(cfg.grid));
    w.end_object();
    w.key("master_seed").value(cfg.seed);
    w.key("started").value(started);
    w.key("finished").value(finished);
    w.key("derived").begin_object();
    w.key("sigma").value(std::sqrt(law.variance()));
    w.key("per_n").begin_array();
    for (std::uint64_t n : cfg.sizes) {
        const ScalingConstants s = scaling_constants(law, n);
        // a_n b_n^C must equal n^{3/2}/sigma.
        const double reference = std::pow(static_cast<double>(n), 1.5) / s.sigma;
        if (std::fabs(s.time_scaling - reference) > 1e-9 * reference) {
            throw std::logic_error("manifest: scaling factor mismatch");
        }
        w.begin_object();
        w.key("n").value(n);
        w.key("a_n").value(s.a_n);
        w.key("b_n_v").value(s.b_n_v);
        w.key("b_n_c").value(s.b_n_c);
        w.key("time_scaling").value(s.time_scaling);
        w.end_object();
    }
    w.end_array();
    w.end_object();
    w.end_object();
    return w.str();
}

}  // namespace

int run_and_persist(const ExperimentConfig& config) {
    const std::string started = iso_timestamp();
    try {
        config.validate();
        std::filesystem::create_directories(config.out);
        const ExperimentResult result = run_experiment(config);
        const std::string finished = iso_timestamp();

        write_records(config.out + "/records.jsonl", config, result.records);
        write_csv(config.out + "/summary.csv", result.table);
        {
            std::ofstream out(config.out + "/summary.json", std::ios::binary);
            out << result.summary_json << '\n';
        }
        {
            std::ofstream out(config.out + "/manifest.json", std::ios::binary);
            out << manifest_json(config, started, finished) << '\n';
        }
        return 0;
    } catch (const std::exception& e) {
        // Machine-readable error report on stderr and in the out directory.
        JsonWriter w;
        w.begin_object();
        w.key("error").value(std::string(e.what()));
        w.key("experiment").value(config.experiment);
        w.end_object();
        std::cerr << w.str() << std::endl;
        std::error_code ec;
        std::filesystem::create_directories(config.out, ec);
        if (!ec) {
            std::ofstream out(config.out + "/error.json", std::ios::binary);
            out << w.str() << '\n';
        }
        return 1;
    }
}

}  // namespace crtcover
