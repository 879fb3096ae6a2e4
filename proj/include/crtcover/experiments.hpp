#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "crtcover/offspring.hpp"
#include "crtcover/walk.hpp"

namespace crtcover {

struct ExperimentConfig {
    std::string experiment;
    std::string law = "poisson1";
    std::vector<std::uint64_t> sizes;
    std::size_t replicas = 1000;
    std::uint64_t seed = 1;
    WalkMode mode{WalkKind::DiscreteTime, SpeedMeasure::Conductance};
    std::size_t grid = 1u << 12;   // excursion grid m
    std::vector<double> v_grid;    // snake-integral start values
    std::string out = "out";
    int workers = 0;               // 0: CRTCOVER_WORKERS or hardware
    bool quenched = false;         // fixed tree per n instead of annealed
    std::size_t configs = 10;      // random setups for oracle-style runs

    static ExperimentConfig from_json_text(const std::string& text);
    static ExperimentConfig from_file(const std::string& path);
    std::string to_json_text() const;
    // Throws std::invalid_argument on schema violations or unknown names.
    void validate() const;
};

// One output row per replica: fixed identity columns plus a per-experiment
// payload of named doubles (serialized in payload order).
struct ReplicaRecord {
    std::uint64_t n = 0;
    std::uint64_t replica = 0;
    std::uint64_t stream_id = 0;
    std::vector<std::pair<std::string, double>> values;
};

struct SummaryRow {
    std::string experiment;
    std::uint64_t n = 0;
    std::size_t count = 0;
    double mean = 0.0;
    double stderr_mean = 0.0;
    double q05 = 0.0;
    double q50 = 0.0;
    double q95 = 0.0;
};

struct ExperimentResult {
    std::vector<ReplicaRecord> records;
    std::vector<SummaryRow> table;
    std::string summary_json;  // experiment-specific findings
};

const std::vector<std::string>& experiment_registry();

ExperimentResult run_experiment(const ExperimentConfig& config);

// Executes and persists records.jsonl, summary.csv, summary.json and
// manifest.json under config.out. Returns the process exit code.
int run_and_persist(const ExperimentConfig& config);

// Deterministic parallel map: body(i) for i in [0, count); results must be
// written into per-index slots by the caller.
void parallel_for(std::size_t count, int workers,
                  const std::function<void(std::size_t)>& body);

int resolve_workers(int requested);

// Scaling constants of the conditioned Galton-Watson setting: a_n =
// sqrt(n)/(2 sigma), b_n^V = n, b_n^C = 2n, so a_n b_n^C = n^{3/2}/sigma.
struct ScalingConstants {
    double sigma = 1.0;
    double a_n = 0.0;
    double b_n_v = 0.0;
    double b_n_c = 0.0;
    double time_scaling = 0.0;  // a_n * b_n^C
};
ScalingConstants scaling_constants(const OffspringLaw& law, std::uint64_t n);

// %.17g with stable formatting for all persisted floats.
std::string format_double(double value);

}  // namespace crtcover
