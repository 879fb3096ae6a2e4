#include <CLI11.hpp>

#include <cstdint>
#include <iostream>
#include <string>
#include <vector>

#include "crtcover/experiments.hpp"

namespace {

// Desk-scale defaults per experiment; a config file overrides everything.
crtcover::ExperimentConfig default_config(const std::string& experiment) {
    using crtcover::ExperimentConfig;
    ExperimentConfig cfg;
    cfg.experiment = experiment;
    if (experiment == "cover-scaling" || experiment == "cover-return-moments") {
        cfg.sizes = {500, 1000, 2000, 4000};
        cfg.replicas = 10'000;
    } else if (experiment == "aldous-probe") {
        cfg.sizes = {4000};
        cfg.replicas = 10'000;
    } else if (experiment == "rayknight-mgf") {
        cfg.sizes = {8};
        cfg.replicas = 1;
    } else if (experiment == "isomorphism") {
        cfg.sizes = {30};
        cfg.replicas = 100'000;
    } else if (experiment == "besq-validate" || experiment == "williams-stats" ||
               experiment == "component-poisson") {
        cfg.replicas = 100'000;
    } else if (experiment == "snake-integral") {
        cfg.grid = 1u << 14;
        cfg.replicas = 20'000;
    } else if (experiment == "covering-bound") {
        cfg.replicas = 20;   // walks per tree
        cfg.configs = 10;    // trees per size
    } else if (experiment == "concentration-tail") {
        cfg.sizes = {2000};
        cfg.replicas = 100'000;
    } else if (experiment == "small-oracle-crosscheck") {
        cfg.replicas = 100'000;
    }
    return cfg;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Cover-time simulation lab for random walks on trees"};
    app.require_subcommand(1);

    auto* list = app.add_subcommand("list", "List available experiments");

    struct Options {
        std::string config_path;
        std::string out;
        std::uint64_t seed = 0;
        bool seed_set = false;
        int workers = 0;
        std::uint64_t replicas = 0;
        std::vector<std::uint64_t> sizes;
        std::string law;
        bool quenched = false;
        bool quenched_set = false;
    };

    std::vector<std::pair<CLI::App*, std::string>> subcommands;
    Options opts;
    for (const auto& name : crtcover::experiment_registry()) {
        auto* sub = app.add_subcommand(name, "Run the " + name + " experiment");
        sub->add_option("--config", opts.config_path, "JSON config file");
        sub->add_option("--out", opts.out, "Output directory");
        sub->add_option("--seed", opts.seed, "Master seed override")
            ->each([&](const std::string&) { opts.seed_set = true; });
        sub->add_option("--workers", opts.workers, "Worker thread count");
        sub->add_option("--replicas", opts.replicas, "Replica count override");
        sub->add_option("--sizes", opts.sizes, "Tree sizes override");
        sub->add_option("--law", opts.law, "Offspring law (poisson1, geometric-half, binary-half)");
        sub->add_flag("--quenched", opts.quenched, "Fix one tree per size")
            ->each([&](const std::string&) { opts.quenched_set = true; });
        subcommands.emplace_back(sub, name);
    }

    CLI11_PARSE(app, argc, argv);

    if (list->parsed()) {
        for (const auto& name : crtcover::experiment_registry()) {
            std::cout << name << '\n';
        }
        return 0;
    }

    for (const auto& [sub, name] : subcommands) {
        if (!sub->parsed()) continue;
        crtcover::ExperimentConfig cfg;
        try {
            cfg = opts.config_path.empty()
                      ? default_config(name)
                      : crtcover::ExperimentConfig::from_file(opts.config_path);
            cfg.experiment = name;
            if (!opts.out.empty()) cfg.out = opts.out;
            if (opts.seed_set) cfg.seed = opts.seed;
            if (opts.workers > 0) cfg.workers = opts.workers;
            if (opts.replicas > 0) cfg.replicas = opts.replicas;
            if (!opts.sizes.empty()) cfg.sizes = opts.sizes;
            if (!opts.law.empty()) cfg.law = opts.law;
            if (opts.quenched_set) cfg.quenched = opts.quenched;
            cfg.validate();
        } catch (const std::exception& e) {
            std::cerr << "{\"error\":\"" << e.what() << "\"}" << std::endl;
            return 2;
        }
        return crtcover::run_and_persist(cfg);
    }
    return 2;
}
