// Experiment runner: parses a key/value config, executes one named sweep, and
// writes plot-ready CSV plus a JSON run summary.
//
// Exit codes: 0 success, 1 invalid usage/config, 2 numerical failure,
// 3 trend/agreement assertion failure.

#include <cstdio>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "efsec/config_io.hpp"
#include "efsec/experiments.hpp"

int main(int argc, char** argv) {
    CLI::App app{
        "Secrecy-metric experiment runner: analytic and Monte-Carlo sweeps "
        "over power, power split, routing gain, leakage correlation, and "
        "antenna count"};

    std::string config_path;
    std::string experiment;
    std::string output_dir;
    std::vector<std::string> methods = {"analytic", "monte-carlo"};
    long samples = 0;
    int workers = 1;
    std::uint64_t seed = 0;
    bool seed_given = false;

    app.add_option("--config", config_path, "Config file (key = value lines; empty = defaults)");
    app.add_option("--experiment", experiment, "Experiment name (see --list)")->required();
    app.add_option("--seed", seed, "Override the config seed")
        ->each([&](const std::string&) { seed_given = true; });
    app.add_option("--samples", samples,
                   "Sample count (0 = auto: 1e6 conditional laws, 1e5 sweeps)");
    app.add_option("--methods", methods, "Subset of: analytic monte-carlo")
        ->delimiter(',');
    app.add_option("--workers", workers, "Monte-Carlo worker streams");
    app.add_option("--output-dir", output_dir,
                   "Output directory (default: $EFSEC_OUTPUT_DIR or ./out)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 1;
    }

    efsec::experiments::ExperimentSpec spec;
    spec.name = experiment;
    spec.methods = methods;
    spec.output_dir = output_dir;
    spec.samples = samples;
    spec.workers = workers;

    try {
        if (config_path.empty()) {
            spec.base = efsec::config_io::parse_config_text("");
        } else {
            spec.base = efsec::config_io::parse_config(config_path);
        }
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    if (seed_given) spec.base.cfg.seed = seed;

    const auto result = efsec::experiments::run(spec);
    if (result.exit_code == 1) {
        std::fprintf(stderr, "error: %s\n", result.message.c_str());
        std::fprintf(stderr, "experiments:\n");
        for (const auto& name : efsec::experiments::experiment_names())
            std::fprintf(stderr, "  %s\n", name.c_str());
        return 1;
    }
    for (const auto& file : result.files) std::printf("wrote %s\n", file.c_str());
    if (!result.message.empty())
        std::fprintf(result.exit_code == 0 ? stdout : stderr, "%s\n", result.message.c_str());
    return result.exit_code;
}
