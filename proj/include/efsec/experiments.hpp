#pragma once
// Named experiment sweeps: each one reproduces a figure-style dataset as an
// RFC-4180 CSV (columns axis,value,stderr,method,seed) plus a JSON run
// summary carrying the fully resolved configuration, an input content hash,
// wall time, per-point errors, and any trend-assertion violations.

#include <string>
#include <vector>

#include "efsec/config_io.hpp"

namespace efsec::experiments {

struct ExperimentSpec {
    std::string name;                  // one of experiment_names()
    config_io::ConfigDocument base;    // resolved configuration
    std::vector<std::string> methods;  // nonempty subset of {analytic, monte-carlo}
    std::string output_dir;            // empty -> $EFSEC_OUTPUT_DIR, else "out"
    long samples = 0;                  // 0 -> auto (1e6 conditional laws, 1e5 sweeps)
    int workers = 1;                   // Monte-Carlo worker streams
};

struct RunResult {
    // 0 success, 1 invalid spec/config, 2 numerical failure (per-point errors
    // recorded in the summary), 3 trend/agreement assertion failure.
    int exit_code = 0;
    std::vector<std::string> files;  // everything written, CSV first
    std::string message;             // human-readable outcome
};

const std::vector<std::string>& experiment_names();

RunResult run(const ExperimentSpec& spec);

}  // namespace efsec::experiments
