#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "spherelab/fit.hpp"

namespace spherelab {

// One CLI/API experiment run. Parameters are validated against the chosen
// experiment's schema before any computation; unknown keys are rejected.
struct ExperimentConfig {
    std::string experiment;
    std::map<std::string, std::string> params;
    std::string output_dir = ".";
    std::uint64_t seed = 1;
    std::uint64_t budget_cells = std::uint64_t(1) << 26;
};

struct ExperimentResult {
    std::map<std::string, double> scalars;       // named outcomes for assertions
    std::map<std::string, FitResult> fits;       // named log-log fits
    std::vector<std::string> files;              // emitted files (relative names)
    std::vector<std::string> report;             // printable summary lines
};

// Names accepted as ExperimentConfig::experiment.
const std::vector<std::string>& experiment_names();

// Runs the experiment, writes results.csv (+ fit.csv, plot.svg when
// applicable) and manifest.txt with content hashes into output_dir.
// Identical config and seed reproduce results.csv bit-identically.
ExperimentResult run_experiment(const ExperimentConfig& cfg);

} // namespace spherelab
