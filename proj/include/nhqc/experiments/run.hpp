#pragma once

#include <filesystem>
#include <vector>

#include <json.hpp>

#include "nhqc/experiments/config.hpp"

namespace nhqc::experiments {

struct RunResult {
  std::vector<std::filesystem::path> files;  // in write order
  nlohmann::ordered_json summary;            // also stored under "summary" in meta.json
};

/// Worker cap from NHQC_THREADS; unset or 0 means hardware concurrency.
unsigned worker_count();

/// Sample times for continuous evolution: linear grid on [0, t_max], or 0
/// followed by log-spaced points on [t_min_log, t_max].
std::vector<double> time_grid(const ExperimentConfig& c);

/// Runs one experiment and writes its outputs below c.dir. Figure
/// experiments ignore the model section and use their canonical parameters;
/// `variant` picks the panel (or "all").
/// Throws ConfigError for invalid input and NumericalError/DomainError from the library.
RunResult run(const ExperimentConfig& c);

/// Figure panels fig1..fig4 into base.dir/fig1 .. base.dir/fig4, run concurrently
/// up to worker_count() jobs.
RunResult reproduce_all(const ExperimentConfig& base);

/// The canonical configuration of one figure panel ("a".."d").
ExperimentConfig figure_config(Experiment fig, const std::string& panel, const ExperimentConfig& base);

}  // namespace nhqc::experiments
