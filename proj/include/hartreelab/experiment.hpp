#pragma once

#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "hartreelab/config.hpp"

namespace hartreelab {

struct ExperimentResult {
  int exit_code = 0;  ///< 0 success, 2 infeasible or outside the theory, 1 internal error
  nlohmann::json verdicts = nlohmann::json::object();
  std::vector<std::filesystem::path> files;  ///< relative to the output directory, manifest excluded
  std::string error;
};

/// Kernel cache directory from HARTREELAB_CACHE, if set and nonempty.
std::optional<std::filesystem::path> cache_dir_from_env();

/// Runs the pipeline named by config.experiment inside config.output and
/// writes manifest.json there. Never throws for pipeline failures; they are
/// reported through the exit code and the manifest.
ExperimentResult run_experiment(const ExperimentConfig& config, std::ostream* log = nullptr);

}  // namespace hartreelab
