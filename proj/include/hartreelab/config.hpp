#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "hartreelab/evolve.hpp"
#include "hartreelab/grid.hpp"
#include "hartreelab/groundstate.hpp"
#include "hartreelab/params.hpp"

namespace hartreelab {

/// Flat `section.key = value` configuration. Every key has a default; see
/// config_keys() for the full list.
struct ExperimentConfig {
  std::string experiment;  ///< check-params | ground-state | evolve | dichotomy | virial-check | gn-verify
  std::filesystem::path output = "out";
  std::uint64_t seed = 1;

  int n = 3;
  double lambda = 0.0;
  double alpha = 2.0;
  double tau = 0.5;
  int epsilon = -1;

  int J = 512;
  double R_max = 1000.0;
  Mapping mapping = Mapping::Log;
  OuterBoundary boundary = OuterBoundary::HarmonicTail;
  double r_min = 1e-7;  ///< innermost node as a fraction of R_max (log grids)

  GroundStateOptions ground;
  RunOptions run;

  std::string init = "gaussian";              ///< gaussian | groundstate-scaled:c | file
  double amplitude = 1.0;                     ///< gaussian initial data
  double width = 1.0;
  std::filesystem::path init_file;
  bool store_fields = true;  ///< write fields.csv (needed by virial-check)

  std::vector<double> dichotomy_c = {0.8, 0.9, 1.1, 1.2};
  double dichotomy_T = 2.0;

  std::vector<double> virial_R = {4.0, 8.0, 16.0};
  std::filesystem::path virial_traj;

  int gn_samples = 100;

  /// Effective key/value pairs after defaults and overrides, in key order.
  std::map<std::string, std::string> echo;

  ModelParams params() const;
  GridPtr grid() const;
};

/// Known keys with their default values.
const std::vector<std::pair<std::string, std::string>>& config_keys();

/// Parses `text`. Overrides (`key=value`) are applied
/// after the file, in order. Throws ParseError for malformed lines and
/// ValidationError listing every invalid or unknown key.
ExperimentConfig parse_config(const std::string& text, const std::vector<std::string>& overrides = {});

ExperimentConfig load_config(const std::filesystem::path& path, const std::vector<std::string>& overrides = {});

/// Comma-separated list of reals.
std::vector<double> parse_real_list(const std::string& s);

}  // namespace hartreelab
