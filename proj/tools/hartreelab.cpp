#include <CLI11.hpp>

#include <iostream>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "hartreelab/config.hpp"
#include "hartreelab/errors.hpp"
#include "hartreelab/experiment.hpp"

namespace {

struct Shortcut {
  const char* flag;
  const char* key;
  const char* help;
};

const std::vector<Shortcut> kParamFlags = {
    {"--n", "params.n", "dimension"},
    {"--lambda", "params.lambda", "inverse-square coupling"},
    {"--alpha", "params.alpha", "Riesz order"},
    {"--tau", "params.tau", "weight exponent"},
    {"--eps", "params.eps", "+1 defocusing, -1 focusing"},
};

const std::map<std::string, std::vector<Shortcut>> kShortcuts = {
    {"check-params", {}},
    {"ground-state",
     {{"--tol", "solver.tol_J", "relative J tolerance"}, {"--multistart", "solver.multistart", "number of starts"}}},
    {"evolve",
     {{"--init", "evolve.init", "gaussian | groundstate-scaled:<c> | file"},
      {"--file", "evolve.file", "profile CSV (r, re, im) for --init file"},
      {"--T", "solver.T", "final time"},
      {"--dt", "solver.dt", "time step"},
      {"--cadence", "solver.cadence", "steps between samples"}}},
    {"dichotomy",
     {{"--c", "dichotomy.c", "comma-separated scales"},
      {"--T", "dichotomy.T", "final time"},
      {"--dt", "solver.dt", "time step"},
      {"--cadence", "solver.cadence", "steps between samples"}}},
    {"virial-check", {{"--traj", "virial.traj", "directory of an evolve run"}, {"--R", "virial.R", "radii r1,r2,..."}}},
    {"gn-verify", {{"--samples", "gn.samples", "random fields to test"}}},
};

std::vector<std::string> split(const std::string& s) {
  std::vector<std::string> out;
  std::size_t start = 0;
  for (;;) {
    const auto comma = s.find(',', start);
    out.push_back(s.substr(start, comma - start));
    if (comma == std::string::npos) return out;
    start = comma + 1;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Radial Hartree equations with inverse-square potential"};
  app.require_subcommand(1);

  std::string config_path;
  std::vector<std::string> sets;
  std::string grid_arg;
  std::map<std::string, std::string> values;

  for (const auto& [name, extra] : kShortcuts) {
    auto* sub = app.add_subcommand(name);
    auto* cfg = sub->add_option("--config,--params-file", config_path, "key = value configuration file");
    if (name != "check-params") cfg->check(CLI::ExistingFile);
    sub->add_option("--set", sets, "override, key=value (repeatable)");
    sub->add_option("--output", values["output"], "output directory");
    sub->add_option("--seed", values["seed"], "seed for random corpora");
    sub->add_option("--grid", grid_arg, "J,R_max,mapping");
    for (const auto& s : kParamFlags) sub->add_option(s.flag, values[s.key], s.help);
    for (const auto& s : extra) sub->add_option(s.flag, values[s.key], s.help);
  }

  CLI11_PARSE(app, argc, argv);
  const std::string experiment = app.get_subcommands().front()->get_name();

  std::vector<std::string> overrides = sets;
  if (!grid_arg.empty()) {
    const auto parts = split(grid_arg);
    const char* keys[] = {"grid.J", "grid.R_max", "grid.mapping"};
    if (parts.size() > 3) {
      std::cerr << "--grid takes J,R_max,mapping\n";
      return 1;
    }
    for (std::size_t k = 0; k < parts.size(); ++k) overrides.push_back(std::string(keys[k]) + "=" + parts[k]);
  }
  for (const auto& [key, value] : values)
    if (!value.empty()) overrides.push_back(key + "=" + value);
  overrides.push_back("experiment=" + experiment);

  hartreelab::ExperimentConfig config;
  try {
    config = config_path.empty() ? hartreelab::parse_config("", overrides)
                                 : hartreelab::load_config(config_path, overrides);
  } catch (const hartreelab::ValidationError& e) {
    std::cerr << e.what() << '\n';
    return 1;
  } catch (const hartreelab::Error& e) {
    std::cerr << "config: " << e.what() << '\n';
    return 1;
  }

  const auto result = hartreelab::run_experiment(config, &std::cerr);
  std::cout << result.verdicts.dump(2) << '\n';
  return result.exit_code;
}
