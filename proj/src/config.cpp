#include "hartreelab/config.hpp"

#include <algorithm>
#include <cerrno>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "hartreelab/errors.hpp"

namespace hartreelab {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

bool to_real(const std::string& s, double& out) {
  if (s.empty()) return false;
  errno = 0;
  char* end = nullptr;
  out = std::strtod(s.c_str(), &end);
  return errno == 0 && end == s.c_str() + s.size() && std::isfinite(out);
}

bool to_int(const std::string& s, long long& out) {
  if (s.empty()) return false;
  errno = 0;
  char* end = nullptr;
  out = std::strtoll(s.c_str(), &end, 10);
  return errno == 0 && end == s.c_str() + s.size();
}

const std::vector<std::string> kExperiments = {"check-params", "ground-state", "evolve",
                                               "dichotomy",    "virial-check", "gn-verify"};

class Reader {
 public:
  explicit Reader(const std::map<std::string, std::string>& kv) : kv_(kv) {}

  double real(const std::string& key) {
    double v = 0.0;
    if (!to_real(kv_.at(key), v)) problem(key, "expected a real number, got '" + kv_.at(key) + "'");
    return v;
  }
  long long integer(const std::string& key) {
    long long v = 0;
    if (!to_int(kv_.at(key), v)) problem(key, "expected an integer, got '" + kv_.at(key) + "'");
    return v;
  }
  bool boolean(const std::string& key) {
    const std::string& s = kv_.at(key);
    if (s == "true" || s == "1" || s == "yes") return true;
    if (s == "false" || s == "0" || s == "no") return false;
    problem(key, "expected true or false, got '" + s + "'");
    return false;
  }
  std::vector<double> list(const std::string& key) {
    try {
      return parse_real_list(kv_.at(key));
    } catch (const DomainError& e) {
      problem(key, e.what());
      return {};
    }
  }
  const std::string& text(const std::string& key) const { return kv_.at(key); }

  void require(bool ok, const std::string& key, const std::string& what) {
    if (!ok) problem(key, what);
  }
  void problem(const std::string& key, const std::string& what) { problems.push_back(key + ": " + what); }

  std::vector<std::string> problems;

 private:
  const std::map<std::string, std::string>& kv_;
};

void assign(std::map<std::string, std::string>& kv, const std::string& line, int lineno,
            std::vector<std::string>& unknown) {
  const auto eq = line.find('=');
  if (eq == std::string::npos) throw ParseError(lineno, "expected 'key = value', got '" + line + "'");
  const std::string key = trim(line.substr(0, eq));
  const std::string value = trim(line.substr(eq + 1));
  if (key.empty()) throw ParseError(lineno, "empty key");
  auto it = kv.find(key);
  if (it == kv.end()) {
    unknown.push_back(key + ": unknown key" + (lineno > 0 ? " (line " + std::to_string(lineno) + ")" : ""));
    return;
  }
  it->second = value;
}

}  // namespace

const std::vector<std::pair<std::string, std::string>>& config_keys() {
  static const std::vector<std::pair<std::string, std::string>> keys = {
      {"experiment", ""},
      {"output", "out"},
      {"seed", "1"},
      {"params.n", "3"},
      {"params.lambda", "0"},
      {"params.alpha", "2"},
      {"params.tau", "0.5"},
      {"params.eps", "-1"},
      {"grid.J", "512"},
      {"grid.R_max", "1000"},
      {"grid.mapping", "log"},
      {"grid.boundary", "harmonic-tail"},
      {"grid.r_min", "1e-7"},
      {"solver.tol_J", "1e-10"},
      {"solver.tol_el", "1e-3"},
      {"solver.max_iters", "5000"},
      {"solver.multistart", "1"},
      {"solver.T", "1"},
      {"solver.dt", "1e-3"},
      {"solver.cadence", "10"},
      {"solver.adaptive", "true"},
      {"solver.energy_jump", "1e-5"},
      {"solver.dt_min", "1e-9"},
      {"evolve.init", "gaussian"},
      {"evolve.amplitude", "1"},
      {"evolve.width", "1"},
      {"evolve.file", ""},
      {"evolve.fields", "true"},
      {"dichotomy.c", "0.8,0.9,1.1,1.2"},
      {"dichotomy.T", "2"},
      {"virial.R", "4,8,16"},
      {"virial.traj", ""},
      {"gn.samples", "100"},
  };
  return keys;
}

std::vector<double> parse_real_list(const std::string& s) {
  std::vector<double> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    double v = 0.0;
    if (!to_real(trim(item), v)) throw DomainError("expected a comma-separated list of reals, got '" + s + "'");
    out.push_back(v);
  }
  if (out.empty()) throw DomainError("empty list");
  return out;
}

ExperimentConfig parse_config(const std::string& text, const std::vector<std::string>& overrides) {
  std::map<std::string, std::string> kv(config_keys().begin(), config_keys().end());
  std::vector<std::string> unknown;

  std::istringstream in(text);
  std::string raw;
  int lineno = 0;
  while (std::getline(in, raw)) {
    ++lineno;
    const auto hash = raw.find('#');
    const std::string line = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
    if (line.empty()) continue;
    assign(kv, line, lineno, unknown);
  }
  for (const auto& o : overrides) assign(kv, trim(o), 0, unknown);

  Reader rd(kv);
  rd.problems = unknown;
  ExperimentConfig c;

  c.experiment = rd.text("experiment");
  rd.require(std::find(kExperiments.begin(), kExperiments.end(), c.experiment) != kExperiments.end(), "experiment",
             "must be one of check-params, ground-state, evolve, dichotomy, virial-check, gn-verify");
  c.output = rd.text("output");
  rd.require(!c.output.empty(), "output", "must not be empty");
  const long long seed = rd.integer("seed");
  rd.require(seed >= 0, "seed", "must be nonnegative");
  c.seed = static_cast<std::uint64_t>(std::max(0LL, seed));

  c.n = static_cast<int>(rd.integer("params.n"));
  c.lambda = rd.real("params.lambda");
  c.alpha = rd.real("params.alpha");
  c.tau = rd.real("params.tau");
  c.epsilon = static_cast<int>(rd.integer("params.eps"));
  try {
    derive(c.n, c.lambda, c.alpha, c.tau, c.epsilon);
  } catch (const DomainError& e) {
    rd.problem("params", e.what());
  }

  c.J = static_cast<int>(rd.integer("grid.J"));
  rd.require(c.J >= 16, "grid.J", "must be at least 16");
  c.R_max = rd.real("grid.R_max");
  rd.require(c.R_max > 0.0, "grid.R_max", "must be positive");
  const std::string& mapping = rd.text("grid.mapping");
  if (mapping == "uniform") c.mapping = Mapping::Uniform;
  else if (mapping == "log") c.mapping = Mapping::Log;
  else rd.problem("grid.mapping", "must be uniform or log");
  const std::string& boundary = rd.text("grid.boundary");
  if (boundary == "dirichlet") c.boundary = OuterBoundary::Dirichlet;
  else if (boundary == "harmonic-tail") c.boundary = OuterBoundary::HarmonicTail;
  else rd.problem("grid.boundary", "must be dirichlet or harmonic-tail");
  c.r_min = rd.real("grid.r_min");
  rd.require(c.r_min > 0.0 && c.r_min < 1.0, "grid.r_min", "must lie in (0, 1)");

  c.ground.tol_J = rd.real("solver.tol_J");
  rd.require(c.ground.tol_J > 0.0, "solver.tol_J", "must be positive");
  c.ground.tol_el = rd.real("solver.tol_el");
  rd.require(c.ground.tol_el > 0.0, "solver.tol_el", "must be positive");
  c.ground.max_iters = static_cast<int>(rd.integer("solver.max_iters"));
  rd.require(c.ground.max_iters >= 1, "solver.max_iters", "must be at least 1");
  c.ground.multistart = static_cast<int>(rd.integer("solver.multistart"));
  rd.require(c.ground.multistart >= 1 && c.ground.multistart <= 5, "solver.multistart", "must lie in 1..5");

  c.run.T = rd.real("solver.T");
  rd.require(c.run.T >= 0.0, "solver.T", "must be nonnegative");
  c.run.dt = rd.real("solver.dt");
  rd.require(c.run.dt > 0.0, "solver.dt", "must be positive");
  c.run.cadence = static_cast<int>(rd.integer("solver.cadence"));
  rd.require(c.run.cadence >= 1, "solver.cadence", "must be at least 1");
  c.run.adaptive = rd.boolean("solver.adaptive");
  c.run.energy_jump = rd.real("solver.energy_jump");
  rd.require(c.run.energy_jump > 0.0, "solver.energy_jump", "must be positive");
  c.run.dt_min = rd.real("solver.dt_min");
  rd.require(c.run.dt_min > 0.0 && c.run.dt_min <= c.run.dt, "solver.dt_min", "must lie in (0, dt]");

  c.init = rd.text("evolve.init");
  if (c.init.rfind("groundstate-scaled:", 0) == 0) {
    double s = 0.0;
    rd.require(to_real(c.init.substr(19), s) && s >= 0.0, "evolve.init", "groundstate-scaled needs a scale c >= 0");
  } else {
    rd.require(c.init == "gaussian" || c.init == "file", "evolve.init",
               "must be gaussian, groundstate-scaled:<c> or file");
  }
  c.amplitude = rd.real("evolve.amplitude");
  c.width = rd.real("evolve.width");
  rd.require(c.width > 0.0, "evolve.width", "must be positive");
  c.init_file = rd.text("evolve.file");
  c.store_fields = rd.boolean("evolve.fields");
  rd.require(c.init != "file" || !c.init_file.empty(), "evolve.file", "required when evolve.init = file");

  c.dichotomy_c = rd.list("dichotomy.c");
  for (double v : c.dichotomy_c) rd.require(v > 0.0, "dichotomy.c", "scales must be positive");
  c.dichotomy_T = rd.real("dichotomy.T");
  rd.require(c.dichotomy_T > 0.0, "dichotomy.T", "must be positive");

  c.virial_R = rd.list("virial.R");
  for (double v : c.virial_R) rd.require(v > 0.0 && 2.0 * v < c.R_max, "virial.R", "radii must satisfy 0 < 2R < R_max");
  c.virial_traj = rd.text("virial.traj");
  rd.require(c.experiment != "virial-check" || !c.virial_traj.empty(), "virial.traj",
             "required for virial-check");

  c.gn_samples = static_cast<int>(rd.integer("gn.samples"));
  rd.require(c.gn_samples >= 1, "gn.samples", "must be at least 1");

  if (!rd.problems.empty()) throw ValidationError(rd.problems);
  c.echo = kv;
  return c;
}

ExperimentConfig load_config(const std::filesystem::path& path, const std::vector<std::string>& overrides) {
  std::ifstream in(path);
  if (!in) throw ParseError(0, "cannot read " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), overrides);
}

ModelParams ExperimentConfig::params() const { return ModelParams::raw(n, lambda, alpha, tau, epsilon); }

GridPtr ExperimentConfig::grid() const { return build_grid(n, R_max, J, mapping, boundary, r_min); }

}  // namespace hartreelab
