#include "hartreelab/experiment.hpp"

#include <Eigen/Core>
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "hartreelab/corpus.hpp"
#include "hartreelab/errors.hpp"
#include "hartreelab/functionals.hpp"
#include "hartreelab/io.hpp"
#include "hartreelab/operators.hpp"
#include "hartreelab/virial.hpp"

#ifndef HARTREELAB_VERSION
#define HARTREELAB_VERSION "0.0.0"
#endif

namespace hartreelab {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Context {
  const ExperimentConfig& cfg;
  std::ostream* log;
  ExperimentResult& result;
  ModelParams params;
  GridPtr grid;
  std::optional<fs::path> cache;

  fs::path out(const std::string& name) {
    result.files.emplace_back(name);
    return cfg.output / name;
  }
  void say(const std::string& s) {
    if (log) *log << s << '\n' << std::flush;
  }
  KernelPtr kernel(const GridPtr& g) { return build_riesz_kernel(g, params.alpha, cache); }
};

json ranges_json(const RangeReport& rep) {
  json arr = json::array();
  for (const auto& c : rep.checks)
    arr.push_back({{"label", c.label}, {"value", c.value}, {"bound", c.bound}, {"slack", c.slack},
                   {"status", to_string(c.status)}});
  return arr;
}

json params_json(const ModelParams& m) {
  return {{"n", m.n}, {"lambda", m.lambda}, {"alpha", m.alpha}, {"tau", m.tau},
          {"eps", m.epsilon}, {"kappa", m.kappa}, {"p", m.p}};
}

json grid_json(const RadialGrid& g, double r_min) {
  char hash[17];
  std::snprintf(hash, sizeof hash, "%016llx", static_cast<unsigned long long>(g.hash()));
  return {{"n", g.n},           {"J", g.size()}, {"R_max", g.r_max}, {"mapping", to_string(g.mapping)},
          {"boundary", to_string(g.boundary)}, {"r_min", r_min}, {"hash", hash}};
}

void write_json(const fs::path& path, const json& j) { write_text(path, j.dump(2) + "\n"); }

std::string config_text(const std::map<std::string, std::string>& echo) {
  std::string s;
  for (const auto& [k, v] : echo) s += k + " = " + v + "\n";
  return s;
}

std::string short_real(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", v);
  return buf;
}

void require_feasible(Context& ctx) {
  if (feasible(ctx.params)) return;
  const auto* f = check_theorem_ranges(ctx.params).first_failure();
  if (!f) f = check_lemma_ranges(ctx.params).first_failure();
  throw InfeasibleError(f ? f->label : "parameter ranges");
}

GroundStateResult ground_state(Context& ctx, const GridPtr& grid, const RieszKernel& kernel) {
  check_groundstate_constraints(ctx.params);
  ctx.say("computing ground state on J = " + std::to_string(grid->size()));
  return compute_ground_state(ctx.params, grid, kernel, ctx.cfg.ground);
}

void write_trajectory(const fs::path& path, const std::vector<DiagnosticsRecord>& traj) {
  CsvWriter w(path, {"t", "M", "E", "P", "I", "ME", "MG", "MP", "gradnorm", "dt"});
  for (const auto& d : traj) w.row(std::vector<double>{d.t, d.M, d.E, d.P, d.I, d.ME, d.MG, d.MP, d.gradnorm, d.dt});
}

double max_growth(const std::vector<DiagnosticsRecord>& traj) {
  if (traj.empty() || traj.front().gradnorm <= 0.0) return 0.0;
  double peak = 0.0;
  for (const auto& d : traj) peak = std::max(peak, d.gradnorm);
  return peak / traj.front().gradnorm;
}

BlowupThresholds thresholds(const RunOptions& run) {
  BlowupThresholds th;
  th.dt_min = run.dt_min;
  return th;
}

void check_params(Context& ctx) {
  const auto& m = ctx.params;
  const auto theorem = check_theorem_ranges(m);
  const auto lemma = check_lemma_ranges(m);
  const auto wit = find_exponent_witness(m);

  json rep = {{"kappa", m.kappa}, {"p", m.p}, {"params", params_json(m)},
              {"theorem_ranges", ranges_json(theorem)}, {"lemma_ranges", ranges_json(lemma)},
              {"ranges_disagree", lemma.disagrees_with_theorem}, {"feasible", feasible(m)}};
  bool verified = false;
  if (wit.feasible()) {
    const auto& w = *wit.witness;
    const auto bad = verify_witness(m, w);
    verified = !bad;
    rep["witness"] = {{"inv_q", w.pair.inv_q}, {"r", w.pair.r},   {"inv_a1", w.inv_a1}, {"inv_b1", w.inv_b1},
                      {"inv_a2", w.inv_a2},    {"inv_b2", w.inv_b2}, {"inv_a3", w.inv_a3}, {"inv_b4", w.inv_b4}};
    rep["witness_verified"] = verified;
    if (bad) rep["verification_failure"] = *bad;
  } else {
    rep["infeasible_constraint"] = wit.infeasible_constraint;
  }
  write_json(ctx.out("report.json"), rep);

  ctx.result.verdicts = {{"feasible", feasible(m)}, {"witness", wit.feasible()}, {"witness_verified", verified}};
  if (!wit.feasible()) ctx.result.verdicts["infeasible_constraint"] = wit.infeasible_constraint;
  if (!feasible(m) || !wit.feasible()) ctx.result.exit_code = 2;
}

void ground_state_experiment(Context& ctx) {
  require_feasible(ctx);
  auto kernel = ctx.kernel(ctx.grid);
  const auto gs = ground_state(ctx, ctx.grid, *kernel);
  const auto sc = sharp_constant(gs, ctx.params, *kernel);

  write_profile(ctx.out("groundstate.csv"), gs.phi);
  write_json(ctx.out("groundstate.json"),
             {{"grid", grid_json(*ctx.grid, ctx.cfg.r_min)}, {"params", params_json(ctx.params)}});
  const json record = {{"C", sc.quotient},
                       {"C_power", sc.power},
                       {"C_agree", sc.agree},
                       {"J_value", gs.J_value},
                       {"pohozaev_residual", gs.pohozaev_residual},
                       {"el_residual", gs.el_residual},
                       {"iterations", gs.iterations},
                       {"converged", gs.converged},
                       {"multiple_basins", gs.multiple_basins}};
  write_json(ctx.out("result.json"), record);
  ctx.result.verdicts = record;
}

RadialField initial_data(Context& ctx, const std::optional<GroundStateResult>& gs) {
  const auto& c = ctx.cfg;
  if (c.init == "gaussian")
    return sample_real(ctx.grid, [&](double r) { return c.amplitude * std::exp(-(r * r) / (c.width * c.width)); });
  if (c.init == "file") return read_profile(c.init_file, ctx.grid);
  const double scale = std::stod(c.init.substr(c.init.find(':') + 1));
  RadialField u = gs->phi;
  u.values *= scale;
  return u;
}

void evolve_experiment(Context& ctx) {
  require_feasible(ctx);
  auto kernel = ctx.kernel(ctx.grid);
  const bool scaled = ctx.cfg.init.rfind("groundstate-scaled:", 0) == 0;
  if (scaled && !ctx.params.focusing())
    throw DomainError("groundstate-scaled initial data needs focusing parameters (params.eps = -1)");

  std::optional<GroundStateResult> gs;
  std::optional<GroundStateRef> ref;
  if (ctx.params.focusing()) {
    gs = ground_state(ctx, ctx.grid, *kernel);
    ref = make_reference(*gs, ctx.params, *kernel);
  }
  const RadialField u0 = initial_data(ctx, gs);

  json verdict;
  std::optional<Classification> cls;
  if (gs) {
    cls = classify(u0, *gs, ctx.params, *kernel);
    verdict["prediction"] = to_string(cls->prediction);
    verdict["ME"] = cls->ME;
    verdict["MG"] = cls->MG;
    verdict["MP"] = cls->MP;
  }

  RunOptions opts = ctx.cfg.run;
  opts.store_fields = ctx.cfg.store_fields;
  ctx.say("evolving to T = " + short_real(opts.T));
  const auto res = run(u0, ctx.params, *kernel, opts, ref);

  write_trajectory(ctx.out("trajectory.csv"), res.trajectory);
  if (opts.store_fields) {
    std::vector<double> times;
    for (const auto& d : res.trajectory) times.push_back(d.t);
    write_fields(ctx.out("fields.csv"), times, res.fields);
  }
  write_text(ctx.out("run.cfg"), config_text(ctx.cfg.echo));

  verdict["run_verdict"] = to_string(res.verdict);
  verdict["t_star"] = res.t_star;
  verdict["min_dt"] = res.min_dt;
  verdict["steps"] = res.final_state.step_count;
  verdict["blowup_detector"] = to_string(blowup_detector(res.trajectory, thresholds(opts)));
  verdict["grad_growth"] = max_growth(res.trajectory);
  if (!res.trajectory.empty()) {
    const auto& a = res.trajectory.front();
    const auto& b = res.trajectory.back();
    verdict["mass_drift"] = a.M > 0.0 ? std::abs(b.M - a.M) / a.M : 0.0;
    verdict["energy_drift"] = a.E != 0.0 ? std::abs(b.E - a.E) / std::abs(a.E) : std::abs(b.E);
  }
  write_json(ctx.out("verdict.json"), verdict);
  ctx.result.verdicts = verdict;
  if (cls && cls->prediction == Prediction::OutsideTheory) ctx.result.exit_code = 2;
}

void dichotomy_experiment(Context& ctx) {
  require_feasible(ctx);
  if (!ctx.params.focusing()) throw DomainError("dichotomy needs focusing parameters (params.eps = -1)");
  auto kernel = ctx.kernel(ctx.grid);
  const auto gs = ground_state(ctx, ctx.grid, *kernel);
  const auto ref = make_reference(gs, ctx.params, *kernel);

  RunOptions opts = ctx.cfg.run;
  opts.T = ctx.cfg.dichotomy_T;
  opts.store_fields = false;

  CsvWriter table(ctx.out("verdicts.csv"), {"c", "prediction", "ME", "MG", "MP", "run_verdict", "blowup_detector",
                                            "t_star", "min_dt", "grad_growth", "I_negative", "match"});
  json rows = json::array();
  bool outside = false, all_match = true;
  for (std::size_t k = 0; k < ctx.cfg.dichotomy_c.size(); ++k) {
    const double c = ctx.cfg.dichotomy_c[k];
    RadialField u0 = gs.phi;
    u0.values *= c;
    const auto cls = classify(u0, gs, ctx.params, *kernel);
    ctx.say("c = " + short_real(c) + ": " + to_string(cls.prediction));
    const auto res = run(u0, ctx.params, *kernel, opts, ref);
    write_trajectory(ctx.out("traj_c" + short_real(c) + ".csv"), res.trajectory);

    const auto det = blowup_detector(res.trajectory, thresholds(opts));
    const bool I_negative = std::all_of(res.trajectory.begin(), res.trajectory.end(),
                                        [](const DiagnosticsRecord& d) { return d.I < 0.0; });
    bool match = false;
    if (cls.prediction == Prediction::BoundedPredicted) match = det == BlowupVerdict::Bounded;
    if (cls.prediction == Prediction::BlowupPredicted) match = det == BlowupVerdict::BlowupDetected;
    outside = outside || cls.prediction == Prediction::OutsideTheory;
    all_match = all_match && match;

    table.row({format_real(c), to_string(cls.prediction), format_real(cls.ME), format_real(cls.MG),
               format_real(cls.MP), to_string(res.verdict), to_string(det), format_real(res.t_star),
               format_real(res.min_dt), format_real(max_growth(res.trajectory)), I_negative ? "true" : "false",
               match ? "true" : "false"});
    rows.push_back({{"c", c}, {"prediction", to_string(cls.prediction)}, {"run_verdict", to_string(res.verdict)},
                    {"blowup_detector", to_string(det)}, {"I_negative", I_negative}, {"match", match}});
  }
  ctx.result.verdicts = {{"C", sharp_constant(gs, ctx.params, *kernel).quotient}, {"rows", rows},
                         {"all_match", all_match}};
  if (outside) ctx.result.exit_code = 2;
}

void virial_experiment(Context& ctx) {
  const fs::path dir = ctx.cfg.virial_traj;
  std::ifstream in(dir / "run.cfg");
  if (!in) throw DomainError("cannot read " + (dir / "run.cfg").string());
  std::stringstream ss;
  ss << in.rdbuf();
  const auto traj_cfg = parse_config(ss.str());
  ctx.params = traj_cfg.params();
  require_feasible(ctx);
  const auto grid = traj_cfg.grid();
  auto kernel = ctx.kernel(grid);

  std::vector<double> times;
  std::vector<RadialField> fields;
  read_fields(dir / "fields.csv", grid, times, fields);
  ctx.say("read " + std::to_string(fields.size()) + " snapshots");

  CsvWriter w(ctx.out("virial.csv"), {"R", "t", "V", "M", "V2_fd", "V2_analytic", "term1", "term2", "term3",
                                      "term4", "term5", "term6", "scale", "residual"});
  json per_R = json::array();
  double worst = 0.0;
  for (double R : ctx.cfg.virial_R) {
    const auto m = build_multiplier(grid, R);
    const auto reps = virial_residual(fields, times, m, ctx.params, *kernel);
    double max_res = 0.0;
    for (const auto& r : reps) {
      w.row(std::vector<double>{R, r.t, r.V, r.M, r.V2_fd, r.V2_analytic, r.terms.hessian, r.terms.bilaplacian,
                                r.terms.inverse_square, r.terms.B1, r.terms.B2, r.terms.B3, r.scale, r.residual});
      max_res = std::max(max_res, r.residual);
    }
    worst = std::max(worst, max_res);
    per_R.push_back({{"R", R}, {"max_residual", max_res}});
  }

  const auto quad = quadratic_multiplier(grid);
  double b_defect = 0.0;
  for (const auto& u : fields) {
    const auto t = virial_rhs(u, quad, ctx.params, *kernel);
    const double P4 = 4.0 * ctx.params.epsilon * potential_energy(u, ctx.params, *kernel);
    const double scale = std::max(std::abs(P4), 4.0 * quadratic_form_sqrtK(u, ctx.params));
    if (scale > 0.0) b_defect = std::max(b_defect, std::abs(t.nonlinear() - P4) / scale);
  }

  const auto fit = virial_decay(fields.back(), ctx.cfg.virial_R, ctx.params, *kernel);
  CsvWriter d(ctx.out("decay.csv"), {"R", "excess"});
  for (std::size_t k = 0; k < fit.R.size(); ++k) d.row(std::vector<double>{fit.R[k], fit.excess[k]});

  ctx.result.verdicts = {{"snapshots", fields.size()}, {"per_R", per_R},         {"max_residual", worst},
                         {"quadratic_B_defect", b_defect}, {"decay_slope", fit.slope}, {"decay_bound", fit.bound},
                         {"decay_pass", fit.pass}};
}

void gn_experiment(Context& ctx) {
  require_feasible(ctx);
  auto kernel = ctx.kernel(ctx.grid);
  const auto gs = ground_state(ctx, ctx.grid, *kernel);
  const double C = sharp_constant(gs, ctx.params, *kernel).quotient;
  const double at_ground = gn_verify(gs.phi, ctx.params, *kernel, C).ratio;

  FieldRng rng(ctx.cfg.seed);
  CsvWriter w(ctx.out("gn.csv"), {"sample", "hardy_lhs", "hardy_rhs", "hardy_pass", "form", "gn_ratio", "gn_pass"});
  int hardy_bad = 0, gn_bad = 0;
  double worst = 0.0;
  for (int k = 0; k < ctx.cfg.gn_samples; ++k) {
    const auto u = random_radial_field(ctx.grid, rng);
    const auto h = hardy_check(u, ctx.params.n);
    double form = 0.0;
    bool form_ok = true;
    try {
      form = quadratic_form_sqrtK(u, ctx.params);
    } catch (const HardyViolation&) {
      form_ok = false;
    }
    const auto g = gn_verify(u, ctx.params, *kernel, C);
    if (!h.pass || !form_ok) ++hardy_bad;
    if (!g.pass) ++gn_bad;
    worst = std::max(worst, g.ratio);
    w.row({std::to_string(k), format_real(h.lhs), format_real(h.rhs), h.pass && form_ok ? "true" : "false",
           format_real(form), format_real(g.ratio), g.pass ? "true" : "false"});
  }
  ctx.result.verdicts = {{"C", C},
                         {"ratio_at_ground_state", at_ground},
                         {"ratio_in_band", at_ground >= 0.997 && at_ground <= 1.001},
                         {"samples", ctx.cfg.gn_samples},
                         {"hardy_violations", hardy_bad},
                         {"gn_violations", gn_bad},
                         {"max_ratio", worst}};
}

json versions() {
  return {{"hartreelab", HARTREELAB_VERSION},
          {"eigen", std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) + "." +
                        std::to_string(EIGEN_MINOR_VERSION)},
          {"json", std::to_string(NLOHMANN_JSON_VERSION_MAJOR) + "." + std::to_string(NLOHMANN_JSON_VERSION_MINOR) +
                       "." + std::to_string(NLOHMANN_JSON_VERSION_PATCH)},
#ifdef __VERSION__
          {"compiler", __VERSION__},
#endif
          {"cplusplus", __cplusplus}};
}

}  // namespace

std::optional<fs::path> cache_dir_from_env() {
  const char* v = std::getenv("HARTREELAB_CACHE");
  if (!v || !*v) return std::nullopt;
  return fs::path(v);
}

ExperimentResult run_experiment(const ExperimentConfig& config, std::ostream* log) {
  ExperimentResult result;
  const auto start = std::chrono::steady_clock::now();
  Context ctx{config, log, result, config.params(), nullptr, cache_dir_from_env()};

  try {
    fs::create_directories(config.output);
    if (ctx.cache) fs::create_directories(*ctx.cache);
    if (config.experiment != "virial-check") ctx.grid = config.grid();
    const auto& e = config.experiment;
    if (e == "check-params") check_params(ctx);
    else if (e == "ground-state") ground_state_experiment(ctx);
    else if (e == "evolve") evolve_experiment(ctx);
    else if (e == "dichotomy") dichotomy_experiment(ctx);
    else if (e == "virial-check") virial_experiment(ctx);
    else if (e == "gn-verify") gn_experiment(ctx);
    else throw DomainError("unknown experiment '" + e + "'");
  } catch (const InfeasibleError& err) {
    result.exit_code = 2;
    result.error = err.what();
    result.verdicts["infeasible_constraint"] = err.constraint();
  } catch (const std::exception& err) {
    result.exit_code = 1;
    result.error = err.what();
  }

  const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  json manifest = {{"experiment", config.experiment}, {"config", config.echo}, {"versions", versions()},
                   {"wall_time_s", wall},              {"exit_code", result.exit_code}, {"verdicts", result.verdicts}};
  if (!result.error.empty()) manifest["error"] = result.error;
  json files = json::array();
  for (const auto& f : result.files) {
    const fs::path full = config.output / f;
    if (!fs::exists(full)) continue;
    files.push_back({{"path", f.generic_string()}, {"sha256", sha256_file(full)}, {"bytes", fs::file_size(full)}});
  }
  manifest["files"] = files;
  try {
    write_json(config.output / "manifest.json", manifest);
  } catch (const std::exception& err) {
    if (log) *log << "cannot write manifest: " << err.what() << '\n';
    if (result.exit_code == 0) result.exit_code = 1;
  }
  if (log && !result.error.empty()) *log << "error: " << result.error << '\n';
  return result;
}

}  // namespace hartreelab
