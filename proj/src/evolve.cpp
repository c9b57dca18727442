#include "hartreelab/evolve.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>

#include "hartreelab/errors.hpp"
#include "hartreelab/functionals.hpp"
#include "hartreelab/operators.hpp"

namespace hartreelab {

namespace {

using cd = std::complex<double>;

Eigen::VectorXcd rotate(const Eigen::VectorXcd& c, const Eigen::VectorXd& eig, double t) {
  Eigen::VectorXcd out(c.size());
  for (Eigen::Index k = 0; k < c.size(); ++k) out(k) = c(k) * std::polar(1.0, -eig(k) * t);
  return out;
}

}  // namespace

Eigen::VectorXcd Propagator::to_modes(const Eigen::VectorXcd& u) const {
  const Eigen::VectorXcd x = sqrt_w.cast<cd>().cwiseProduct(u);
  Eigen::MatrixXd parts(x.size(), 2);
  parts.col(0) = x.real();
  parts.col(1) = x.imag();
  const Eigen::MatrixXd m = V.transpose() * parts;
  Eigen::VectorXcd c(x.size());
  c.real() = m.col(0);
  c.imag() = m.col(1);
  return c;
}

Eigen::VectorXcd Propagator::from_modes(const Eigen::VectorXcd& c) const {
  Eigen::MatrixXd parts(c.size(), 2);
  parts.col(0) = c.real();
  parts.col(1) = c.imag();
  const Eigen::MatrixXd m = V * parts;
  Eigen::VectorXcd u(c.size());
  u.real() = m.col(0).cwiseQuotient(sqrt_w);
  u.imag() = m.col(1).cwiseQuotient(sqrt_w);
  return u;
}

RadialField Propagator::apply(const RadialField& u, double t) const {
  return RadialField(u.grid, from_modes(rotate(to_modes(u.values), eigenvalues, t)));
}

Propagator build_propagator(const GridPtr& grid, const ModelParams& params, double dt) {
  if (grid->n != params.n) throw DomainError("grid dimension does not match params");
  const Stiffness s = assemble_stiffness(*grid, params.lambda);
  Propagator prop;
  prop.grid = grid;
  prop.lambda = params.lambda;
  prop.dt = dt;
  prop.sqrt_w = grid->weights.cwiseSqrt();
  const int J = grid->size();
  Eigen::VectorXd diag = s.diag.cwiseQuotient(grid->weights);
  Eigen::VectorXd sub(J - 1);
  for (int j = 0; j + 1 < J; ++j) sub(j) = s.off(j) / (prop.sqrt_w(j) * prop.sqrt_w(j + 1));
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver;
  solver.computeFromTridiagonal(diag, sub, Eigen::ComputeEigenvectors);
  if (solver.info() != Eigen::Success) throw EigFailure("tridiagonal eigensolver did not converge");
  prop.V = solver.eigenvectors();
  prop.eigenvalues = solver.eigenvalues();
  return prop;
}

RadialField nonlinear_phase(const RadialField& u, const ModelParams& params, const RieszKernel& kernel, double h) {
  if (params.epsilon == 0) return u;
  const Eigen::VectorXd W = hartree_multiplier(u, params, kernel);
  RadialField out(u.grid);
  for (int j = 0; j < u.size(); ++j) out.values(j) = u.values(j) * std::polar(1.0, -params.epsilon * W(j) * h);
  return out;
}

EvolutionState step(const EvolutionState& state, double dt, const ModelParams& params, const RieszKernel& kernel,
                    const Propagator& propagator, double overflow) {
  if (!(dt != 0.0)) throw DomainError("time step must be nonzero");
  EvolutionState next;
  next.t = state.t + dt;
  next.step_count = state.step_count + 1;
  try {
    RadialField u = nonlinear_phase(state.u, params, kernel, 0.5 * dt);
    u = propagator.apply(u, dt);
    u = nonlinear_phase(u, params, kernel, 0.5 * dt);
    next.diverged = !u.finite() || u.max_abs() > overflow;
    next.u = std::move(u);
  } catch (const NonFinite&) {
    next.u = state.u;
    next.diverged = true;
  }
  return next;
}

GroundStateRef make_reference(const GroundStateResult& ground, const ModelParams& params, const RieszKernel& kernel) {
  GroundStateRef ref;
  const double q = quadratic_form_sqrtK(ground.phi, params);
  ref.P = potential_energy(ground.phi, params, kernel);
  ref.grad = std::sqrt(q);
  ref.E = q + params.epsilon / params.p * ref.P;
  return ref;
}

DiagnosticsRecord diagnose(const RadialField& u, double t, double dt, const ModelParams& params,
                           const RieszKernel& kernel, const std::optional<GroundStateRef>& ref) {
  DiagnosticsRecord d;
  d.t = t;
  d.dt = dt;
  d.M = mass(u);
  const double q = quadratic_form_sqrtK(u, params);
  d.P = potential_energy(u, params, kernel);
  d.E = params.epsilon == 0 ? q : q + params.epsilon / params.p * d.P;
  d.I = q - d.P;
  d.gradnorm = std::sqrt(q);
  if (ref) {
    d.ME = d.E / ref->E;
    d.MG = d.gradnorm / ref->grad;
    d.MP = d.P / ref->P;
  } else {
    d.ME = d.MG = d.MP = std::nan("");
  }
  return d;
}

const char* to_string(RunVerdict v) {
  switch (v) {
    case RunVerdict::Completed: return "Completed";
    case RunVerdict::BlowupDetected: return "BlowupDetected";
    case RunVerdict::Diverged: return "Diverged";
    case RunVerdict::BoundaryContaminated: return "BoundaryContaminated";
    case RunVerdict::StepLimit: return "StepLimit";
  }
  return "?";
}

double outer_mass(const RadialField& u, double fraction) {
  const auto& g = *u.grid;
  const double edge = fraction * g.r_max;
  double acc = 0.0;
  for (int j = 0; j < u.size(); ++j)
    if (g.nodes(j) > edge) acc += g.weights(j) * std::norm(u.values(j));
  return acc;
}

RunResult run(const RadialField& u0, const ModelParams& params, const RieszKernel& kernel, const RunOptions& opts,
              const std::optional<GroundStateRef>& ref) {
  if (!u0.finite()) throw NonFinite("initial field is not finite");
  if (!(opts.dt > 0.0) || !(opts.T >= 0.0)) throw DomainError("run needs dt > 0 and T >= 0");
  if (opts.cadence < 1) throw CadenceError("cadence must be at least one step");

  const Propagator prop = build_propagator(u0.grid, params, opts.dt);
  RunResult res;
  EvolutionState state{u0, 0.0, 0, false};
  double dt = opts.dt;
  res.min_dt = dt;

  auto record = [&](double used_dt) {
    res.trajectory.push_back(diagnose(state.u, state.t, used_dt, params, kernel, ref));
    if (opts.store_fields) res.fields.push_back(state.u);
  };
  record(dt);

  const double M0 = res.trajectory.front().M;
  const double outer0 = outer_mass(u0, opts.boundary_fraction);
  double E_prev = res.trajectory.front().E;
  long accepted = 0;
  const double t_end = opts.T * (1.0 - 1e-12);

  while (state.t < t_end) {
    if (accepted >= opts.max_steps) {
      res.verdict = RunVerdict::StepLimit;
      break;
    }
    const double h = std::min(dt, opts.T - state.t);
    EvolutionState next = step(state, h, params, kernel, prop, opts.overflow);
    if (next.diverged) {
      res.verdict = RunVerdict::Diverged;
      record(h);
      break;
    }
    double E_new;
    try {
      E_new = energy(next.u, params, kernel);
    } catch (const NonFinite&) {
      res.verdict = RunVerdict::Diverged;
      break;
    }
    if (opts.adaptive && std::abs(E_new - E_prev) > opts.energy_jump * std::abs(E_prev)) {
      dt *= 0.5;
      res.min_dt = std::min(res.min_dt, dt);
      if (dt < opts.dt_min) {
        res.verdict = RunVerdict::BlowupDetected;
        record(dt);
        break;
      }
      continue;
    }
    state = std::move(next);
    E_prev = E_new;
    ++accepted;
    const bool last = state.t >= t_end;
    if (accepted % opts.cadence == 0 || last) {
      record(h);
      if (M0 > 0.0 && outer_mass(state.u, opts.boundary_fraction) - outer0 > opts.boundary_tol * M0) {
        res.verdict = RunVerdict::BoundaryContaminated;
        break;
      }
    }
  }
  res.t_star = state.t;
  res.final_state = state;
  return res;
}

const char* to_string(BlowupVerdict v) {
  switch (v) {
    case BlowupVerdict::BlowupDetected: return "BlowupDetected";
    case BlowupVerdict::Bounded: return "Bounded";
    case BlowupVerdict::Indeterminate: return "Indeterminate";
  }
  return "?";
}

BlowupVerdict blowup_detector(const std::vector<DiagnosticsRecord>& trajectory, const BlowupThresholds& th) {
  if (trajectory.empty()) throw PreconditionError("blowup_detector needs a nonempty trajectory");
  const double g0 = trajectory.front().gradnorm;
  double peak = g0, min_dt = trajectory.front().dt;
  for (const auto& d : trajectory) {
    peak = std::max(peak, d.gradnorm);
    min_dt = std::min(min_dt, d.dt);
  }
  const bool collapsed = min_dt < th.dt_min;
  if (collapsed && peak >= th.growth * g0 && g0 > 0.0) return BlowupVerdict::BlowupDetected;
  // A collapsed run never reached its horizon, so it cannot count as bounded.
  if (!collapsed && peak <= th.bounded * g0) return BlowupVerdict::Bounded;
  return BlowupVerdict::Indeterminate;
}

double scattering_diagnostic(const RadialField& u1, double t1, const RadialField& u2, double t2,
                             const Propagator& propagator) {
  // e^{itK} rotates the mode coordinates by +λ_k t.
  const Eigen::VectorXcd c1 = rotate(propagator.to_modes(u1.values), propagator.eigenvalues, -t1);
  const Eigen::VectorXcd c2 = rotate(propagator.to_modes(u2.values), propagator.eigenvalues, -t2);
  double acc = 0.0;
  for (Eigen::Index k = 0; k < c1.size(); ++k)
    acc += (1.0 + propagator.eigenvalues(k)) * std::norm(c2(k) - c1(k));
  return std::sqrt(acc);
}

const char* to_string(Prediction p) {
  switch (p) {
    case Prediction::BoundedPredicted: return "BoundedPredicted";
    case Prediction::BlowupPredicted: return "BlowupPredicted";
    case Prediction::OutsideTheory: return "OutsideTheory";
  }
  return "?";
}

Classification classify(const RadialField& u0, const GroundStateResult& ground, const ModelParams& params,
                        const RieszKernel& kernel, double tie) {
  if (params.epsilon != -1) throw PreconditionError("classify applies to focusing data only (epsilon = -1)");
  const GroundStateRef ref = make_reference(ground, params, kernel);
  const DiagnosticsRecord d = diagnose(u0, 0.0, 0.0, params, kernel, ref);
  Classification c;
  c.ME = d.ME;
  c.MG = d.MG;
  c.MP = d.MP;
  c.t1 = std::pow(ground.C, -1.0 / (params.p - 1.0));
  c.f_t1 = (params.p - 1.0) / params.p * c.t1;
  if (c.ME < 1.0 - tie && c.MG > 1.0 + tie) c.prediction = Prediction::BlowupPredicted;
  else if (c.ME < 1.0 - tie && c.MG < 1.0 - tie) c.prediction = Prediction::BoundedPredicted;
  else c.prediction = Prediction::OutsideTheory;
  return c;
}

}  // namespace hartreelab
