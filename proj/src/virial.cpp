#include "hartreelab/virial.hpp"

#include <cmath>
#include <limits>

#include "hartreelab/errors.hpp"
#include "hartreelab/functionals.hpp"
#include "hartreelab/operators.hpp"

namespace hartreelab {

namespace {

// φ'/R on the bridge as a polynomial in s = (r - R)/R: value 1 and slope 1 at
// s = 0, flat to third order at both ends.
constexpr double kBridge[8] = {1.0, 1.0, 0.0, 0.0, -55.0, 129.0, -106.0, 30.0};

double bridge(double s, int k) {
  double acc = 0.0;
  if (k < 0) {
    // antiderivative vanishing at s = 0
    for (int i = 7; i >= 0; --i) acc = acc * s + kBridge[i] / (i + 1);
    return acc * s;
  }
  for (int i = 7; i >= k; --i) {
    double c = kBridge[i];
    for (int m = 0; m < k; ++m) c *= i - m;
    acc = acc * s + c;
  }
  return acc;
}

MultiplierProfile fill(const GridPtr& grid, double R, bool global) {
  const auto& g = *grid;
  const int J = g.size();
  MultiplierProfile m;
  m.grid = grid;
  m.R = R;
  m.phi.resize(J);
  m.dphi.resize(J);
  m.d2phi.resize(J);
  m.lap.resize(J);
  m.bilap.resize(J);
  m.dphi_over_r.resize(J);
  const double n1 = g.n - 1.0, n3 = g.n - 3.0;
  for (int j = 0; j < J; ++j) {
    const double r = g.nodes(j);
    if (global || r <= R) {
      m.phi(j) = 0.5 * r * r;
      m.dphi(j) = r;
      m.d2phi(j) = 1.0;
      m.lap(j) = g.n;
      m.bilap(j) = 0.0;
      m.dphi_over_r(j) = 1.0;
      continue;
    }
    double d[5];
    for (int k = 0; k < 5; ++k) d[k] = multiplier_derivative(R, r, k);
    m.phi(j) = d[0];
    m.dphi(j) = d[1];
    m.d2phi(j) = d[2];
    m.dphi_over_r(j) = d[1] / r;
    m.lap(j) = d[2] + n1 * d[1] / r;
    m.bilap(j) = d[4] + 2.0 * n1 * d[3] / r + n1 * n3 * (d[2] / (r * r) - d[1] / (r * r * r));
  }
  m.d2phi_face.resize(J);
  for (int j = 0; j + 1 < J; ++j) m.d2phi_face(j) = global ? 1.0 : multiplier_derivative(R, g.faces(j + 1), 2);
  m.d2phi_face(J - 1) = global ? 1.0 : multiplier_derivative(R, g.r_max, 2);
  return m;
}

}  // namespace

double multiplier_derivative(double R, double r, int k) {
  if (k < 0 || k > 4) throw DomainError("multiplier derivatives are available up to order 4");
  if (r <= R) {
    if (k == 0) return 0.5 * r * r;
    if (k == 1) return r;
    return k == 2 ? 1.0 : 0.0;
  }
  const double s = std::min((r - R) / R, 1.0);
  if (r >= 2.0 * R && k > 0) return 0.0;
  switch (k) {
    case 0: return R * R * (0.5 + bridge(s, -1));
    case 1: return R * bridge(s, 0);
    case 2: return bridge(s, 1);
    case 3: return bridge(s, 2) / R;
    default: return bridge(s, 3) / (R * R);
  }
}

MultiplierProfile build_multiplier(const GridPtr& grid, double R) {
  if (!(R > 0.0) || !(2.0 * R < grid->r_max))
    throw DomainError("multiplier radius must satisfy 0 < 2R < R_max");
  return fill(grid, R, false);
}

MultiplierProfile quadratic_multiplier(const GridPtr& grid) {
  return fill(grid, std::numeric_limits<double>::infinity(), true);
}

double variance(const RadialField& u, const MultiplierProfile& m) {
  return m.grid->weights.dot(m.phi.cwiseProduct(u.values.cwiseAbs2()));
}

double morawetz_action(const RadialField& u, const MultiplierProfile& m) {
  const Stiffness s = assemble_stiffness(*u.grid, 0.0);
  double acc = 0.0;
  for (int j = 0; j + 1 < u.size(); ++j)
    acc += s.face(j) * (m.phi(j + 1) - m.phi(j)) * std::imag(std::conj(u.values(j)) * u.values(j + 1));
  return 2.0 * acc;
}

VirialTerms virial_rhs(const RadialField& u, const MultiplierProfile& m, const ModelParams& params,
                       const RieszKernel& kernel) {
  const auto& g = *u.grid;
  const int J = g.size();
  const Stiffness s = assemble_stiffness(g, params.lambda);
  VirialTerms t;
  double hess = 0.0;
  for (int j = 0; j + 1 < J; ++j) hess += s.face(j) * m.d2phi_face(j) * std::norm(u.values(j + 1) - u.values(j));
  hess += s.outer * m.d2phi_face(J - 1) * std::norm(u.values(J - 1));
  t.hessian = 4.0 * hess;

  const Eigen::VectorXd rho = u.values.cwiseAbs2();
  // -∫Δ²φ|u|² summed by parts as ∫(Δφ)'(|u|²)'; nodal Δ²φ is too rough on
  // narrow bridges.
  double bl = 0.0;
  for (int j = 0; j + 1 < J; ++j) bl += s.face(j) * (m.lap(j + 1) - m.lap(j)) * (rho(j + 1) - rho(j));
  t.bilaplacian = bl;
  t.inverse_square =
      4.0 * params.lambda * g.weights.dot(s.inv_r2.cwiseProduct(m.dphi_over_r).cwiseProduct(rho));

  if (params.epsilon != 0) {
    const double e = params.epsilon, p = params.p;
    const Eigen::VectorXd src = hartree_source(u, params);
    const Eigen::VectorXd Sg = kernel.interaction * src;
    const Eigen::VectorXd Tg = kernel.dilation * src;
    const Eigen::VectorXd gSg = src.cwiseProduct(Sg);
    t.B1 = e * 2.0 * (p - 2.0) / p * m.lap.dot(gSg);
    t.B2 = e * 4.0 * params.tau / p * m.dphi_over_r.dot(gSg);
    const double shift = 0.5 * (params.alpha - params.n);
    t.B3 = -e * 4.0 / p * m.dphi_over_r.dot(src.cwiseProduct(shift * Sg + Tg));
  }
  return t;
}

std::vector<VirialReport> virial_residual(const std::vector<RadialField>& fields, const std::vector<double>& times,
                                          const MultiplierProfile& m, const ModelParams& params,
                                          const RieszKernel& kernel) {
  if (fields.size() < 3 || times.size() != fields.size())
    throw CadenceError("virial residual needs at least three samples with matching times");
  const double dt = times[1] - times[0];
  if (!(dt > 0.0)) throw CadenceError("sample times must increase");
  for (size_t k = 1; k < times.size(); ++k)
    if (std::abs(times[k] - times[k - 1] - dt) > 1e-9 * std::max(1.0, dt) + 1e-6 * dt)
      throw CadenceError("samples are not uniformly spaced");

  std::vector<double> V(fields.size());
  for (size_t k = 0; k < fields.size(); ++k) V[k] = variance(fields[k], m);

  std::vector<VirialReport> out;
  for (size_t k = 1; k + 1 < fields.size(); ++k) {
    VirialReport r;
    r.t = times[k];
    r.V = V[k];
    r.M = morawetz_action(fields[k], m);
    r.terms = virial_rhs(fields[k], m, params, kernel);
    r.V2_analytic = r.terms.total();
    r.V2_fd = (V[k + 1] - 2.0 * V[k] + V[k - 1]) / (dt * dt);
    r.scale = std::max(std::abs(r.V2_analytic), 4.0 * quadratic_form_sqrtK(fields[k], params));
    r.residual = r.scale > 0.0 ? std::abs(r.V2_analytic - r.V2_fd) / r.scale : 0.0;
    out.push_back(r);
  }
  return out;
}

DecayFit virial_decay(const RadialField& u, const std::vector<double>& radii, const ModelParams& params,
                      const RieszKernel& kernel) {
  if (radii.size() < 2) throw DomainError("decay fit needs at least two radii");
  DecayFit f;
  const double limit = quadratic_form_sqrtK(u, params) + params.epsilon * potential_energy(u, params, kernel);
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (double R : radii) {
    const double ex = virial_rhs(u, build_multiplier(u.grid, R), params, kernel).total() - 4.0 * limit;
    f.R.push_back(R);
    f.excess.push_back(ex);
    const double x = std::log(R), y = std::log(std::max(std::abs(ex), std::numeric_limits<double>::min()));
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const double k = static_cast<double>(radii.size());
  f.slope = (k * sxy - sx * sy) / (k * sxx - sx * sx);
  f.bound = -std::min(2.0 * params.tau, 2.0) + 0.3;
  f.pass = f.slope <= f.bound;
  return f;
}

}  // namespace hartreelab
