#include "hartreelab/operators.hpp"

#include <cmath>

#include "hartreelab/errors.hpp"

namespace hartreelab {

namespace {

double outer_coupling(const RadialGrid& g, double lambda) {
  const int J = g.size();
  const double area = g.sphere_area() * std::pow(g.r_max, g.n - 1);
  const double face = area / (g.r_max - g.nodes(J - 1));
  if (g.boundary == OuterBoundary::Dirichlet) return face;
  // Exterior energy of the decaying harmonic tail, ω a R^{n-2} |u(R)|², in
  // series with the half-cell flux.
  const double decay = g.n - 2.0 - kappa_of(g.n, lambda);
  const double exterior = g.sphere_area() * decay * std::pow(g.r_max, g.n - 2);
  return face * exterior / (face + exterior);
}

void check_dims(const RadialField& u, const ModelParams& params) {
  if (u.grid->n != params.n)
    throw DomainError("field dimension " + std::to_string(u.grid->n) + " does not match params n = " +
                      std::to_string(params.n));
}

}  // namespace

Stiffness assemble_stiffness(const RadialGrid& g, double lambda) {
  const int J = g.size();
  Stiffness s;
  s.lambda = lambda;
  s.face.resize(J - 1);
  const double area = g.sphere_area();
  for (int j = 0; j + 1 < J; ++j)
    s.face(j) = area * std::pow(g.faces(j + 1), g.n - 1) / (g.nodes(j + 1) - g.nodes(j));
  s.outer = outer_coupling(g, lambda);
  s.inv_r2 = g.power_average(2.0);

  s.diag = lambda * g.weights.cwiseProduct(s.inv_r2);
  s.off = -s.face;
  for (int j = 0; j + 1 < J; ++j) {
    s.diag(j) += s.face(j);
    s.diag(j + 1) += s.face(j);
  }
  s.diag(J - 1) += s.outer;
  return s;
}

RadialField apply_K_lambda(const RadialField& u, const ModelParams& params) {
  check_dims(u, params);
  const auto& g = *u.grid;
  const Stiffness s = assemble_stiffness(g, params.lambda);
  const int J = g.size();
  RadialField out(u.grid);
  for (int j = 0; j < J; ++j) {
    std::complex<double> acc = s.diag(j) * u.values(j);
    if (j > 0) acc += s.off(j - 1) * u.values(j - 1);
    if (j + 1 < J) acc += s.off(j) * u.values(j + 1);
    out.values(j) = acc / g.weights(j);
  }
  return out;
}

double gradient_energy(const RadialField& u) {
  const auto& g = *u.grid;
  const Stiffness s = assemble_stiffness(g, 0.0);
  const int J = g.size();
  double acc = 0.0;
  for (int j = 0; j + 1 < J; ++j) acc += s.face(j) * std::norm(u.values(j + 1) - u.values(j));
  acc += s.outer * std::norm(u.values(J - 1));
  return acc;
}

double inverse_square_integral(const RadialField& u) {
  const auto& g = *u.grid;
  const Eigen::VectorXd inv_r2 = g.power_average(2.0);
  double acc = 0.0;
  for (int j = 0; j < g.size(); ++j) acc += g.weights(j) * inv_r2(j) * std::norm(u.values(j));
  return acc;
}

double quadratic_form_sqrtK(const RadialField& u, const ModelParams& params) {
  check_dims(u, params);
  const auto& g = *u.grid;
  const Stiffness s = assemble_stiffness(g, params.lambda);
  const int J = g.size();
  double grad = 0.0;
  for (int j = 0; j + 1 < J; ++j) grad += s.face(j) * std::norm(u.values(j + 1) - u.values(j));
  grad += s.outer * std::norm(u.values(J - 1));
  double pot = 0.0;
  for (int j = 0; j < J; ++j) pot += g.weights(j) * s.inv_r2(j) * std::norm(u.values(j));
  const double q = grad + params.lambda * pot;
  if (q < -1e-8 * grad) throw HardyViolation("discrete quadratic form is negative: " + std::to_string(q));
  return q;
}

HardyCheck hardy_check(const RadialField& u, int n) {
  HardyCheck h;
  h.lhs = 0.25 * (n - 2.0) * (n - 2.0) * inverse_square_integral(u);
  h.rhs = gradient_energy(u);
  h.pass = h.lhs <= h.rhs * (1.0 + 1e-8);
  return h;
}

Eigen::VectorXcd solve_K_lambda(const GridPtr& grid, double lambda, const Eigen::VectorXcd& b) {
  const Stiffness s = assemble_stiffness(*grid, lambda);
  const int J = grid->size();
  // Thomas algorithm on L x = W b.
  Eigen::VectorXd c(J);
  Eigen::VectorXcd d(J);
  double denom = s.diag(0);
  if (!(denom > 0.0)) throw HardyViolation("K_lambda is not positive definite");
  c(0) = J > 1 ? s.off(0) / denom : 0.0;
  d(0) = grid->weights(0) * b(0) / denom;
  for (int j = 1; j < J; ++j) {
    denom = s.diag(j) - s.off(j - 1) * c(j - 1);
    if (!(denom > 0.0)) throw HardyViolation("K_lambda is not positive definite");
    c(j) = j + 1 < J ? s.off(j) / denom : 0.0;
    d(j) = (grid->weights(j) * b(j) - s.off(j - 1) * d(j - 1)) / denom;
  }
  Eigen::VectorXcd x(J);
  x(J - 1) = d(J - 1);
  for (int j = J - 2; j >= 0; --j) x(j) = d(j) - c(j) * x(j + 1);
  return x;
}

}  // namespace hartreelab
