#include "hartreelab/functionals.hpp"

#include <cmath>

#include "hartreelab/errors.hpp"
#include "hartreelab/operators.hpp"

namespace hartreelab {

Eigen::VectorXd abs_power(const Eigen::VectorXcd& v, double p) {
  Eigen::VectorXd out(v.size());
  for (Eigen::Index j = 0; j < v.size(); ++j) {
    const double a = std::abs(v(j));
    out(j) = a > 0.0 ? std::exp(p * std::log(a)) : 0.0;
  }
  return out;
}

Eigen::VectorXd hartree_source(const RadialField& u, const ModelParams& params) {
  return u.grid->power_average(params.tau).cwiseProduct(abs_power(u.values, params.p));
}

Eigen::VectorXd hartree_multiplier(const RadialField& u, const ModelParams& params, const RieszKernel& kernel) {
  const Eigen::VectorXd g = hartree_source(u, params);
  const Eigen::VectorXd pot = kernel.potential(g);
  return u.grid->power_average(params.tau).cwiseProduct(abs_power(u.values, params.p - 2.0)).cwiseProduct(pot);
}

double potential_energy(const RadialField& u, const ModelParams& params, const RieszKernel& kernel) {
  if (kernel.grid->hash() != u.grid->hash()) throw DomainError("kernel and field live on different grids");
  const Eigen::VectorXd g = hartree_source(u, params);
  if (!g.allFinite()) throw NonFinite("|u|^p overflowed");
  const double P = g.dot(kernel.interaction * g);
  if (!std::isfinite(P)) throw NonFinite("potential energy overflowed");
  return P;
}

double mass(const RadialField& u) { return u.grid->weights.dot(u.values.cwiseAbs2()); }

double energy(const RadialField& u, const ModelParams& params, const RieszKernel& kernel) {
  const double q = quadratic_form_sqrtK(u, params);
  if (params.epsilon == 0) return q;
  return q + params.epsilon / params.p * potential_energy(u, params, kernel);
}

double weighted_Lq_norm(const RadialField& u, double q, double b) {
  if (!(q > 0.0)) throw DomainError("Lebesgue exponent must be positive");
  const Eigen::VectorXd rw = u.grid->power_average(-b * q);
  const double integral = u.grid->weights.dot(rw.cwiseProduct(abs_power(u.values, q)));
  return std::pow(integral, 1.0 / q);
}

std::complex<double> inner(const RadialField& u, const RadialField& v) {
  std::complex<double> acc = 0.0;
  for (int j = 0; j < u.size(); ++j) acc += u.grid->weights(j) * std::conj(u.values(j)) * v.values(j);
  return acc;
}

}  // namespace hartreelab
