#pragma once

#include <Eigen/Dense>

#include "hartreelab/grid.hpp"
#include "hartreelab/params.hpp"
#include "hartreelab/riesz.hpp"

namespace hartreelab {

/// |v|^p as exp(p log|v|), with 0 mapped to 0.
Eigen::VectorXd abs_power(const Eigen::VectorXcd& v, double p);

/// g = r^{-τ}|u|^p, with r^{-τ} averaged over each cell.
Eigen::VectorXd hartree_source(const RadialField& u, const ModelParams& params);

/// Real multiplier W = r^{-τ}|u|^{p-2} (I_α * r^{-τ}|u|^p); the nonlinearity
/// of the equation is ε W u.
Eigen::VectorXd hartree_multiplier(const RadialField& u, const ModelParams& params, const RieszKernel& kernel);

/// P[u] = ∫ r^{-τ}|u|^p (I_α * r^{-τ}|u|^p). Throws NonFinite on overflow.
double potential_energy(const RadialField& u, const ModelParams& params, const RieszKernel& kernel);

double mass(const RadialField& u);

/// E[u] = ‖√K_λ u‖² + (ε/p) P[u].
double energy(const RadialField& u, const ModelParams& params, const RieszKernel& kernel);

/// ‖r^b u‖_{L^q}.
double weighted_Lq_norm(const RadialField& u, double q, double b);

/// Weighted inner product Σ w_j conj(u_j) v_j.
std::complex<double> inner(const RadialField& u, const RadialField& v);

}  // namespace hartreelab
