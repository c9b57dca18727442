#pragma once

#include <Eigen/Dense>

#include "hartreelab/grid.hpp"
#include "hartreelab/params.hpp"

namespace hartreelab {

/// Finite-volume form of K_λ = -Δ + λ/r². With W = diag(weights) the
/// discrete operator is K = W^{-1} L where L is symmetric tridiagonal, so
/// ⟨K u, v⟩_W = ⟨u, K v⟩_W and ⟨K u, u⟩_W equals the discrete quadratic form.
struct Stiffness {
  Eigen::VectorXd face;      ///< ω f^{n-1} / (r_{j+1} - r_j) on interior faces (size J-1)
  double outer = 0.0;        ///< coupling of the last cell to the outer boundary
  Eigen::VectorXd inv_r2;    ///< cell average of r^{-2}
  double lambda = 0.0;
  Eigen::VectorXd diag;      ///< L_jj
  Eigen::VectorXd off;       ///< L_{j,j+1}
};

Stiffness assemble_stiffness(const RadialGrid& grid, double lambda);

/// Returns K_λ u = -u'' - (n-1)/r u' + λ/r² u.
RadialField apply_K_lambda(const RadialField& u, const ModelParams& params);

/// ∫|∇u|² + λ∫|u|²/r² = ‖√K_λ u‖². Throws HardyViolation if the result is
/// below -1e-8 ‖∇u‖².
double quadratic_form_sqrtK(const RadialField& u, const ModelParams& params);

/// ∫|∇u|² alone (face differences plus the outer-boundary term).
double gradient_energy(const RadialField& u);

/// ∫|u|²/r².
double inverse_square_integral(const RadialField& u);

struct HardyCheck {
  double lhs = 0.0;  ///< ((n-2)²/4) ∫|u|²/r²
  double rhs = 0.0;  ///< ∫|∇u|²
  bool pass = true;
};

HardyCheck hardy_check(const RadialField& u, int n);

/// Solves K_λ x = b (K_λ must be positive definite).
Eigen::VectorXcd solve_K_lambda(const GridPtr& grid, double lambda, const Eigen::VectorXcd& b);

}  // namespace hartreelab
