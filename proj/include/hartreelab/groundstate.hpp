#pragma once

#include <vector>

#include "hartreelab/grid.hpp"
#include "hartreelab/params.hpp"
#include "hartreelab/riesz.hpp"

namespace hartreelab {

struct GroundStateOptions {
  int max_iters = 5000;
  double tol_J = 1e-10;   ///< relative change of J between accepted steps
  double tol_el = 1e-3;   ///< Euler-Lagrange residual
  double initial_step = 1.0;
  int multistart = 1;
  double basin_tol = 1e-3;
  /// Project the scaling direction out of every step.
  bool pin_dilation = true;
  /// Return the last iterate instead of throwing NoConvergence.
  bool allow_unconverged = false;
};

struct GroundStateResult {
  RadialField phi;
  double C = 0.0;
  double J_value = 0.0;
  double pohozaev_residual = 0.0;
  double el_residual = 0.0;
  int iterations = 0;
  bool converged = false;
  bool multiple_basins = false;
  std::vector<double> history;  ///< J after every accepted step
};

/// 0 < τ < 1 + α/n and 0 < α < n; throws InfeasibleError otherwise.
void check_groundstate_constraints(const ModelParams& params);

/// x^{-κ} (1 + x²)^{-(n-2-2κ)/2} with x = r/scale: the (1 + r²)^{-(n-2)/2}
/// bubble for λ = 0, and for λ ≠ 0 the same profile bent to the r^{-κ}
/// behaviour at the origin and r^{-(n-2-κ)} decay at infinity.
RadialField bubble(const GridPtr& grid, double scale = 1.0, double kappa = 0.0);

/// J(u) = ‖√K_λ u‖^{2p} / P[u].
double weinstein_quotient(const RadialField& u, const ModelParams& params, const RieszKernel& kernel);

/// Preconditioned descent on J with ‖√K_λ ψ‖ = 1 after every step, then
/// φ = P[ψ]^{-1/(2p-2)} ψ. Throws NoConvergence after max_iters.
GroundStateResult minimize_weinstein(const ModelParams& params, const GridPtr& grid, const RieszKernel& kernel,
                                     const RadialField& init, const GroundStateOptions& opts = {});

/// Runs opts.multistart descents from bubbles of different widths and keeps
/// the lowest J; flags multiple_basins when the J values disagree.
GroundStateResult compute_ground_state(const ModelParams& params, const GridPtr& grid, const RieszKernel& kernel,
                                       const GroundStateOptions& opts = {});

struct SharpConstant {
  double quotient = 0.0;  ///< P[φ] / ‖√K_λ φ‖^{2p}
  double power = 0.0;     ///< P[φ]^{1-p}
  bool agree = false;     ///< within 1e-6 relative
};

SharpConstant sharp_constant(const GroundStateResult& result, const ModelParams& params, const RieszKernel& kernel);

struct GNCheck {
  double ratio = 0.0;
  bool pass = false;
};

/// ratio = P[u] / (C ‖√K_λ u‖^{2p}); pass when ratio ≤ 1 + 1e-6.
GNCheck gn_verify(const RadialField& u, const ModelParams& params, const RieszKernel& kernel, double C);

/// ‖K_λ φ - N[φ]‖ / ‖K_λ φ‖ over all nodes but the outermost.
double el_residual(const RadialField& phi, const ModelParams& params, const RieszKernel& kernel);

/// Checks ‖√K_λ u‖² ≤ E[u] / (1 - c^{(p-1)/p}/p) for focusing energy.
/// Throws PreconditionError unless P[u] < c P[φ].
bool coercivity_check(const RadialField& u, const GroundStateResult& ground, const ModelParams& params,
                      const RieszKernel& kernel, double c);

}  // namespace hartreelab
