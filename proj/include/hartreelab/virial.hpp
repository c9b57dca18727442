#pragma once

#include <Eigen/Dense>
#include <vector>

#include "hartreelab/grid.hpp"
#include "hartreelab/params.hpp"
#include "hartreelab/riesz.hpp"

namespace hartreelab {

/// Localized virial weight φ_R. Equal to r²/2 on [0, R], constant on
/// [2R, ∞), and a degree-7 polynomial bridge in between chosen so that φ_R
/// is C⁴ and φ_R'' ≤ 1.
struct MultiplierProfile {
  GridPtr grid;
  double R = 0.0;  ///< infinity for the global r²/2 weight
  Eigen::VectorXd phi;
  Eigen::VectorXd dphi;
  Eigen::VectorXd d2phi;
  Eigen::VectorXd lap;
  Eigen::VectorXd bilap;
  Eigen::VectorXd d2phi_face;  ///< φ'' on the interior faces
  Eigen::VectorXd dphi_over_r;
};

/// k-th radial derivative of φ_R at r, k = 0..4.
double multiplier_derivative(double R, double r, int k);

/// Throws DomainError if 2R ≥ R_max.
MultiplierProfile build_multiplier(const GridPtr& grid, double R);

/// φ = r²/2 on the whole grid.
MultiplierProfile quadratic_multiplier(const GridPtr& grid);

/// ∫φ_R|u|².
double variance(const RadialField& u, const MultiplierProfile& m);

/// 2 Im ∫ ū φ_R' ∂_r u, in the face form that is the exact time derivative
/// of the discrete variance under the semi-discrete flow.
double morawetz_action(const RadialField& u, const MultiplierProfile& m);

struct VirialTerms {
  double hessian = 0.0;         ///< 4∫φ''|∂_r u|²
  double bilaplacian = 0.0;     ///< -∫Δ²φ|u|²
  double inverse_square = 0.0;  ///< 4λ∫φ'|u|²/r³
  double B1 = 0.0;
  double B2 = 0.0;
  double B3 = 0.0;

  double total() const { return hessian + bilaplacian + inverse_square + B1 + B2 + B3; }
  double nonlinear() const { return B1 + B2 + B3; }
};

/// Analytic V_R''. For the quadratic weight the linear terms add up to
/// 4‖√K_λ u‖² and the nonlinear ones to 4εP[u].
VirialTerms virial_rhs(const RadialField& u, const MultiplierProfile& m, const ModelParams& params,
                       const RieszKernel& kernel);

struct VirialReport {
  double t = 0.0;
  double V = 0.0;
  double M = 0.0;
  double V2_analytic = 0.0;
  double V2_fd = 0.0;
  VirialTerms terms;
  double scale = 0.0;  ///< max(|V2_analytic|, 4‖√K_λ u‖²)
  double residual = 0.0;
};

/// Centered second differences of V_R against the analytic identity at the
/// interior samples of a trajectory with uniform spacing. Throws
/// CadenceError with fewer than three samples or uneven spacing.
std::vector<VirialReport> virial_residual(const std::vector<RadialField>& fields, const std::vector<double>& times,
                                          const MultiplierProfile& m, const ModelParams& params,
                                          const RieszKernel& kernel);

struct DecayFit {
  std::vector<double> R;
  std::vector<double> excess;  ///< V_R'' - 4(‖√K_λ u‖² + εP[u]), which is V_R'' - 4I[u] when focusing
  double slope = 0.0;          ///< least-squares slope of log|excess| against log R
  double bound = 0.0;          ///< -min(2τ, 2) + 0.3
  bool pass = false;
};

/// R-sweep of the localization excess on a fixed snapshot.
DecayFit virial_decay(const RadialField& u, const std::vector<double>& radii, const ModelParams& params,
                      const RieszKernel& kernel);

}  // namespace hartreelab
