#pragma once

#include <Eigen/Dense>
#include <filesystem>
#include <memory>
#include <optional>

#include "hartreelab/grid.hpp"

namespace hartreelab {

/// Γ((n-α)/2) / (Γ(α/2) π^{n/2} 2^α).
double riesz_normalization(int n, double alpha);

/// Mean of |x - y|^{-s} over the directions of y, with |x| = 1 and
/// |y| = rho in [0, 1]. Closed forms for n = 3 and for s = n - 2; graded
/// Gauss quadrature in the polar angle otherwise.
double sphere_mean_power(int n, double s, double rho);

/// Radial Riesz interaction on a grid, with g taken piecewise constant on
/// the cells:
///   interaction(i,j) = c ∫_{cell i}∫_{cell j} |x-y|^{α-n} dx dy
///   dilation(i,j)    = c ∫_{cell i}∫_{cell j} (r∂_r - (α-n)/2) |x-y|^{α-n} dx dy
/// with r = |x|. The first is symmetric and nonnegative, the second
/// antisymmetric. (I_α * g)(r_i) ≈ Σ_j K_ij g_j with K = W^{-1} interaction.
struct RieszKernel {
  GridPtr grid;
  double alpha = 2.0;
  double normalization = 0.0;
  Eigen::MatrixXd interaction;
  Eigen::MatrixXd dilation;

  /// K_ij = interaction(i,j) / w_i.
  Eigen::MatrixXd matrix() const;
  /// (I_α * g) averaged over each cell.
  Eigen::VectorXd potential(const Eigen::VectorXd& g) const;
};

using KernelPtr = std::shared_ptr<const RieszKernel>;

/// When `cache_dir` is set, kernels are read from and written to
/// <cache_dir>/riesz-n<n>-a<alpha>-<grid hash>.bin.
KernelPtr build_riesz_kernel(const GridPtr& grid, double alpha,
                             const std::optional<std::filesystem::path>& cache_dir = std::nullopt);

std::filesystem::path kernel_cache_file(const std::filesystem::path& dir, const RadialGrid& grid, double alpha);

}  // namespace hartreelab
