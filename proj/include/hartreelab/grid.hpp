#pragma once

#include <Eigen/Dense>
#include <complex>
#include <cstdint>
#include <functional>
#include <memory>
#include <string>

namespace hartreelab {

enum class Mapping { Uniform, Log };
const char* to_string(Mapping m);
Mapping mapping_from_string(const std::string& s);

/// Outer boundary treatment at R_max.
///  - Dirichlet: u = 0 on the outer face.
///  - HarmonicTail: the field is continued outside R_max by the decaying
///    solution r^{-(n-2-κ)} of K_λ u = 0; its exterior energy enters the
///    quadratic form as a boundary term.
enum class OuterBoundary { Dirichlet, HarmonicTail };
const char* to_string(OuterBoundary b);
OuterBoundary boundary_from_string(const std::string& s);

/// Cell-centred radial mesh on [0, R_max]. Node j sits inside the cell
/// [faces(j), faces(j+1)], with faces(0) = 0 and faces(J) = R_max, and
/// weights(j) is the exact n-dimensional volume of that spherical shell.
/// Immutable once built; share it through GridPtr.
struct RadialGrid {
  int n = 3;
  Mapping mapping = Mapping::Uniform;
  OuterBoundary boundary = OuterBoundary::Dirichlet;
  double r_max = 0.0;
  Eigen::VectorXd nodes;
  Eigen::VectorXd faces;
  Eigen::VectorXd weights;

  int size() const { return static_cast<int>(nodes.size()); }
  bool coarse() const { return size() < 64; }
  /// Area of the unit sphere S^{n-1}.
  double sphere_area() const;
  /// Cell average of r^{-b}: ∫_cell r^{n-1-b} dr / ∫_cell r^{n-1} dr. Falls
  /// back to the nodal value when the innermost cell integral diverges.
  Eigen::VectorXd power_average(double b) const;
  /// Stable 64-bit fingerprint of the geometry (n, mapping, nodes, faces, bc).
  std::uint64_t hash() const;
};

using GridPtr = std::shared_ptr<const RadialGrid>;

/// r_min_fraction sets the innermost node of a log-mapped grid as a fraction
/// of R_max; it is ignored for uniform grids.
GridPtr build_grid(int n, double r_max, int cells, Mapping mapping,
                   OuterBoundary boundary = OuterBoundary::Dirichlet,
                   double r_min_fraction = 1e-4);

double unit_sphere_area(int n);

/// Complex radial profile on a grid.
struct RadialField {
  GridPtr grid;
  Eigen::VectorXcd values;

  RadialField() = default;
  RadialField(GridPtr g, Eigen::VectorXcd v) : grid(std::move(g)), values(std::move(v)) {}
  explicit RadialField(GridPtr g) : grid(std::move(g)), values(Eigen::VectorXcd::Zero(grid->size())) {}

  int size() const { return static_cast<int>(values.size()); }
  bool finite() const { return values.allFinite(); }
  double max_abs() const { return values.size() ? values.cwiseAbs().maxCoeff() : 0.0; }
};

RadialField sample(const GridPtr& grid, const std::function<std::complex<double>(double)>& f);
RadialField sample_real(const GridPtr& grid, const std::function<double(double)>& f);

/// Piecewise-cubic interpolation of `u` onto `target` (zero beyond R_max).
RadialField resample(const RadialField& u, const GridPtr& target);

/// u(x) -> delta u(mu x), evaluated by interpolation on the same grid.
RadialField rescale(const RadialField& u, double delta, double mu);

}  // namespace hartreelab
