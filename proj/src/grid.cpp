#include "hartreelab/grid.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>

#include "hartreelab/errors.hpp"

namespace hartreelab {

const char* to_string(Mapping m) { return m == Mapping::Uniform ? "uniform" : "log"; }

Mapping mapping_from_string(const std::string& s) {
  if (s == "uniform") return Mapping::Uniform;
  if (s == "log" || s == "log-mapped") return Mapping::Log;
  throw DomainError("unknown grid mapping '" + s + "' (expected uniform|log)");
}

const char* to_string(OuterBoundary b) {
  return b == OuterBoundary::Dirichlet ? "dirichlet" : "harmonic-tail";
}

OuterBoundary boundary_from_string(const std::string& s) {
  if (s == "dirichlet") return OuterBoundary::Dirichlet;
  if (s == "harmonic-tail" || s == "harmonic") return OuterBoundary::HarmonicTail;
  throw DomainError("unknown outer boundary '" + s + "' (expected dirichlet|harmonic-tail)");
}

double unit_sphere_area(int n) { return 2.0 * std::pow(M_PI, 0.5 * n) / std::tgamma(0.5 * n); }

double RadialGrid::sphere_area() const { return unit_sphere_area(n); }

Eigen::VectorXd RadialGrid::power_average(double b) const {
  const int J = size();
  Eigen::VectorXd out(J);
  const double m = n - b;  // exponent of the primitive
  for (int j = 0; j < J; ++j) {
    const double lo = faces(j), hi = faces(j + 1);
    double num;
    if (std::abs(m) < 1e-14) {
      num = lo > 0.0 ? std::log(hi / lo) : std::numeric_limits<double>::infinity();
    } else if (m < 0.0 && lo == 0.0) {
      num = std::numeric_limits<double>::infinity();
    } else {
      num = (std::pow(hi, m) - std::pow(lo, m)) / m;
    }
    const double den = (std::pow(hi, n) - std::pow(lo, n)) / n;
    out(j) = std::isfinite(num) ? num / den : std::pow(nodes(j), -b);
  }
  return out;
}

std::uint64_t RadialGrid::hash() const {
  std::uint64_t h = 1469598103934665603ULL;
  auto mix = [&h](const void* data, std::size_t len) {
    const auto* bytes = static_cast<const unsigned char*>(data);
    for (std::size_t i = 0; i < len; ++i) {
      h ^= bytes[i];
      h *= 1099511628211ULL;
    }
  };
  const int tags[3] = {n, static_cast<int>(mapping), static_cast<int>(boundary)};
  mix(tags, sizeof(tags));
  mix(nodes.data(), sizeof(double) * nodes.size());
  mix(faces.data(), sizeof(double) * faces.size());
  return h;
}

GridPtr build_grid(int n, double r_max, int cells, Mapping mapping, OuterBoundary boundary,
                   double r_min_fraction) {
  if (n < 1) throw DomainError("grid dimension must be positive");
  if (!(r_max > 0.0)) throw DomainError("R_max must be positive");
  if (cells < 16) throw DomainError("at least 16 cells required, got " + std::to_string(cells));

  auto g = std::make_shared<RadialGrid>();
  g->n = n;
  g->mapping = mapping;
  g->boundary = boundary;
  g->r_max = r_max;
  g->nodes.resize(cells);
  g->faces.resize(cells + 1);

  if (mapping == Mapping::Uniform) {
    const double h = r_max / cells;
    for (int j = 0; j <= cells; ++j) g->faces(j) = j * h;
    for (int j = 0; j < cells; ++j) g->nodes(j) = (j + 0.5) * h;
  } else {
    if (!(r_min_fraction > 0.0 && r_min_fraction < 1.0))
      throw DomainError("log grid needs 0 < r_min_fraction < 1");
    const double r_min = r_min_fraction * r_max;
    const double log_q = std::log(r_max / r_min) / (cells - 0.5);
    for (int j = 0; j < cells; ++j) g->nodes(j) = r_min * std::exp(j * log_q);
    g->faces(0) = 0.0;
    for (int j = 1; j < cells; ++j) g->faces(j) = g->nodes(j - 1) * std::exp(0.5 * log_q);
    g->faces(cells) = r_max;
  }

  const double area = unit_sphere_area(n);
  g->weights.resize(cells);
  for (int j = 0; j < cells; ++j)
    g->weights(j) = area * (std::pow(g->faces(j + 1), n) - std::pow(g->faces(j), n)) / n;
  return g;
}

RadialField sample(const GridPtr& grid, const std::function<std::complex<double>(double)>& f) {
  RadialField u(grid);
  for (int j = 0; j < grid->size(); ++j) u.values(j) = f(grid->nodes(j));
  return u;
}

RadialField sample_real(const GridPtr& grid, const std::function<double(double)>& f) {
  return sample(grid, [&f](double r) { return std::complex<double>(f(r), 0.0); });
}

namespace {

// Value of u at radius x by 4-point Lagrange interpolation. The profile is
// extended evenly through the origin and oddly through R_max.
std::complex<double> interpolate_at(const RadialField& u, double x) {
  const auto& g = *u.grid;
  const int J = g.size();
  if (x >= g.r_max) return 0.0;
  auto node = [&](int k) -> double {
    if (k < 0) return -g.nodes(-k - 1);
    if (k >= J) return 2.0 * g.r_max - g.nodes(2 * J - 1 - k);
    return g.nodes(k);
  };
  auto value = [&](int k) -> std::complex<double> {
    if (k < 0) return u.values(-k - 1);
    if (k >= J) return -u.values(2 * J - 1 - k);
    return u.values(k);
  };
  const double* begin = g.nodes.data();
  int k = static_cast<int>(std::upper_bound(begin, begin + J, x) - begin) - 1;  // node(k) <= x
  std::complex<double> acc = 0.0;
  for (int a = k - 1; a <= k + 2; ++a) {
    double basis = 1.0;
    for (int b = k - 1; b <= k + 2; ++b)
      if (b != a) basis *= (x - node(b)) / (node(a) - node(b));
    acc += basis * value(a);
  }
  return acc;
}

}  // namespace

RadialField resample(const RadialField& u, const GridPtr& target) {
  if (u.grid->size() < 4) throw DomainError("resample needs at least 4 nodes");
  RadialField out(target);
  for (int j = 0; j < target->size(); ++j) out.values(j) = interpolate_at(u, target->nodes(j));
  return out;
}

RadialField rescale(const RadialField& u, double delta, double mu) {
  RadialField out(u.grid);
  for (int j = 0; j < u.size(); ++j) out.values(j) = delta * interpolate_at(u, mu * u.grid->nodes(j));
  return out;
}

}  // namespace hartreelab
