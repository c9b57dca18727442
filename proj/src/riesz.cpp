#include "hartreelab/riesz.hpp"

#include <boost/math/interpolators/cardinal_cubic_b_spline.hpp>
#include <boost/math/quadrature/gauss.hpp>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <functional>
#include <memory>
#include <vector>

#include "hartreelab/errors.hpp"

namespace hartreelab {

namespace {

using boost::math::quadrature::gauss;

struct Rule {
  std::vector<double> x, w;
  void add(double a, double b, int points) {
    auto push = [&](const auto& abscissa, const auto& weights) {
      const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
      for (std::size_t k = 0; k < abscissa.size(); ++k) {
        x.push_back(mid + half * abscissa[k]);
        w.push_back(half * weights[k]);
        x.push_back(mid - half * abscissa[k]);
        w.push_back(half * weights[k]);
      }
    };
    switch (points) {
      case 4: push(gauss<double, 4>::abscissa(), gauss<double, 4>::weights()); break;
      case 8: push(gauss<double, 8>::abscissa(), gauss<double, 8>::weights()); break;
      default: push(gauss<double, 12>::abscissa(), gauss<double, 12>::weights()); break;
    }
  }
};

// Gauss pieces on [a,b] shrinking geometrically toward one end.
Rule graded(double a, double b, bool toward_b, int levels, int points = 8) {
  Rule rule;
  const double len = b - a;
  double lo = 0.5, hi = 1.0;
  for (int k = 0; k < levels; ++k) {
    if (toward_b) rule.add(b - hi * len, b - lo * len, points);
    else rule.add(a + lo * len, a + hi * len, points);
    hi = lo;
    lo *= 0.5;
  }
  if (toward_b) rule.add(b - hi * len, b, points);
  else rule.add(a, a + hi * len, points);
  return rule;
}

Rule plain(double a, double b, int points) {
  Rule rule;
  rule.add(a, b, points);
  return rule;
}

double small_rho_series(int n, double s, double rho) {
  return 1.0 + s * (s - n + 2.0) / (2.0 * n) * rho * rho;
}

double sphere_mean_numeric(int n, double s, double rho) {
  const double pre = unit_sphere_area(n - 1) / unit_sphere_area(n);
  auto f = [&](double th) {
    const double sh = std::sin(0.5 * th);
    const double d2 = (1.0 - rho) * (1.0 - rho) + 4.0 * rho * sh * sh;
    return std::pow(d2, -0.5 * s) * std::pow(std::sin(th), n - 2);
  };
  Rule rule;
  double edge = std::max(1.0 - rho, 1e-15);
  if (edge >= 0.5 * M_PI) {
    rule.add(0.0, 0.5 * M_PI, 12);
    rule.add(0.5 * M_PI, M_PI, 12);
  } else {
    rule.add(0.0, edge, 8);
    while (2.0 * edge < M_PI) {
      rule.add(edge, 2.0 * edge, 8);
      edge *= 2.0;
    }
    rule.add(edge, M_PI, 8);
  }
  double acc = 0.0;
  for (std::size_t k = 0; k < rule.x.size(); ++k) acc += rule.w[k] * f(rule.x[k]);
  return pre * acc;
}

// (1 - rho²) times the mean of |x-y|^{-(n-α+2)}.
double dilation_profile(int n, double alpha, double rho) {
  if (std::abs(alpha - 2.0) < 1e-14) return 1.0;
  if (n == 3) {
    if (rho < 1e-3) return (1.0 - rho * rho) * small_rho_series(3, 5.0 - alpha, rho);
    const double a = alpha - 3.0;
    return ((1.0 - rho) * std::pow(1.0 + rho, alpha - 2.0) - (1.0 + rho) * std::pow(1.0 - rho, alpha - 2.0)) /
           (2.0 * rho * a);
  }
  return (1.0 - rho * rho) * sphere_mean_power(n, n - alpha + 2.0, rho);
}

// f(rho) tabulated in x = -log(1 - rho) after removing the endpoint power
// (1 - rho)^{-e}; smooth in x on the whole range, so a cubic spline suffices.
class ProfileTable {
 public:
  ProfileTable(std::function<double(double)> f, double e) : f_(std::move(f)), e_(e) {
    std::vector<double> y(static_cast<std::size_t>(kXMax / kStep) + 2);
    for (std::size_t k = 0; k < y.size(); ++k) {
      const double x = k * kStep;
      y[k] = f_(-std::expm1(-x)) * std::exp(-e_ * x);
    }
    spline_ = std::make_unique<boost::math::interpolators::cardinal_cubic_b_spline<double>>(y.begin(), y.end(),
                                                                                            0.0, kStep);
  }

  double operator()(double rho) const {
    const double x = -std::log1p(-rho);
    if (!(x < kXMax)) return f_(rho);
    return (*spline_)(x) * std::exp(e_ * x);
  }

 private:
  static constexpr double kXMax = 36.0;
  static constexpr double kStep = 1.0 / 128.0;
  std::function<double(double)> f_;
  double e_;
  std::unique_ptr<boost::math::interpolators::cardinal_cubic_b_spline<double>> spline_;
};

struct PairKernel {
  int n;
  double alpha;
  std::shared_ptr<const ProfileTable> mean_table, dilation_table;  // only where no closed form exists

  PairKernel(int n_, double alpha_) : n(n_), alpha(alpha_) {
    if (n == 3 || std::abs(alpha - 2.0) < 1e-14) return;
    // mean of |x-y|^{-s} grows like (1-rho)^{n-1-s} when s > n-1
    const double s = n - alpha;
    mean_table = std::make_shared<ProfileTable>([n_, s](double rho) { return sphere_mean_power(n_, s, rho); },
                                                std::max(0.0, s - (n - 1.0)));
    dilation_table = std::make_shared<ProfileTable>(
        [n_, alpha_](double rho) { return dilation_profile(n_, alpha_, rho); }, std::max(0.0, 2.0 - alpha));
  }

  // A(r,s) = mean of |x-y|^{α-n} over directions, |x| = r, |y| = s.
  double mean(double r, double s) const {
    const double big = std::max(r, s);
    const double rho = std::min(r, s) / big;
    return std::pow(big, alpha - n) * (mean_table ? (*mean_table)(rho) : sphere_mean_power(n, n - alpha, rho));
  }
  // (r∂_r - (α-n)/2) A(r,s).
  double dilation(double r, double s) const {
    if (r == s) return 0.0;
    const double big = std::max(r, s);
    const double sign = r > s ? 1.0 : -1.0;
    const double rho = std::min(r, s) / big;
    const double prof = dilation_table ? (*dilation_table)(rho) : dilation_profile(n, alpha, rho);
    return 0.5 * (alpha - n) * sign * std::pow(big, alpha - n) * prof;
  }
};

constexpr int kLevels = 14;

void integrate_cells(const PairKernel& k, int n, double a, double b, double c, double d, int mode, double& s_out,
                     double& t_out) {
  // mode 0: far cells, 1: next-to-adjacent, 2: adjacent (b == c)
  const Rule ri = mode == 2 ? graded(a, b, true, kLevels) : plain(a, b, mode == 1 ? 12 : 4);
  const Rule rj = mode == 2 ? graded(c, d, false, kLevels) : plain(c, d, mode == 1 ? 12 : 4);
  double s_acc = 0.0, t_acc = 0.0;
  for (std::size_t p = 0; p < ri.x.size(); ++p) {
    const double r = ri.x[p];
    const double wr = ri.w[p] * std::pow(r, n - 1);
    for (std::size_t q = 0; q < rj.x.size(); ++q) {
      const double s = rj.x[q];
      const double w = wr * rj.w[q] * std::pow(s, n - 1);
      s_acc += w * k.mean(r, s);
      t_acc += w * k.dilation(r, s);
    }
  }
  s_out = s_acc;
  t_out = t_acc;
}

double integrate_self(const PairKernel& k, int n, double a, double b) {
  // 2 ∫_a^b ∫_a^r A(r,s) r^{n-1} s^{n-1} ds dr
  const Rule outer = graded(a, b, false, kLevels);
  double acc = 0.0;
  for (std::size_t p = 0; p < outer.x.size(); ++p) {
    const double r = outer.x[p];
    const Rule inner = graded(a, r, true, kLevels);
    double in = 0.0;
    for (std::size_t q = 0; q < inner.x.size(); ++q)
      in += inner.w[q] * std::pow(inner.x[q], n - 1) * k.mean(r, inner.x[q]);
    acc += outer.w[p] * std::pow(r, n - 1) * in;
  }
  return 2.0 * acc;
}

constexpr char kMagic[8] = {'H', 'L', 'R', 'K', '0', '0', '2', '\0'};

bool read_cache(const std::filesystem::path& file, const RadialGrid& g, double alpha, RieszKernel& out) {
  std::ifstream in(file, std::ios::binary);
  if (!in) return false;
  char magic[8];
  int n = 0, J = 0;
  double a = 0.0;
  std::uint64_t hash = 0;
  in.read(magic, 8);
  in.read(reinterpret_cast<char*>(&n), sizeof n);
  in.read(reinterpret_cast<char*>(&J), sizeof J);
  in.read(reinterpret_cast<char*>(&a), sizeof a);
  in.read(reinterpret_cast<char*>(&hash), sizeof hash);
  if (!in || std::memcmp(magic, kMagic, 8) != 0 || n != g.n || J != g.size() || a != alpha || hash != g.hash())
    return false;
  out.interaction.resize(J, J);
  out.dilation.resize(J, J);
  const auto bytes = static_cast<std::streamsize>(sizeof(double)) * J * J;
  in.read(reinterpret_cast<char*>(out.interaction.data()), bytes);
  in.read(reinterpret_cast<char*>(out.dilation.data()), bytes);
  return static_cast<bool>(in) && out.interaction.allFinite() && out.dilation.allFinite();
}

void write_cache(const std::filesystem::path& file, const RadialGrid& g, const RieszKernel& k) {
  std::error_code ec;
  std::filesystem::create_directories(file.parent_path(), ec);
  const auto tmp = file.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) return;
    const int n = g.n, J = g.size();
    const std::uint64_t hash = g.hash();
    out.write(kMagic, 8);
    out.write(reinterpret_cast<const char*>(&n), sizeof n);
    out.write(reinterpret_cast<const char*>(&J), sizeof J);
    out.write(reinterpret_cast<const char*>(&k.alpha), sizeof k.alpha);
    out.write(reinterpret_cast<const char*>(&hash), sizeof hash);
    const auto bytes = static_cast<std::streamsize>(sizeof(double)) * J * J;
    out.write(reinterpret_cast<const char*>(k.interaction.data()), bytes);
    out.write(reinterpret_cast<const char*>(k.dilation.data()), bytes);
    if (!out) return;
  }
  std::filesystem::rename(tmp, file, ec);
}

}  // namespace

double riesz_normalization(int n, double alpha) {
  return std::tgamma(0.5 * (n - alpha)) / (std::tgamma(0.5 * alpha) * std::pow(M_PI, 0.5 * n) * std::pow(2.0, alpha));
}

double sphere_mean_power(int n, double s, double rho) {
  if (rho < 0.0 || rho > 1.0) throw DomainError("sphere_mean_power: rho must lie in [0,1]");
  if (s == 0.0) return 1.0;
  if (std::abs(s - (n - 2.0)) < 1e-14) return 1.0;  // harmonic kernel
  if (rho < 1e-3) return small_rho_series(n, s, rho);
  if (n == 3) {
    if (std::abs(s - 2.0) < 1e-14) return (std::log1p(rho) - std::log1p(-rho)) / (2.0 * rho);
    return (std::pow(1.0 + rho, 2.0 - s) - std::pow(1.0 - rho, 2.0 - s)) / (2.0 * rho * (2.0 - s));
  }
  return sphere_mean_numeric(n, s, rho);
}

Eigen::MatrixXd RieszKernel::matrix() const {
  return grid->weights.cwiseInverse().asDiagonal() * interaction;
}

Eigen::VectorXd RieszKernel::potential(const Eigen::VectorXd& g) const {
  return (interaction * g).cwiseQuotient(grid->weights);
}

std::filesystem::path kernel_cache_file(const std::filesystem::path& dir, const RadialGrid& grid, double alpha) {
  char name[96];
  std::snprintf(name, sizeof name, "riesz-n%d-a%a-%016llx.bin", grid.n, alpha,
                static_cast<unsigned long long>(grid.hash()));
  return dir / name;
}

KernelPtr build_riesz_kernel(const GridPtr& grid, double alpha,
                             const std::optional<std::filesystem::path>& cache_dir) {
  const int n = grid->n;
  if (!(alpha > 0.0 && alpha < n)) throw DomainError("Riesz order must satisfy 0 < alpha < n");
  auto k = std::make_shared<RieszKernel>();
  k->grid = grid;
  k->alpha = alpha;
  k->normalization = riesz_normalization(n, alpha);

  std::filesystem::path file;
  if (cache_dir) {
    file = kernel_cache_file(*cache_dir, *grid, alpha);
    if (read_cache(file, *grid, alpha, *k)) return k;
  }

  const int J = grid->size();
  const PairKernel pk{n, alpha};
  const double scale = k->normalization * std::pow(grid->sphere_area(), 2);
  k->interaction.setZero(J, J);
  k->dilation.setZero(J, J);
  const auto& f = grid->faces;
  for (int i = 0; i < J; ++i) {
    k->interaction(i, i) = scale * integrate_self(pk, n, f(i), f(i + 1));
    for (int j = i + 1; j < J; ++j) {
      const int mode = j == i + 1 ? 2 : (j == i + 2 ? 1 : 0);
      double s = 0.0, t = 0.0;
      integrate_cells(pk, n, f(i), f(i + 1), f(j), f(j + 1), mode, s, t);
      k->interaction(i, j) = k->interaction(j, i) = scale * s;
      k->dilation(i, j) = scale * t;
      k->dilation(j, i) = -scale * t;
    }
  }
  if (!k->interaction.allFinite() || !k->dilation.allFinite())
    throw NonFinite("Riesz kernel quadrature produced non-finite entries");
  if (cache_dir) write_cache(file, *grid, *k);
  return k;
}

}  // namespace hartreelab
