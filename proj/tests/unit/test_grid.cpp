#include <doctest.h>

#include <cmath>
#include <numbers>

#include "hartreelab/errors.hpp"
#include "hartreelab/grid.hpp"

using namespace hartreelab;

TEST_SUITE("grid") {
  TEST_CASE("unit sphere areas") {
    const double pi = std::numbers::pi;
    CHECK(unit_sphere_area(2) == doctest::Approx(2 * pi));
    CHECK(unit_sphere_area(3) == doctest::Approx(4 * pi));
    CHECK(unit_sphere_area(4) == doctest::Approx(2 * pi * pi));
    CHECK(unit_sphere_area(5) == doctest::Approx(8 * pi * pi / 3));
  }

  TEST_CASE("cell volumes add up to the ball") {
    for (auto mapping : {Mapping::Uniform, Mapping::Log}) {
      for (int n : {3, 4, 6}) {
        const auto g = build_grid(n, 7.0, 100, mapping, OuterBoundary::Dirichlet, 1e-5);
        const double ball = unit_sphere_area(n) * std::pow(7.0, n) / n;
        CHECK(g->weights.sum() == doctest::Approx(ball).epsilon(1e-12));
        CHECK(g->faces(0) == 0.0);
        CHECK(g->faces(100) == doctest::Approx(7.0).epsilon(1e-12));
        for (int j = 0; j < g->size(); ++j) {
          CHECK(g->faces(j) < g->nodes(j));
          CHECK(g->nodes(j) < g->faces(j + 1));
        }
      }
    }
  }

  TEST_CASE("log grid is geometric with the requested innermost node") {
    const auto g = build_grid(3, 1000.0, 512, Mapping::Log, OuterBoundary::HarmonicTail, 1e-7);
    CHECK(g->nodes(0) == doctest::Approx(1e-4));
    const double q = g->nodes(1) / g->nodes(0);
    for (int j = 1; j + 1 < g->size(); ++j) CHECK(g->nodes(j + 1) / g->nodes(j) == doctest::Approx(q));
  }

  TEST_CASE("hash separates geometries and is stable") {
    const auto a = build_grid(3, 10.0, 64, Mapping::Uniform);
    const auto b = build_grid(3, 10.0, 64, Mapping::Uniform);
    CHECK(a->hash() == b->hash());
    CHECK(a->hash() != build_grid(3, 10.0, 65, Mapping::Uniform)->hash());
    CHECK(a->hash() != build_grid(4, 10.0, 64, Mapping::Uniform)->hash());
    CHECK(a->hash() != build_grid(3, 10.0, 64, Mapping::Uniform, OuterBoundary::HarmonicTail)->hash());
  }

  TEST_CASE("power averages are exact cell means") {
    const auto g = build_grid(3, 2.0, 32, Mapping::Uniform);
    const auto avg = g->power_average(2.0);
    // ∫ r^{0} dr / ∫ r² dr over [a, b] for n = 3, b = 2
    for (int j = 1; j < g->size(); ++j) {
      const double a = g->faces(j), b = g->faces(j + 1);
      CHECK(avg(j) == doctest::Approx((b - a) / ((b * b * b - a * a * a) / 3.0)));
    }
  }

  TEST_CASE("invalid grids are rejected") {
    CHECK_THROWS_AS(build_grid(3, 10.0, 8, Mapping::Uniform), DomainError);
    CHECK_THROWS_AS(build_grid(3, -1.0, 64, Mapping::Uniform), DomainError);
    CHECK_THROWS_AS(build_grid(3, 10.0, 64, Mapping::Log, OuterBoundary::Dirichlet, 2.0), DomainError);
  }

  TEST_CASE("resampling a smooth profile") {
    const auto coarse = build_grid(3, 20.0, 400, Mapping::Uniform);
    const auto fine = build_grid(3, 20.0, 1000, Mapping::Log, OuterBoundary::Dirichlet, 1e-4);
    auto f = [](double r) { return std::exp(-r * r) * std::cos(r); };
    const auto u = resample(sample_real(coarse, f), fine);
    double err = 0.0;
    for (int j = 0; j < fine->size(); ++j) err = std::max(err, std::abs(u.values(j) - f(fine->nodes(j))));
    CHECK(err < 1e-5);
  }

  TEST_CASE("rescale evaluates delta u(mu r)") {
    const auto g = build_grid(3, 20.0, 2000, Mapping::Uniform);
    const auto u = sample_real(g, [](double r) { return std::exp(-r * r); });
    const auto v = rescale(u, 2.0, 0.5);
    for (int j = 0; j < 200; j += 17)
      CHECK(v.values(j).real() == doctest::Approx(2.0 * std::exp(-0.25 * std::pow(g->nodes(j), 2))).epsilon(1e-6));
  }
}
