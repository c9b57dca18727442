#include <doctest.h>

#include <cmath>
#include <map>

#include "hartreelab/corpus.hpp"
#include "hartreelab/errors.hpp"
#include "hartreelab/experiment.hpp"
#include "hartreelab/functionals.hpp"
#include "hartreelab/groundstate.hpp"
#include "hartreelab/operators.hpp"

using namespace hartreelab;

namespace {

struct Cell {
  ModelParams params;
  GridPtr grid;
  KernelPtr kernel;
  GroundStateResult gs;
};

const Cell& cell(double lambda, int J = 512) {
  static std::map<std::pair<double, int>, Cell> cache;
  auto it = cache.find({lambda, J});
  if (it != cache.end()) return it->second;
  Cell c;
  c.params = derive(3, lambda, 2.0, 0.5, -1);
  c.grid = build_grid(3, 1000.0, J, Mapping::Log, OuterBoundary::HarmonicTail, 1e-7);
  c.kernel = build_riesz_kernel(c.grid, 2.0, cache_dir_from_env());
  c.gs = compute_ground_state(c.params, c.grid, *c.kernel);
  return cache.emplace(std::make_pair(lambda, J), std::move(c)).first->second;
}

}  // namespace

TEST_SUITE("groundstate") {
  TEST_CASE("constraints") {
    CHECK_NOTHROW(check_groundstate_constraints(ModelParams::raw(3, 0.0, 2.0, 0.5, -1)));
    CHECK_THROWS_AS(check_groundstate_constraints(ModelParams::raw(3, 0.0, 2.0, 1.7, -1)), InfeasibleError);
    CHECK_THROWS_AS(check_groundstate_constraints(ModelParams::raw(3, 0.0, 3.5, 0.5, -1)), InfeasibleError);
  }

  TEST_CASE("bubble profile") {
    const auto g = build_grid(3, 100.0, 256, Mapping::Log, OuterBoundary::Dirichlet, 1e-6);
    const auto b = bubble(g);
    for (int j = 0; j < g->size(); j += 31) {
      const double r = g->nodes(j);
      CHECK(b.values(j).real() == doctest::Approx(1.0 / std::sqrt(1.0 + r * r)));
    }
    // r^{-κ} at the origin, r^{-(n-2-κ)} at infinity
    const double k = kappa_of(3, -0.2);
    const auto bk = bubble(g, 1.0, k);
    const double r0 = g->nodes(0), r1 = g->nodes(1);
    CHECK(std::log(bk.values(1).real() / bk.values(0).real()) / std::log(r1 / r0) == doctest::Approx(-k).epsilon(1e-3));
    const int J = g->size();
    const double s = std::log(bk.values(J - 1).real() / bk.values(J - 2).real()) /
                     std::log(g->nodes(J - 1) / g->nodes(J - 2));
    CHECK(s == doctest::Approx(-(1.0 - k)).epsilon(1e-3));
  }

  TEST_CASE("ground state identities on the reference cells") {
    for (double lambda : {-0.2, 0.0, 0.5}) {
      CAPTURE(lambda);
      const auto& c = cell(lambda);
      CHECK(c.gs.converged);
      CHECK(c.gs.pohozaev_residual < 1e-3);
      CHECK(c.gs.el_residual < 1e-3);
      CHECK(el_residual(c.gs.phi, c.params, *c.kernel) == doctest::Approx(c.gs.el_residual));
      // Pohozaev through two separate code paths
      const double P = potential_energy(c.gs.phi, c.params, *c.kernel);
      const double q = quadratic_form_sqrtK(c.gs.phi, c.params);
      CHECK(std::abs(P - q) / q < 1e-3);

      const auto sc = sharp_constant(c.gs, c.params, *c.kernel);
      CHECK(sc.agree);
      CHECK(std::abs(sc.quotient - sc.power) <= 1e-6 * sc.quotient);
      CHECK(sc.quotient * c.gs.J_value == doctest::Approx(1.0).epsilon(1e-6));
      CHECK(gn_verify(c.gs.phi, c.params, *c.kernel, sc.quotient).ratio == doctest::Approx(1.0).epsilon(1e-3));

      CHECK(c.gs.phi.values.real().minCoeff() > 0.0);
      CHECK(c.gs.phi.values.imag().cwiseAbs().maxCoeff() == 0.0);
      // r^{-κ} rises near the origin when λ > 0
      if (lambda <= 0.0)
        for (int j = 0; j + 1 < c.grid->size(); ++j) CHECK(c.gs.phi.values(j + 1).real() <= c.gs.phi.values(j).real());
    }
  }

  TEST_CASE("C is monotone in lambda") {
    // the quadratic form grows with λ, so the best constant shrinks
    CHECK(sharp_constant(cell(-0.2).gs, cell(-0.2).params, *cell(-0.2).kernel).quotient >
          sharp_constant(cell(0.0).gs, cell(0.0).params, *cell(0.0).kernel).quotient);
    CHECK(sharp_constant(cell(0.0).gs, cell(0.0).params, *cell(0.0).kernel).quotient >
          sharp_constant(cell(0.5).gs, cell(0.5).params, *cell(0.5).kernel).quotient);
  }

  TEST_CASE("descent is monotone and the minimizer is a fixed point") {
    const auto& c = cell(0.0);
    for (std::size_t k = 1; k < c.gs.history.size(); ++k)
      CHECK(c.gs.history[k] <= c.gs.history[k - 1] * (1.0 + 1e-12));
    GroundStateOptions opts;
    opts.max_iters = 1;
    opts.allow_unconverged = true;
    const auto again = minimize_weinstein(c.params, c.grid, *c.kernel, c.gs.phi, opts);
    CHECK(std::abs(again.J_value - c.gs.J_value) <= 1e-10 * c.gs.J_value);
  }

  TEST_CASE("grid refinement changes C by less than one percent") {
    const auto& a = cell(0.0, 512);
    const auto& b = cell(0.0, 1024);
    const double Ca = sharp_constant(a.gs, a.params, *a.kernel).quotient;
    const double Cb = sharp_constant(b.gs, b.params, *b.kernel).quotient;
    CHECK(std::abs(Ca - Cb) / Cb < 1e-2);
  }

  TEST_CASE("Gagliardo-Nirenberg holds off the extremal") {
    const auto& c = cell(0.0);
    const double C = sharp_constant(c.gs, c.params, *c.kernel).quotient;
    const auto gauss = sample_real(c.grid, [](double r) { return std::exp(-r * r); });
    CHECK(gn_verify(gauss, c.params, *c.kernel, C).ratio < 1.0);
    FieldRng rng(3);
    for (int k = 0; k < 25; ++k) CHECK(gn_verify(random_radial_field(c.grid, rng), c.params, *c.kernel, C).pass);
  }

  TEST_CASE("the quotient is invariant under scaling") {
    const auto& c = cell(0.0, 1024);
    // mu < 1 keeps the rescaled profile inside the box
    for (double mu : {0.3, 0.7}) {
      for (double delta : {0.1, 2.0}) {
        const auto v = rescale(c.gs.phi, delta, mu);
        CHECK(weinstein_quotient(v, c.params, *c.kernel) ==
              doctest::Approx(c.gs.J_value).epsilon(1e-3));
      }
    }
  }

  TEST_CASE("scaled ground states are not stationary") {
    const auto& c = cell(0.0);
    RadialField twice = c.gs.phi;
    twice.values *= 2.0;
    CHECK(el_residual(twice, c.params, *c.kernel) > 0.5);
  }

  TEST_CASE("coercivity below the ground state") {
    const auto& c = cell(0.0);
    const double Pphi = potential_energy(c.gs.phi, c.params, *c.kernel);
    for (double s : {0.1, 0.3, 0.5, 0.7, 0.85}) {
      RadialField u = c.gs.phi;
      u.values *= s;
      const double mp = potential_energy(u, c.params, *c.kernel) / Pphi;
      CHECK(coercivity_check(u, c.gs, c.params, *c.kernel, mp + 0.01));
    }
    RadialField u = c.gs.phi;
    CHECK_THROWS_AS(coercivity_check(u, c.gs, c.params, *c.kernel, 0.5), PreconditionError);
  }
}
