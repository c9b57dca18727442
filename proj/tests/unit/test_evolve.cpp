#include <doctest.h>

#include <cmath>

#include "hartreelab/errors.hpp"
#include "hartreelab/evolve.hpp"
#include "hartreelab/experiment.hpp"
#include "hartreelab/functionals.hpp"

using namespace hartreelab;

namespace {

GridPtr box(int J = 1024, double R = 40.0) { return build_grid(3, R, J, Mapping::Uniform, OuterBoundary::Dirichlet); }

RadialField gaussian(const GridPtr& g, double a = 1.0) {
  return sample_real(g, [a](double r) { return a * std::exp(-r * r); });
}

DiagnosticsRecord rec(double g, double dt) {
  DiagnosticsRecord d;
  d.gradnorm = g;
  d.dt = dt;
  return d;
}

double max_energy_drift(const RunResult& r) {
  const double E0 = r.trajectory.front().E;
  double d = 0.0;
  for (const auto& x : r.trajectory) d = std::max(d, std::abs(x.E - E0) / std::abs(E0));
  return d;
}

}  // namespace

TEST_SUITE("evolve") {
  TEST_CASE("free Gaussian spreading") {
    // u_t = iΔu from e^{-r²} (A = 1/4): u = (A/(A+it))^{3/2} exp(-r²/(4(A+it)))
    const auto params = derive(3, 0.0, 2.0, 0.5, 1);
    auto error = [&](int J) {
      const auto g = box(J);
      const auto u = build_propagator(g, params, 0.5).apply(gaussian(g));
      const std::complex<double> s(0.25, 0.5);
      double err = 0.0;
      for (int j = 0; j < g->size(); ++j) {
        const double r = g->nodes(j);
        const auto exact = std::pow(0.25 / s, 1.5) * std::exp(-r * r / (4.0 * s));
        err = std::max(err, std::abs(u.values(j) - exact));
      }
      return err;
    };
    const double e1 = error(512), e2 = error(1024);
    CHECK(e2 < 5e-4);
    CHECK(e1 / e2 == doctest::Approx(4.0).epsilon(0.15));
  }

  TEST_CASE("linear flow is unitary and a group") {
    const auto g = build_grid(3, 1000.0, 512, Mapping::Log, OuterBoundary::HarmonicTail, 1e-7);
    const auto params = derive(3, -0.2, 2.0, 0.5, -1);
    const auto prop = build_propagator(g, params, 1e-3);
    CHECK(prop.eigenvalues.minCoeff() > 0.0);
    const auto u = sample_real(g, [](double r) { return 1.0 / (1.0 + r * r); });
    const auto a = prop.apply(prop.apply(u, 0.3), 0.4);
    const auto b = prop.apply(u, 0.7);
    CHECK((a.values - b.values).norm() <= 1e-8 * u.values.norm());
    CHECK(mass(b) == doctest::Approx(mass(u)).epsilon(1e-12));
    const auto back = prop.apply(b, -0.7);
    CHECK((back.values - u.values).norm() <= 1e-10 * u.values.norm());
    const auto c = prop.to_modes(u.values);
    CHECK(c.squaredNorm() == doctest::Approx(mass(u)).epsilon(1e-12));
    CHECK((prop.from_modes(c) - u.values).norm() <= 1e-12 * u.values.norm());
  }

  TEST_CASE("nonlinear phase preserves the modulus") {
    const auto g = box(256);
    const auto params = derive(3, 0.0, 2.0, 0.5, -1);
    const auto K = build_riesz_kernel(g, 2.0);
    const auto u = gaussian(g, 2.0);
    const auto v = nonlinear_phase(u, params, *K, 0.1);
    CHECK((v.values.cwiseAbs() - u.values.cwiseAbs()).norm() <= 1e-14 * u.values.norm());
  }

  TEST_CASE("Strang step is time reversible") {
    const auto g = box(256);
    const auto params = derive(3, 0.0, 2.0, 0.5, -1);
    const auto K = build_riesz_kernel(g, 2.0);
    const auto prop = build_propagator(g, params, 1e-2);
    EvolutionState s{gaussian(g, 1.5), 0.0, 0, false};
    const auto u0 = s.u;
    for (int k = 0; k < 10; ++k) s = step(s, 1e-2, params, *K, prop);
    for (int k = 0; k < 10; ++k) s = step(s, -1e-2, params, *K, prop);
    CHECK((s.u.values - u0.values).norm() <= 1e-11 * u0.values.norm());
    CHECK(std::abs(s.t) < 1e-14);
  }

  TEST_CASE("defocusing run conserves mass and energy at second order") {
    const auto g = box(512);
    const auto params = derive(3, 0.0, 2.0, 0.5, 1);
    const auto K = build_riesz_kernel(g, 2.0, cache_dir_from_env());
    RunOptions opts;
    opts.T = 0.25;
    opts.cadence = 1;
    opts.adaptive = false;
    opts.dt = 2e-3;
    const auto a = run(gaussian(g), params, *K, opts);
    opts.dt = 1e-3;
    const auto b = run(gaussian(g), params, *K, opts);
    CHECK(a.verdict == RunVerdict::Completed);
    CHECK(b.verdict == RunVerdict::Completed);
    CHECK(std::abs(b.trajectory.back().M - b.trajectory.front().M) < 1e-10 * b.trajectory.front().M);
    const double ratio = max_energy_drift(a) / max_energy_drift(b);
    CHECK(ratio > 3.5);
    CHECK(ratio < 4.5);
    CHECK(b.trajectory.back().t == doctest::Approx(0.25));
    CHECK(b.trajectory.size() == 251);
  }

  TEST_CASE("sampling cadence") {
    const auto g = box(128);
    const auto params = derive(3, 0.0, 2.0, 0.5, 1);
    const auto K = build_riesz_kernel(g, 2.0);
    RunOptions opts;
    opts.T = 0.1;
    opts.dt = 1e-3;
    opts.cadence = 30;
    opts.store_fields = true;
    const auto r = run(gaussian(g), params, *K, opts);
    // t = 0, 0.03, 0.06, 0.09 and the final step
    REQUIRE(r.trajectory.size() == 5);
    CHECK(r.fields.size() == 5);
    CHECK(r.trajectory[1].t == doctest::Approx(0.03));
    CHECK(r.trajectory.back().t == doctest::Approx(0.1));
    opts.cadence = 0;
    CHECK_THROWS_AS(run(gaussian(g), params, *K, opts), CadenceError);
  }

  TEST_CASE("zero data stays zero") {
    const auto g = box(64);
    const auto params = derive(3, 0.0, 2.0, 0.5, -1);
    const auto K = build_riesz_kernel(g, 2.0);
    RunOptions opts;
    opts.T = 0.05;
    const auto r = run(RadialField(g), params, *K, opts);
    CHECK(r.verdict == RunVerdict::Completed);
    for (const auto& d : r.trajectory) {
      CHECK(d.M == 0.0);
      CHECK(d.E == 0.0);
    }
  }

  TEST_CASE("outer mass") {
    const auto g = box(400, 10.0);
    CHECK(outer_mass(gaussian(g), 0.9) < 1e-60);
    const auto one = sample_real(g, [](double) { return 1.0; });
    CHECK(outer_mass(one, 0.9) / mass(one) == doctest::Approx(1.0 - 0.729).epsilon(1e-2));
  }

  TEST_CASE("blow-up detector") {
    BlowupThresholds th;
    CHECK(blowup_detector({rec(1, 1e-3), rec(1.5, 1e-3), rec(1.9, 1e-3)}, th) == BlowupVerdict::Bounded);
    CHECK(blowup_detector({rec(1, 1e-3), rec(12, 1e-6), rec(30, 1e-10)}, th) == BlowupVerdict::BlowupDetected);
    // growth without collapse, or collapse without growth
    CHECK(blowup_detector({rec(1, 1e-3), rec(12, 1e-3)}, th) == BlowupVerdict::Indeterminate);
    CHECK(blowup_detector({rec(1, 1e-3), rec(1.2, 1e-10)}, th) == BlowupVerdict::Indeterminate);
    CHECK_THROWS_AS(blowup_detector({}, th), PreconditionError);
  }

  TEST_CASE("classification of scaled ground states") {
    const auto params = derive(3, 0.0, 2.0, 0.5, -1);
    const auto g = build_grid(3, 1000.0, 512, Mapping::Log, OuterBoundary::HarmonicTail, 1e-7);
    const auto K = build_riesz_kernel(g, 2.0, cache_dir_from_env());
    const auto gs = compute_ground_state(params, g, *K);
    auto scaled = [&](double c) {
      RadialField u = gs.phi;
      u.values *= c;
      return classify(u, gs, params, *K);
    };
    for (double c : {0.5, 0.8, 0.9}) {
      const auto k = scaled(c);
      CHECK(k.prediction == Prediction::BoundedPredicted);
      CHECK(k.MG == doctest::Approx(c).epsilon(1e-9));
      // ME = (p c² - c^{2p}) / (p - 1) for u = cφ
      CHECK(k.ME == doctest::Approx((4.0 * c * c - std::pow(c, 8)) / 3.0).epsilon(1e-6));
    }
    for (double c : {1.1, 1.2}) CHECK(scaled(c).prediction == Prediction::BlowupPredicted);
    CHECK(scaled(1.0).prediction == Prediction::OutsideTheory);
    CHECK(scaled(1.0).t1 == doctest::Approx(std::pow(gs.C, -1.0 / 3.0)));
    CHECK_THROWS_AS(classify(gs.phi, gs, derive(3, 0.0, 2.0, 0.5, 1), *K), PreconditionError);
  }

  TEST_CASE("scattering diagnostic vanishes for the linear flow") {
    const auto g = box(256);
    const auto params = derive(3, 0.0, 2.0, 0.5, 1);
    const auto prop = build_propagator(g, params, 1e-2);
    const auto u1 = prop.apply(gaussian(g), 1.0);
    const auto u2 = prop.apply(gaussian(g), 2.0);
    CHECK(scattering_diagnostic(u1, 1.0, u2, 2.0, prop) < 1e-10);
    CHECK(scattering_diagnostic(u1, 1.0, u2, 1.5, prop) > 1e-3);
  }
}
