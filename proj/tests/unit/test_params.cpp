#include <doctest.h>

#include <cmath>
#include <limits>

#include "hartreelab/errors.hpp"
#include "hartreelab/params.hpp"

using namespace hartreelab;

TEST_SUITE("params") {
  TEST_CASE("kappa solves the indicial equation") {
    for (int n : {3, 4, 5, 7}) {
      for (double lambda : {-0.2, 0.0, 0.5, 3.0}) {
        const double k = kappa_of(n, lambda);
        // r^{-k} is annihilated by -Δ + λ/r² when k(n-2-k) = -λ
        CHECK(k * (n - 2.0 - k) == doctest::Approx(-lambda).epsilon(1e-12));
        CHECK(k <= (n - 2.0) / 2.0);
      }
    }
    CHECK(kappa_of(3, 0.0) == 0.0);
    CHECK(kappa_of(3, -0.25) == doctest::Approx(0.5));
  }

  TEST_CASE("critical exponent of the reference cell") {
    CHECK(critical_exponent(3, 2.0, 0.5) == doctest::Approx(4.0));
    CHECK(critical_exponent(4, 2.0, 0.5) == doctest::Approx(2.5));
    const auto m = derive(3, 0.5, 2.0, 0.5, -1);
    CHECK(m.p == doctest::Approx(4.0));
    CHECK(m.focusing());
  }

  TEST_CASE("the two kappa bounds for n = 3") {
    CHECK(theorem_kappa_bound(3) == doctest::Approx(0.923).epsilon(1e-3));
    CHECK(lemma_kappa_bound(3) == doctest::Approx(0.783).epsilon(1e-3));
    CHECK(lemma_kappa_bound(3) < theorem_kappa_bound(3));
  }

  TEST_CASE("derive rejects parameters outside the model") {
    CHECK_THROWS_AS(derive(2, 0.0, 1.0, 0.5, -1), DomainError);
    CHECK_THROWS_AS(derive(3, -0.25, 2.0, 0.5, -1), DomainError);
    CHECK_THROWS_AS(derive(3, 0.0, 3.0, 0.5, -1), DomainError);
    CHECK_THROWS_AS(derive(3, 0.0, 2.0, -0.1, -1), DomainError);
    CHECK_THROWS_AS(derive(3, 0.0, 2.0, 0.5, 0), DomainError);
    try {
      derive(3, 0.0, 2.0, -0.1, -1);
    } catch (const DomainError& e) {
      CHECK(std::string(e.what()).find("tau > 0") != std::string::npos);
    }
  }

  TEST_CASE("reference cells are feasible and carry a verified witness") {
    for (double lambda : {-0.2, 0.0, 0.5}) {
      const auto m = derive(3, lambda, 2.0, 0.5, -1);
      CHECK(feasible(m));
      const auto w = find_exponent_witness(m);
      REQUIRE(w.feasible());
      CHECK_FALSE(verify_witness(m, *w.witness).has_value());
      const auto& pair = w.witness->pair;
      CHECK(pair.is_admissible(3));
      CHECK(pair.inv_q == doctest::Approx(1.0 / 14.0));
      CHECK(2.0 * pair.inv_q + 3.0 / pair.r == doctest::Approx(1.5));
    }
  }

  TEST_CASE("a large tau fails with a named constraint") {
    const auto m = derive(3, 0.0, 2.0, 1.5, -1);
    CHECK_FALSE(feasible(m));
    const auto rep = check_theorem_ranges(m);
    const auto* f = rep.first_failure();
    REQUIRE(f != nullptr);
    CHECK(f->label.find("tau <") != std::string::npos);
    CHECK(f->slack < 0.0);
  }

  TEST_CASE("strict bounds met within the slack are marginal") {
    // tau_upper = alpha/2 + 1/3 for n = 3, kappa = 0
    const auto m = ModelParams::raw(3, 0.0, 2.0, 4.0 / 3.0, -1);
    const auto rep = check_theorem_ranges(m);
    const auto* f = rep.first_failure();
    REQUIRE(f != nullptr);
    CHECK(f->status == CheckStatus::Marginal);
    CHECK_FALSE(rep.pass());
  }

  TEST_CASE("endpoint q = infinity is exact") {
    const auto pair = make_pair_from_r(3, 2.0);
    CHECK(pair.inv_q == 0.0);
    CHECK(pair.q() == std::numeric_limits<double>::infinity());
    CHECK(pair.is_admissible(3));
    CHECK_FALSE(make_pair_from_r(3, 7.0).is_admissible(3));
  }

  TEST_CASE("witness search and re-verification agree on a small scan") {
    int witnesses = 0;
    for (int n = 3; n <= 6; ++n)
      for (int a = 1; a < 2 * n; ++a)
        for (int t = 1; t <= 12; ++t)
          for (double lambda : {-0.1, 0.0, 0.3}) {
            const auto m = ModelParams::raw(n, lambda, 0.5 * a, 0.125 * t, -1);
            const auto w = find_exponent_witness(m);
            // the r window is stricter than the printed tau ranges
            if (check_lemma_ranges(m).pass() && !w.feasible())
              CHECK(w.infeasible_constraint.rfind("r window", 0) == 0);
            if (w.feasible()) {
              ++witnesses;
              CHECK_FALSE(verify_witness(m, *w.witness).has_value());
            } else {
              CHECK_FALSE(w.infeasible_constraint.empty());
            }
          }
    CHECK(witnesses > 0);
  }
}
