#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "hartreelab/config.hpp"
#include "hartreelab/errors.hpp"

using namespace hartreelab;

namespace {

bool mentions(const ValidationError& e, const std::string& what) {
  for (const auto& p : e.problems())
    if (p.find(what) != std::string::npos) return true;
  return false;
}

}  // namespace

TEST_SUITE("config") {
  TEST_CASE("minimal file gets the documented defaults") {
    const auto c = parse_config("experiment = ground-state\n");
    CHECK(c.experiment == "ground-state");
    CHECK(c.n == 3);
    CHECK(c.lambda == 0.0);
    CHECK(c.alpha == 2.0);
    CHECK(c.tau == 0.5);
    CHECK(c.epsilon == -1);
    CHECK(c.J == 512);
    CHECK(c.R_max == 1000.0);
    CHECK(c.mapping == Mapping::Log);
    CHECK(c.boundary == OuterBoundary::HarmonicTail);
    CHECK(c.run.dt == 1e-3);
    CHECK(c.run.adaptive);
    CHECK(c.dichotomy_c == std::vector<double>{0.8, 0.9, 1.1, 1.2});
    CHECK(c.seed == 1);
    CHECK(c.echo.size() == config_keys().size());
    CHECK(c.params().p == doctest::Approx(4.0));
    CHECK(c.grid()->size() == 512);
  }

  TEST_CASE("comments, whitespace and overrides") {
    const std::string text =
        "# reference cell\n"
        "experiment=evolve\n"
        "  params.lambda =  0.5   # trailing comment\n"
        "\n"
        "grid.mapping = uniform\n"
        "solver.adaptive = false\n";
    const auto c = parse_config(text, {"params.lambda=-0.2", "solver.T = 3"});
    CHECK(c.lambda == -0.2);
    CHECK(c.run.T == 3.0);
    CHECK(c.mapping == Mapping::Uniform);
    CHECK_FALSE(c.run.adaptive);
    CHECK(c.echo.at("params.lambda") == "-0.2");
  }

  TEST_CASE("unknown key is named") {
    try {
      parse_config("experiment = evolve\nsolver.dtt = 1\n");
      FAIL("expected ValidationError");
    } catch (const ValidationError& e) {
      CHECK(mentions(e, "solver.dtt"));
      CHECK(mentions(e, "line 2"));
    }
  }

  TEST_CASE("negative tau cites the bound") {
    try {
      parse_config("experiment = evolve\nparams.tau = -0.1\n");
      FAIL("expected ValidationError");
    } catch (const ValidationError& e) {
      CHECK(mentions(e, "tau > 0"));
    }
  }

  TEST_CASE("all problems are reported together") {
    try {
      parse_config("experiment = nothing\ngrid.J = many\nsolver.dt = -1\nbogus = 1\n");
      FAIL("expected ValidationError");
    } catch (const ValidationError& e) {
      CHECK(e.problems().size() >= 4);
      CHECK(mentions(e, "experiment"));
      CHECK(mentions(e, "grid.J"));
      CHECK(mentions(e, "solver.dt"));
      CHECK(mentions(e, "bogus"));
    }
  }

  TEST_CASE("malformed lines carry their line number") {
    try {
      parse_config("experiment = evolve\n\njust words\n");
      FAIL("expected ParseError");
    } catch (const ParseError& e) {
      CHECK(e.line() == 3);
    }
  }

  TEST_CASE("experiment-specific requirements") {
    CHECK_THROWS_AS(parse_config("experiment = virial-check\n"), ValidationError);
    CHECK_NOTHROW(parse_config("experiment = virial-check\nvirial.traj = out\n"));
    CHECK_THROWS_AS(parse_config("experiment = evolve\nevolve.init = file\n"), ValidationError);
    CHECK_THROWS_AS(parse_config("experiment = evolve\nevolve.init = groundstate-scaled:x\n"), ValidationError);
    CHECK_NOTHROW(parse_config("experiment = evolve\nevolve.init = groundstate-scaled:0.9\n"));
    CHECK_THROWS_AS(parse_config("experiment = virial-check\nvirial.traj = d\nvirial.R = 600\n"), ValidationError);
  }

  TEST_CASE("real lists") {
    CHECK(parse_real_list("1, 2.5,1e-3") == std::vector<double>{1.0, 2.5, 1e-3});
    CHECK_THROWS_AS(parse_real_list("1,,2"), DomainError);
    CHECK_THROWS_AS(parse_real_list("a"), DomainError);
  }

  TEST_CASE("load from disk") {
    const auto path = std::filesystem::temp_directory_path() / "hartreelab-config-test.cfg";
    {
      std::ofstream out(path);
      out << "experiment = gn-verify\ngn.samples = 7\n";
    }
    const auto c = load_config(path, {"seed=42"});
    CHECK(c.gn_samples == 7);
    CHECK(c.seed == 42);
    std::filesystem::remove(path);
    CHECK_THROWS_AS(load_config(path), ParseError);
  }
}
