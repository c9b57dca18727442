#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "hartreelab/experiment.hpp"
#include "hartreelab/io.hpp"

using namespace hartreelab;
namespace fs = std::filesystem;

namespace {

fs::path fresh(const std::string& name) {
  const auto dir = fs::temp_directory_path() / "hartreelab-exp-test" / name;
  fs::remove_all(dir);
  return dir;
}

ExperimentConfig make(const std::string& experiment, const fs::path& out, std::vector<std::string> extra = {}) {
  extra.push_back("output=" + out.string());
  return parse_config("experiment = " + experiment + "\n", extra);
}

nlohmann::json manifest(const fs::path& dir) {
  std::ifstream in(dir / "manifest.json");
  return nlohmann::json::parse(in);
}

}  // namespace

TEST_SUITE("experiment") {
  TEST_CASE("infeasible parameters exit 2 with a report") {
    const auto dir = fresh("infeasible");
    const auto r = run_experiment(make("check-params", dir, {"params.tau=1.5"}));
    CHECK(r.exit_code == 2);
    REQUIRE(fs::exists(dir / "report.json"));
    std::ifstream in(dir / "report.json");
    const auto rep = nlohmann::json::parse(in);
    CHECK_FALSE(rep.at("feasible").get<bool>());
    CHECK(rep.contains("infeasible_constraint"));
    CHECK(manifest(dir).at("exit_code") == 2);
  }

  TEST_CASE("feasible parameters carry a verified witness") {
    const auto dir = fresh("feasible");
    const auto r = run_experiment(make("check-params", dir, {"params.n=4", "params.lambda=0.5"}));
    CHECK(r.exit_code == 0);
    std::ifstream in(dir / "report.json");
    const auto rep = nlohmann::json::parse(in);
    CHECK(rep.at("feasible").get<bool>());
    CHECK(rep.at("witness_verified").get<bool>());
  }

  TEST_CASE("manifest hashes every output") {
    const auto dir = fresh("manifest");
    const auto r = run_experiment(make("gn-verify", dir, {"gn.samples=5", "grid.J=128"}));
    REQUIRE(r.exit_code == 0);
    const auto m = manifest(dir);
    CHECK(m.at("experiment") == "gn-verify");
    CHECK(m.at("config").at("gn.samples") == "5");
    CHECK(m.at("files").size() == r.files.size());
    for (const auto& f : m.at("files")) {
      const auto path = dir / f.at("path").get<std::string>();
      REQUIRE(fs::exists(path));
      CHECK(f.at("sha256") == sha256_file(path));
      CHECK(f.at("bytes").get<std::uintmax_t>() == fs::file_size(path));
    }
  }

  TEST_CASE("seeded runs are byte-identical") {
    const auto a = fresh("seed-a"), b = fresh("seed-b"), c = fresh("seed-c");
    run_experiment(make("gn-verify", a, {"gn.samples=8", "grid.J=128", "seed=11"}));
    run_experiment(make("gn-verify", b, {"gn.samples=8", "grid.J=128", "seed=11"}));
    run_experiment(make("gn-verify", c, {"gn.samples=8", "grid.J=128", "seed=12"}));
    CHECK(sha256_file(a / "gn.csv") == sha256_file(b / "gn.csv"));
    CHECK(sha256_file(a / "gn.csv") != sha256_file(c / "gn.csv"));
  }

  TEST_CASE("dichotomy table has one row per amplitude") {
    const auto dir = fresh("dichotomy");
    const auto r = run_experiment(make("dichotomy", dir, {"grid.J=256", "dichotomy.T=0.02"}));
    CHECK(r.exit_code == 0);
    const auto rows = read_csv(dir / "verdicts.csv");
    REQUIRE(rows.size() == 5);
    CHECK(rows[1][1] == "BoundedPredicted");
    CHECK(rows[4][1] == "BlowupPredicted");
    for (const char* c : {"0.8", "0.9", "1.1", "1.2"}) CHECK(fs::exists(dir / (std::string("traj_c") + c + ".csv")));
  }

  TEST_CASE("amplitude one is outside the theory") {
    const auto dir = fresh("threshold");
    const auto r = run_experiment(make("dichotomy", dir, {"grid.J=128", "dichotomy.T=0.01", "dichotomy.c=1"}));
    CHECK(r.exit_code == 2);
  }

  TEST_CASE("evolve feeds virial-check") {
    const auto traj = fresh("traj"), vir = fresh("vir");
    const auto e = run_experiment(make("evolve", traj,
                                       {"grid.mapping=uniform", "grid.R_max=40", "grid.boundary=dirichlet",
                                        "grid.J=256", "solver.T=0.05", "solver.adaptive=false"}));
    REQUIRE(e.exit_code == 0);
    CHECK(fs::exists(traj / "run.cfg"));
    CHECK(fs::exists(traj / "fields.csv"));
    const auto v = run_experiment(make("virial-check", vir, {"virial.traj=" + traj.string(), "virial.R=2,4"}));
    CHECK(v.exit_code == 0);
    CHECK(read_csv(vir / "virial.csv").size() > 2);
    CHECK(v.verdicts.contains("quadratic_B_defect"));
  }

  TEST_CASE("missing trajectory is an error") {
    const auto dir = fresh("badtraj");
    const auto r = run_experiment(make("virial-check", dir, {"virial.traj=" + (dir / "nowhere").string()}));
    CHECK(r.exit_code == 1);
    CHECK_FALSE(r.error.empty());
    CHECK(manifest(dir).at("exit_code") == 1);
  }
}
