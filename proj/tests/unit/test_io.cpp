#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <limits>

#include "hartreelab/corpus.hpp"
#include "hartreelab/errors.hpp"
#include "hartreelab/io.hpp"

using namespace hartreelab;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const auto dir = fs::temp_directory_path() / "hartreelab-io-test";
  fs::create_directories(dir);
  return dir / name;
}

}  // namespace

TEST_SUITE("io") {
  TEST_CASE("reals round-trip in exponent notation") {
    for (double v : {0.0, 1.0, -1.0 / 3.0, 6.02214076e23, 4.9e-324, std::numeric_limits<double>::max()}) {
      const auto s = format_real(v);
      CHECK(s.find('e') != std::string::npos);
      CHECK(std::strtod(s.c_str(), nullptr) == v);
    }
    CHECK(format_real(std::nan("")) == "nan");
    CHECK(format_real(-std::numeric_limits<double>::infinity()) == "-inf");
  }

  TEST_CASE("CSV quoting and round-trip") {
    const auto path = scratch("quote.csv");
    {
      CsvWriter w(path, {"a", "b"});
      w.row(std::vector<std::string>{"plain", "with,comma"});
      w.row(std::vector<std::string>{"say \"hi\"", "two\nlines"});
      w.row(std::vector<double>{1.5, -2.0});
      CHECK_THROWS_AS(w.row(std::vector<std::string>{"only one"}), DomainError);
    }
    const auto rows = read_csv(path);
    REQUIRE(rows.size() == 4);
    CHECK(rows[1][1] == "with,comma");
    CHECK(rows[2][0] == "say \"hi\"");
    CHECK(rows[2][1] == "two\nlines");
    CHECK(std::stod(rows[3][0]) == 1.5);
  }

  TEST_CASE("CRLF record separators") {
    const auto path = scratch("crlf.csv");
    { CsvWriter w(path, {"x"}); }
    std::ifstream in(path, std::ios::binary);
    std::string s((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    CHECK(s == "x\r\n");
  }

  TEST_CASE("field snapshots round-trip exactly") {
    const auto g = build_grid(3, 100.0, 64, Mapping::Log, OuterBoundary::HarmonicTail, 1e-5);
    FieldRng rng(5);
    std::vector<RadialField> fields;
    for (int k = 0; k < 3; ++k) {
      auto u = random_radial_field(g, rng);
      u.values *= std::complex<double>(0.6, -0.8);
      fields.push_back(u);
    }
    const auto path = scratch("fields.csv");
    write_fields(path, {0.0, 0.01, 0.02}, fields);
    std::vector<double> times;
    std::vector<RadialField> back;
    read_fields(path, g, times, back);
    REQUIRE(back.size() == 3);
    CHECK(times[2] == 0.02);
    for (int k = 0; k < 3; ++k) CHECK(back[k].values == fields[k].values);
    std::vector<RadialField> none;
    CHECK_THROWS_AS(read_fields(path, build_grid(3, 100.0, 64, Mapping::Uniform), times, none), DomainError);
  }

  TEST_CASE("profiles are interpolated onto the target grid") {
    const auto src = build_grid(3, 10.0, 2000, Mapping::Uniform);
    const auto dst = build_grid(3, 10.0, 300, Mapping::Log, OuterBoundary::Dirichlet, 1e-4);
    const auto u = sample_real(src, [](double r) { return std::exp(-r); });
    const auto path = scratch("profile.csv");
    write_profile(path, u);
    const auto v = read_profile(path, dst);
    for (int j = 0; j < dst->size(); j += 13)
      if (dst->nodes(j) >= src->nodes(0))
        CHECK(v.values(j).real() == doctest::Approx(std::exp(-dst->nodes(j))).epsilon(1e-4));
  }

  TEST_CASE("sha256") {
    const auto path = scratch("abc.txt");
    write_text(path, "abc");
    CHECK(sha256_file(path) == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
    write_text(path, "");
    CHECK(sha256_file(path) == "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
  }

  TEST_CASE("field corpus is reproducible") {
    const auto g = build_grid(3, 50.0, 128, Mapping::Uniform);
    FieldRng a(9), b(9), c(10);
    const auto u = random_radial_field(g, a);
    CHECK(u.values == random_radial_field(g, b).values);
    CHECK(u.values != random_radial_field(g, c).values);
    FieldRng d(1);
    for (int k = 0; k < 1000; ++k) {
      const double x = d.uniform();
      CHECK(x >= 0.0);
      CHECK(x < 1.0);
    }
  }
}
