#include "hartreelab/corpus.hpp"

#include <array>
#include <cmath>
#include <numbers>

namespace hartreelab {

double FieldRng::uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

double FieldRng::normal() {
  const double a = 1.0 - uniform();
  const double b = uniform();
  return std::sqrt(-2.0 * std::log(a)) * std::cos(2.0 * std::numbers::pi * b);
}

RadialField random_radial_field(const GridPtr& grid, FieldRng& rng) {
  struct Term {
    double a, b, s;
  };
  std::array<Term, 6> terms;
  for (auto& t : terms) {
    t.a = rng.normal();
    t.b = 2.0 * rng.uniform();
    t.s = 0.2 * std::pow(25.0, rng.uniform());
  }
  return sample_real(grid, [&](double r) {
    double acc = 0.0;
    for (const auto& t : terms) {
      const double x = r / t.s;
      acc += t.a * std::cos(t.b * r) * std::exp(-x * x);
    }
    return acc;
  });
}

}  // namespace hartreelab
