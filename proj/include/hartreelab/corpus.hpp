#pragma once

#include <cstdint>
#include <random>

#include "hartreelab/grid.hpp"

namespace hartreelab {

/// Seeded generator whose uniform and normal draws do not depend on the
/// standard library's distribution implementations.
class FieldRng {
 public:
  explicit FieldRng(std::uint64_t seed) : engine_(seed) {}
  double uniform();  ///< [0, 1)
  double normal();

 private:
  std::mt19937_64 engine_;
};

/// Σ_k a_k cos(b_k r) exp(-(r/s_k)²) with six terms, normal a_k, b_k in
/// [0, 2) and s_k log-uniform in [0.2, 5]: smooth, effectively band-limited
/// radial data.
RadialField random_radial_field(const GridPtr& grid, FieldRng& rng);

}  // namespace hartreelab
