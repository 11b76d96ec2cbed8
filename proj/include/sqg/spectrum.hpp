#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "sqg/errors.hpp"
#include "sqg/field.hpp"

namespace sqg {

/// Random-phase field with |theta_k| = amplitude * |k|^-decay for k_min <= |k| <= k_max.
struct SpectrumRecipe {
  double decay = 1.0;
  double k_min = 1.0;
  double k_max = 4.0;
  double amplitude = 1.0;
  std::uint64_t seed = 0;
};

/// Draws a field from a recipe. Phases are taken in a fixed half-plane order so
/// a seed reproduces the same field bit for bit.
inline SpectralField generate_field(const SpectrumRecipe& r, TorusGrid grid) {
  if (!(r.decay > 0.0)) throw ConfigError("spectrum.a", "decay exponent must be positive");
  if (!(r.k_min > 0.0) || r.k_max < r.k_min) {
    throw ConfigError("spectrum.band", "band must satisfy 0 < k_min <= k_max");
  }
  if (r.k_max > grid.dealias_kmax()) {
    throw ConfigError("spectrum.band", "k_max " + std::to_string(r.k_max) +
                                           " exceeds the dealiasing radius " +
                                           std::to_string(grid.dealias_kmax()));
  }
  std::mt19937_64 rng(r.seed);
  std::uniform_real_distribution<double> phase(0.0, two_pi);
  std::vector<Complex> c(grid.spectral_size());
  const int kmax = static_cast<int>(std::floor(r.k_max));
  for (int k2 = 0; k2 <= kmax; ++k2) {
    for (int k1 = -kmax; k1 <= kmax; ++k1) {
      if (k2 == 0 && k1 <= 0) continue;
      const double mag = std::hypot(static_cast<double>(k1), static_cast<double>(k2));
      if (mag < r.k_min || mag > r.k_max) continue;
      const double p = phase(rng);
      add_real_mode(grid, c, k1, k2, std::polar(r.amplitude * std::pow(mag, -r.decay), p));
    }
  }
  return SpectralField(grid, std::move(c));
}

}  // namespace sqg
