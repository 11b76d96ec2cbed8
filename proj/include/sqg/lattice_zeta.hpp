#pragma once

#include <cmath>
#include <stdexcept>

namespace sqg {

/// Dirichlet beta function sum_k (-1)^k (2k+1)^-s for s > 0, by
/// Cohen-Villegas-Zagier acceleration of the alternating series.
inline double dirichlet_beta(double s, int terms = 48) {
  if (!(s > 0.0)) throw std::domain_error("dirichlet_beta: s must be positive");
  double d = std::pow(3.0 + std::sqrt(8.0), terms);
  d = 0.5 * (d + 1.0 / d);
  double b = -1.0;
  double c = -d;
  double sum = 0.0;
  for (int k = 0; k < terms; ++k) {
    c = b - c;
    sum += c * std::pow(2.0 * k + 1.0, -s);
    b *= (static_cast<double>(k) + terms) * (static_cast<double>(k) - terms) /
         ((k + 0.5) * (k + 1.0));
  }
  return sum / d;
}

/// Analytically continued square-lattice sum Z(s) = sum_{m in Z^2 \ 0} |m|^-s = 4 zeta(s/2) beta(s/2).
inline double epstein_zeta_square(double s) {
  if (!(s > 0.0) || s == 2.0) throw std::domain_error("epstein_zeta_square: s must be positive and != 2");
  return 4.0 * std::riemann_zeta(0.5 * s) * dirichlet_beta(0.5 * s);
}

/// Z(s) with the lattice points 0 < |m| < radius removed.
inline double epstein_zeta_square_excluding(double s, double radius) {
  double z = epstein_zeta_square(s);
  const int r = static_cast<int>(std::ceil(radius));
  for (int a = -r; a <= r; ++a) {
    for (int b = -r; b <= r; ++b) {
      const double len = std::hypot(static_cast<double>(a), static_cast<double>(b));
      if (len > 0.0 && len < radius - 1e-9) z -= std::pow(len, -s);
    }
  }
  return z;
}

}  // namespace sqg
