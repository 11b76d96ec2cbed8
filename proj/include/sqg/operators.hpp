#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include "sqg/field.hpp"
#include "sqg/grid.hpp"

namespace sqg {

/// Fractional power Lambda^s, multiplier |k|^s.
inline SpectralField lambda_pow(const SpectralField& field, double s) {
  return field.map_modes([s](int k1, int k2, int) {
    return std::pow(static_cast<double>(k1) * k1 + static_cast<double>(k2) * k2, 0.5 * s);
  });
}

/// Partial derivative d/dx_j (j = 1 or 2). Nyquist modes are dropped.
inline SpectralField partial(const SpectralField& field, int j) {
  if (j != 1 && j != 2) throw std::invalid_argument("partial: axis must be 1 or 2");
  const TorusGrid& g = field.grid();
  return field.map_modes([&g, j](int k1, int k2, int row) {
    if (g.is_nyquist(row, k2)) return Complex{};
    return Complex{0.0, static_cast<double>(j == 1 ? k1 : k2)};
  });
}

inline SpectralField laplacian(const SpectralField& field) {
  return field.map_modes([](int k1, int k2, int) {
    return -(static_cast<double>(k1) * k1 + static_cast<double>(k2) * k2);
  });
}

/// Velocity u = grad-perp Lambda^{-1} theta = (-d2, d1) Lambda^{-1} theta.
inline VelocityField riesz_perp(const SpectralField& field) {
  const TorusGrid& g = field.grid();
  auto component = [&](bool first) {
    return field.map_modes([&g, first](int k1, int k2, int row) {
      if (g.is_nyquist(row, k2)) return Complex{};
      const double norm = std::hypot(static_cast<double>(k1), static_cast<double>(k2));
      return first ? Complex{0.0, -k2 / norm} : Complex{0.0, k1 / norm};
    });
  };
  return VelocityField{component(true), component(false)};
}

/// Largest |k.u_k| over the spectrum; exactly zero for solenoidal fields.
inline double divergence_residual(const VelocityField& u) {
  const TorusGrid& g = u.u1.grid();
  double worst = 0.0;
  for (int row = 0; row < g.n(); ++row) {
    const int k1 = g.wavenumber(row);
    for (int col = 0; col < g.nk(); ++col) {
      const auto i = g.mode_index(row, col);
      worst = std::max(worst, std::abs(static_cast<double>(k1) * u.u1[i] +
                                       static_cast<double>(col) * u.u2[i]));
    }
  }
  return worst;
}

/// L2 inner product over the torus, 4 pi^2 sum_k a_k conj(b_k).
inline double inner_product(const SpectralField& a, const SpectralField& b) {
  const TorusGrid& g = a.grid();
  if (!(g == b.grid())) throw std::invalid_argument("inner_product: grid mismatch");
  double sum = 0.0;
  for (int row = 0; row < g.n(); ++row) {
    for (int col = 0; col < g.nk(); ++col) {
      const auto i = g.mode_index(row, col);
      sum += g.column_weight(col) * (a[i] * std::conj(b[i])).real();
    }
  }
  return torus_area * sum;
}

/// Homogeneous Sobolev norm ||Lambda^s phi||_{L2}.
inline double sobolev_norm(const SpectralField& field, double s) {
  const TorusGrid& g = field.grid();
  double sum = 0.0;
  for (int row = 0; row < g.n(); ++row) {
    const double k1 = g.wavenumber(row);
    for (int col = 0; col < g.nk(); ++col) {
      if (row == 0 && col == 0) continue;
      const double k2sq = k1 * k1 + static_cast<double>(col) * col;
      sum += g.column_weight(col) * std::pow(k2sq, s) * std::norm(field[g.mode_index(row, col)]);
    }
  }
  return std::sqrt(torus_area * sum);
}

inline double l2_norm(const SpectralField& field) { return sobolev_norm(field, 0.0); }

/// Dealiased transport term u.grad(theta) for a given velocity.
inline SpectralField advection(const VelocityField& u, const SpectralField& theta) {
  const auto u1 = to_physical(dealias(u.u1));
  const auto u2 = to_physical(dealias(u.u2));
  const auto d1 = to_physical(dealias(partial(theta, 1)));
  const auto d2 = to_physical(dealias(partial(theta, 2)));
  std::vector<double> prod(theta.grid().physical_size());
  for (std::size_t i = 0; i < prod.size(); ++i) prod[i] = u1[i] * d1[i] + u2[i] * d2[i];
  return dealias(from_physical(GridFunction(theta.grid(), std::move(prod))));
}

/// Maximum of |theta| over the collocation points.
inline double linf_norm(const GridFunction& f) { return f.max_abs(); }
inline double linf_norm(const SpectralField& f) { return to_physical(f).max_abs(); }

/// Finite difference delta_h f(x) = f(x + h) - f(x) on the grid.
inline GridFunction shift_difference(const GridFunction& f, GridShift h) {
  const TorusGrid& g = f.grid();
  std::vector<double> out(g.physical_size());
  for (int i1 = 0; i1 < g.n(); ++i1) {
    for (int i2 = 0; i2 < g.n(); ++i2) {
      out[g.point_index(i1, i2)] = f.at(i1 + h.s1, i2 + h.s2) - f.at(i1, i2);
    }
  }
  return GridFunction(g, std::move(out));
}

/// Torus length range of the grid shifts entering Holder-type suprema.
struct PairRange {
  double min_length = 0.0;
  double max_length = pi;
};

namespace detail {

/// max over shifts h in range of weight(|h|) * max_x |f(x+h) - f(x)|.
///
/// Only half of the shift set is visited since |delta_{-h} f| is a translate of |delta_h f|.
template <class Weight>
double weighted_difference_sup(const GridFunction& f, PairRange range, Weight&& weight) {
  const TorusGrid& g = f.grid();
  const int n = g.n();
  const int half = n / 2;
  const auto v = f.values();
  double best = 0.0;
  for (int s2 = 0; s2 <= half; ++s2) {
    for (int s1 = 0; s1 < n; ++s1) {
      if ((s2 == 0 || s2 == half) && s1 > half) continue;
      if (s1 == 0 && s2 == 0) continue;
      const double len = GridShift{s1, s2}.length(g);
      if (len < range.min_length || len > range.max_length) continue;
      double m = 0.0;
      for (int i1 = 0; i1 < n; ++i1) {
        const int j1 = (i1 + s1) % n;
        const double* a = v.data() + static_cast<std::size_t>(i1) * n;
        const double* b = v.data() + static_cast<std::size_t>(j1) * n;
        for (int i2 = 0; i2 < n; ++i2) {
          const int j2 = i2 + s2 < n ? i2 + s2 : i2 + s2 - n;
          m = std::max(m, std::abs(b[j2] - a[i2]));
        }
      }
      best = std::max(best, m * weight(len));
    }
  }
  return best;
}

}  // namespace detail

/// Grid Holder seminorm max |delta_h f(x)| / |h|^beta over shifts with |h| in range.
inline double holder_seminorm(const GridFunction& f, double beta, PairRange range = {}) {
  if (!(beta > 0.0 && beta <= 1.0)) throw std::domain_error("holder_seminorm: beta must lie in (0,1]");
  return detail::weighted_difference_sup(f, range,
                                         [beta](double len) { return std::pow(len, -beta); });
}
inline double holder_seminorm(const SpectralField& f, double beta, PairRange range = {}) {
  return holder_seminorm(to_physical(f), beta, range);
}

/// max |delta_h f(x)| / (xi^2 + |h|^2)^{beta/2}; reduces to holder_seminorm at xi = 0.
inline double weighted_w_sup(const GridFunction& f, double beta, double xi, PairRange range = {}) {
  if (!(beta > 0.0 && beta <= 1.0)) throw std::domain_error("weighted_w_sup: beta must lie in (0,1]");
  if (xi < 0.0) throw std::domain_error("weighted_w_sup: xi must be nonnegative");
  if (xi == 0.0) return holder_seminorm(f, beta, range);
  return detail::weighted_difference_sup(f, range, [beta, xi](double len) {
    return std::pow(xi * xi + len * len, -0.5 * beta);
  });
}
inline double weighted_w_sup(const SpectralField& f, double beta, double xi, PairRange range = {}) {
  return weighted_w_sup(to_physical(f), beta, xi, range);
}

}  // namespace sqg
