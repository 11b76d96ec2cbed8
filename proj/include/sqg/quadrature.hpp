#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "sqg/errors.hpp"
#include "sqg/field.hpp"
#include "sqg/lattice_zeta.hpp"
#include "sqg/operators.hpp"

namespace sqg {

/// Truncation parameters for the real-space singular integrals.
struct QuadratureScheme {
  /// Periodic images kept: |k|_inf <= images.
  int images = 3;
  /// Radius of the excluded ball around y = 0; 0 selects one grid spacing.
  double exclusion_radius = 0.0;
  /// Lattice-zeta correction of the near-singular midpoint error.
  bool singular_correction = true;
  /// Analytic far-field estimate for images beyond the truncation.
  bool tail_correction = true;
};

/// Constants that the estimates leave symbolic.
struct FracConstants {
  /// Singular-integral normalization; 0 selects normalization_constant(gamma).
  double c_gamma = 0.0;
  double kappa = 1.0;
  double c3 = 64.0;
};

/// c_gamma = 2^gamma Gamma(1 + gamma/2) / (pi |Gamma(-gamma/2)|), making the
/// singular integral agree with the multiplier |k|^gamma.
inline double normalization_constant(double gamma) {
  if (!(gamma > 0.0 && gamma < 2.0)) {
    throw std::domain_error("normalization_constant: gamma must lie in (0,2)");
  }
  return std::pow(2.0, gamma) * std::tgamma(1.0 + 0.5 * gamma) /
         (pi * std::abs(std::tgamma(-0.5 * gamma)));
}

inline double resolve_c_gamma(const FracConstants& k, double gamma) {
  return k.c_gamma > 0.0 ? k.c_gamma : normalization_constant(gamma);
}

/// Grid samples of a velocity field.
struct GridVelocity {
  GridFunction u1;
  GridFunction u2;
};

namespace detail {

inline void check_gamma(double gamma, const char* who) {
  if (!(gamma > 0.0 && gamma < 2.0)) {
    throw std::domain_error(std::string(who) + ": gamma must lie in (0,2)");
  }
}

inline double exclusion_radius(const TorusGrid& g, const QuadratureScheme& q) {
  if (q.images < 1) throw std::invalid_argument("QuadratureScheme: images must be >= 1");
  if (q.exclusion_radius == 0.0) return g.spacing();
  if (q.exclusion_radius < g.spacing() * (1.0 - 1e-12)) {
    throw std::invalid_argument("QuadratureScheme: exclusion radius below one grid spacing");
  }
  return q.exclusion_radius;
}

/// Offset m in [-n/2, n/2) stored at wrap index j.
inline int wrap_offset(int j, int n) { return j < n / 2 ? j : j - n; }

/// int_0^{pi/4} cos^p(phi) dphi by composite Simpson.
inline double cos_power_integral(double p) {
  constexpr int m = 512;
  const double a = 0.25 * pi;
  const double h = a / m;
  double s = 1.0 + std::pow(std::cos(a), p);
  for (int i = 1; i < m; ++i) s += (i % 2 ? 4.0 : 2.0) * std::pow(std::cos(i * h), p);
  return s * h / 3.0;
}

/// int over the plane outside the square of half-width L of |y|^-(2+gamma).
inline double far_field_integral(double gamma, double half_width) {
  return 8.0 / gamma * std::pow(half_width, -gamma) * cos_power_integral(gamma);
}

/// Periodized hypersingular kernel sum_k |y - 2 pi k|^-(2+gamma) on the grid offsets,
/// scaled by the cell area h^2, in wrap order.
inline std::vector<double> hypersingular_weights(const TorusGrid& g, double gamma,
                                                 const QuadratureScheme& q) {
  const int n = g.n();
  const double h = g.spacing();
  const double delta = exclusion_radius(g, q);
  std::vector<double> w(g.physical_size(), 0.0);
  for (int j1 = 0; j1 < n; ++j1) {
    const double y1 = wrap_offset(j1, n) * h;
    for (int j2 = 0; j2 < n; ++j2) {
      const double y2 = wrap_offset(j2, n) * h;
      double sum = 0.0;
      for (int a = -q.images; a <= q.images; ++a) {
        for (int b = -q.images; b <= q.images; ++b) {
          const double r = std::hypot(y1 - two_pi * a, y2 - two_pi * b);
          if (a == 0 && b == 0 && r < delta * (1.0 - 1e-9)) continue;
          sum += std::pow(r, -2.0 - gamma);
        }
      }
      w[g.point_index(j1, j2)] = h * h * sum;
    }
  }
  return w;
}

/// sum_m w(m) op(f(x), f(x + m)) at the grid point x = (i1, i2).
template <class Op>
double kernel_sum_at(const TorusGrid& g, std::span<const double> w, std::span<const double> f,
                     int i1, int i2, Op&& op) {
  const int n = g.n();
  const double fx = f[g.point_index(i1, i2)];
  double s = 0.0;
  for (int j1 = 0; j1 < n; ++j1) {
    const double* wr = w.data() + static_cast<std::size_t>(j1) * n;
    const double* fr = f.data() + static_cast<std::size_t>((i1 + j1) % n) * n;
    const int split = n - i2;
    for (int j2 = 0; j2 < split; ++j2) s += wr[j2] * op(fx, fr[i2 + j2]);
    for (int j2 = split; j2 < n; ++j2) s += wr[j2] * op(fx, fr[i2 + j2 - n]);
  }
  return s;
}

inline double five_point_laplacian(const GridFunction& f, int i1, int i2) {
  const double h = f.grid().spacing();
  return (f.at(i1 + 1, i2) + f.at(i1 - 1, i2) + f.at(i1, i2 + 1) + f.at(i1, i2 - 1) -
          4.0 * f.at(i1, i2)) /
         (h * h);
}

inline double central_difference(const GridFunction& f, int i1, int i2, int axis) {
  const double h = f.grid().spacing();
  return axis == 1 ? (f.at(i1 + 1, i2) - f.at(i1 - 1, i2)) / (2.0 * h)
                   : (f.at(i1, i2 + 1) - f.at(i1, i2 - 1)) / (2.0 * h);
}

/// Shared setup of the Lambda^gamma and D_gamma quadratures.
struct HypersingularRule {
  HypersingularRule(const TorusGrid& g, double gamma, const QuadratureScheme& q)
      : weights(hypersingular_weights(g, gamma, q)) {
    const double h = g.spacing();
    if (q.tail_correction) tail = far_field_integral(gamma, (2 * q.images + 1) * pi);
    if (q.singular_correction) {
      zeta = std::pow(h, 2.0 - gamma) *
             epstein_zeta_square_excluding(gamma, exclusion_radius(g, q) / h);
    }
  }
  std::vector<double> weights;
  double tail = 0.0;
  /// h^{2-gamma} Z_delta(gamma), the regularized near-field lattice moment.
  double zeta = 0.0;
};

}  // namespace detail

/// Lambda^gamma f on the grid from the periodized singular integral.
inline GridFunction frac_lap_quadrature(const GridFunction& f, double gamma,
                                        const QuadratureScheme& scheme = {},
                                        const FracConstants& constants = {}) {
  detail::check_gamma(gamma, "frac_lap_quadrature");
  const TorusGrid& g = f.grid();
  const double c = resolve_c_gamma(constants, gamma);
  const detail::HypersingularRule rule(g, gamma, scheme);
  const double mean = f.mean();
  std::vector<double> out(g.physical_size());
  for (int i1 = 0; i1 < g.n(); ++i1) {
    for (int i2 = 0; i2 < g.n(); ++i2) {
      double v = detail::kernel_sum_at(g, rule.weights, f.values(), i1, i2,
                                       [](double a, double b) { return a - b; });
      v += rule.tail * (f.at(i1, i2) - mean);
      v += 0.25 * rule.zeta * detail::five_point_laplacian(f, i1, i2);
      out[g.point_index(i1, i2)] = c * v;
    }
  }
  return GridFunction(g, std::move(out));
}

inline GridFunction frac_lap_quadrature(const SpectralField& f, double gamma,
                                        const QuadratureScheme& scheme = {},
                                        const FracConstants& constants = {}) {
  return frac_lap_quadrature(to_physical(f), gamma, scheme, constants);
}

/// D_gamma[f](x) = c_gamma int (f(x) - f(x+y))^2 / |y|^{2+gamma} dy at every grid point.
inline GridFunction d_gamma(const GridFunction& f, double gamma,
                            const QuadratureScheme& scheme = {},
                            const FracConstants& constants = {}) {
  detail::check_gamma(gamma, "d_gamma");
  const TorusGrid& g = f.grid();
  const double c = resolve_c_gamma(constants, gamma);
  const detail::HypersingularRule rule(g, gamma, scheme);
  double m1 = 0.0;
  double m2 = 0.0;
  for (double v : f.values()) {
    m1 += v;
    m2 += v * v;
  }
  m1 /= static_cast<double>(g.physical_size());
  m2 /= static_cast<double>(g.physical_size());
  std::vector<double> out(g.physical_size());
  for (int i1 = 0; i1 < g.n(); ++i1) {
    for (int i2 = 0; i2 < g.n(); ++i2) {
      const double fx = f.at(i1, i2);
      double v = detail::kernel_sum_at(g, rule.weights, f.values(), i1, i2, [](double a, double b) {
        const double d = a - b;
        return d * d;
      });
      v += rule.tail * std::max(0.0, fx * fx - 2.0 * fx * m1 + m2);
      const double g1 = detail::central_difference(f, i1, i2, 1);
      const double g2 = detail::central_difference(f, i1, i2, 2);
      v -= 0.5 * rule.zeta * (g1 * g1 + g2 * g2);
      out[g.point_index(i1, i2)] = c * std::max(0.0, v);
    }
  }
  return GridFunction(g, std::move(out));
}

inline GridFunction d_gamma(const SpectralField& f, double gamma,
                            const QuadratureScheme& scheme = {},
                            const FracConstants& constants = {}) {
  return d_gamma(to_physical(f), gamma, scheme, constants);
}

/// D_gamma at a single grid point.
inline double d_gamma_at(const GridFunction& f, double gamma, GridPoint x,
                         const QuadratureScheme& scheme = {},
                         const FracConstants& constants = {}) {
  detail::check_gamma(gamma, "d_gamma_at");
  const TorusGrid& g = f.grid();
  const double c = resolve_c_gamma(constants, gamma);
  const detail::HypersingularRule rule(g, gamma, scheme);
  const double fx = f.at(x.i1, x.i2);
  const double m1 = f.mean();
  double m2 = 0.0;
  for (double v : f.values()) m2 += v * v;
  m2 /= static_cast<double>(g.physical_size());
  double v = detail::kernel_sum_at(g, rule.weights, f.values(), x.i1, x.i2, [](double a, double b) {
    const double d = a - b;
    return d * d;
  });
  v += rule.tail * std::max(0.0, fx * fx - 2.0 * fx * m1 + m2);
  const double g1 = detail::central_difference(f, x.i1, x.i2, 1);
  const double g2 = detail::central_difference(f, x.i1, x.i2, 2);
  v -= 0.5 * rule.zeta * (g1 * g1 + g2 * g2);
  return c * std::max(0.0, v);
}

namespace detail {

/// sum over |k|_inf > K of |2 pi k|^-3.
inline double outer_image_moment(int images) {
  constexpr int m = 400;
  double s = 0.0;
  for (int a = -m; a <= m; ++a) {
    for (int b = -m; b <= m; ++b) {
      if (std::max(std::abs(a), std::abs(b)) <= images) continue;
      s += std::pow(std::hypot(static_cast<double>(a), static_cast<double>(b)), -3.0);
    }
  }
  s += far_field_integral(1.0, m + 0.5);
  return s / (two_pi * two_pi * two_pi);
}

}  // namespace detail

/// Velocity (-R_2 f, R_1 f) from the periodized principal-value Riesz kernels y_j / (2 pi |y|^3).
inline GridVelocity riesz_perp_quadrature(const GridFunction& f,
                                          const QuadratureScheme& scheme = {}) {
  const TorusGrid& g = f.grid();
  const int n = g.n();
  const double h = g.spacing();
  const double delta = detail::exclusion_radius(g, scheme);
  const double outer = scheme.tail_correction ? detail::outer_image_moment(scheme.images) : 0.0;
  std::vector<double> k1(g.physical_size(), 0.0);
  std::vector<double> k2(g.physical_size(), 0.0);
  for (int j1 = 0; j1 < n; ++j1) {
    const double y1 = detail::wrap_offset(j1, n) * h;
    for (int j2 = 0; j2 < n; ++j2) {
      const double y2 = detail::wrap_offset(j2, n) * h;
      double s1 = 0.0;
      double s2 = 0.0;
      for (int a = -scheme.images; a <= scheme.images; ++a) {
        for (int b = -scheme.images; b <= scheme.images; ++b) {
          const double z1 = y1 - two_pi * a;
          const double z2 = y2 - two_pi * b;
          const double r = std::hypot(z1, z2);
          if (a == 0 && b == 0 && r < delta * (1.0 - 1e-9)) continue;
          const double r3 = r * r * r;
          s1 += z1 / r3;
          s2 += z2 / r3;
        }
      }
      const auto i = g.point_index(j1, j2);
      // the half-period offset is its own mirror image, so the odd kernel vanishes there
      k1[i] = j1 == n / 2 ? 0.0 : h * h * (s1 - 0.5 * outer * y1);
      k2[i] = j2 == n / 2 ? 0.0 : h * h * (s2 - 0.5 * outer * y2);
    }
  }
  const double zeta = scheme.singular_correction
                          ? 0.5 * h * epstein_zeta_square_excluding(1.0, delta / h)
                          : 0.0;
  std::vector<double> u1(g.physical_size());
  std::vector<double> u2(g.physical_size());
  const auto take = [](double, double b) { return b; };
  for (int i1 = 0; i1 < n; ++i1) {
    for (int i2 = 0; i2 < n; ++i2) {
      const double r1 = detail::kernel_sum_at(g, k1, f.values(), i1, i2, take) -
                        zeta * detail::central_difference(f, i1, i2, 1);
      const double r2 = detail::kernel_sum_at(g, k2, f.values(), i1, i2, take) -
                        zeta * detail::central_difference(f, i1, i2, 2);
      u1[g.point_index(i1, i2)] = -r2 / two_pi;
      u2[g.point_index(i1, i2)] = r1 / two_pi;
    }
  }
  return GridVelocity{GridFunction(g, std::move(u1)), GridFunction(g, std::move(u2))};
}

inline GridVelocity riesz_perp_quadrature(const SpectralField& f,
                                          const QuadratureScheme& scheme = {}) {
  return riesz_perp_quadrature(to_physical(f), scheme);
}

/// sup_x |2 f Lambda^gamma f - Lambda^gamma(f^2) - D_gamma[f]| with the fractional
/// powers taken spectrally and D_gamma by quadrature.
inline double cordoba_residual(const SpectralField& f, double gamma,
                               const QuadratureScheme& scheme = {},
                               const FracConstants& constants = {}) {
  detail::check_gamma(gamma, "cordoba_residual");
  const TorusGrid& g = f.grid();
  const auto phys = to_physical(f);
  const auto lam = to_physical(lambda_pow(f, gamma));
  // f^2 on the doubled grid is alias-free for any field resolved on g.
  const TorusGrid fine(2 * g.n());
  const auto ffine = to_physical(resample(f, fine));
  std::vector<double> sq(fine.physical_size());
  for (std::size_t i = 0; i < sq.size(); ++i) sq[i] = ffine[i] * ffine[i];
  const auto lam_sq = to_physical(lambda_pow(from_physical(GridFunction(fine, std::move(sq))), gamma));
  const auto d = d_gamma(phys, gamma, scheme, constants);
  double worst = 0.0;
  for (int i1 = 0; i1 < g.n(); ++i1) {
    for (int i2 = 0; i2 < g.n(); ++i2) {
      const auto i = g.point_index(i1, i2);
      const double r = 2.0 * phys[i] * lam[i] - lam_sq[fine.point_index(2 * i1, 2 * i2)] - d[i];
      worst = std::max(worst, std::abs(r));
    }
  }
  return worst;
}

/// min_x D_gamma[delta_h f](x) |h|^gamma ||f||_inf^gamma / |delta_h f(x)|^{2+gamma}.
inline double lower_bound_ratio(const GridFunction& f, double gamma, GridShift h,
                                const QuadratureScheme& scheme = {},
                                const FracConstants& constants = {}) {
  detail::check_gamma(gamma, "lower_bound_ratio");
  const double len = h.length(f.grid());
  if (len == 0.0) throw std::invalid_argument("lower_bound_ratio: shift must be nonzero");
  const double sup = f.max_abs();
  const auto delta = shift_difference(f, h);
  const double dmax = delta.max_abs();
  if (sup == 0.0 || dmax == 0.0) {
    throw UndefinedRatioError("lower_bound_ratio: finite difference vanishes identically");
  }
  const auto d = d_gamma(delta, gamma, scheme, constants);
  const double scale = std::pow(len * sup, gamma);
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < d.values().size(); ++i) {
    const double a = std::abs(delta[i]);
    if (a <= 1e-12 * dmax) continue;
    best = std::min(best, d[i] * scale / std::pow(a, 2.0 + gamma));
  }
  return best;
}

inline double lower_bound_ratio(const SpectralField& f, double gamma, GridShift h,
                                const QuadratureScheme& scheme = {},
                                const FracConstants& constants = {}) {
  return lower_bound_ratio(to_physical(f), gamma, h, scheme, constants);
}

/// max_x |delta_h u(x)| / (r^{gamma/2} sqrt(D_gamma[delta_h f](x)) + |h| ||f||_inf / r).
inline double riesz_bound_ratio(const SpectralField& f, double gamma, GridShift h, double r,
                                const QuadratureScheme& scheme = {},
                                const FracConstants& constants = {}) {
  detail::check_gamma(gamma, "riesz_bound_ratio");
  const TorusGrid& g = f.grid();
  const double len = h.length(g);
  if (len == 0.0) throw std::invalid_argument("riesz_bound_ratio: shift must be nonzero");
  if (r < 4.0 * len * (1.0 - 1e-12)) {
    throw std::invalid_argument("riesz_bound_ratio: r must be at least 4|h|");
  }
  const auto phys = to_physical(f);
  const double sup = phys.max_abs();
  if (sup == 0.0) return 0.0;
  const auto u = riesz_perp(f);
  const auto du1 = shift_difference(to_physical(u.u1), h);
  const auto du2 = shift_difference(to_physical(u.u2), h);
  const auto d = d_gamma(shift_difference(phys, h), gamma, scheme, constants);
  const double far = len * sup / r;
  const double near = std::pow(r, 0.5 * gamma);
  double worst = 0.0;
  for (std::size_t i = 0; i < g.physical_size(); ++i) {
    const double num = std::hypot(du1[i], du2[i]);
    worst = std::max(worst, num / (near * std::sqrt(d[i]) + far));
  }
  return worst;
}

/// Least-squares refit of c_gamma so the quadrature matches |k|^gamma on cos(x1) and cos(2 x1).
inline double calibrate_c_gamma(double gamma, TorusGrid grid, const QuadratureScheme& scheme = {}) {
  detail::check_gamma(gamma, "calibrate_c_gamma");
  const FracConstants unit{1.0};
  double num = 0.0;
  double den = 0.0;
  for (int k = 1; k <= 2; ++k) {
    const auto mode = cosine_mode(grid, k, 0);
    const auto exact = to_physical(lambda_pow(mode, gamma));
    const auto quad = frac_lap_quadrature(mode, gamma, scheme, unit);
    for (std::size_t i = 0; i < grid.physical_size(); ++i) {
      num += exact[i] * quad[i];
      den += quad[i] * quad[i];
    }
  }
  return num / den;
}

/// One measured constant, serialized as gamma,n,K,h,quantity,value.
struct ConstantRow {
  double gamma = 0.0;
  int n = 0;
  int images = 0;
  double h = 0.0;
  std::string quantity;
  double value = 0.0;
};

inline void write_constant_rows(std::ostream& os, const std::vector<ConstantRow>& rows) {
  os << "gamma,n,K,h,quantity,value\n";
  const auto old = os.precision(17);
  for (const auto& r : rows) {
    os << r.gamma << ',' << r.n << ',' << r.images << ',' << r.h << ',' << r.quantity << ','
       << r.value << '\n';
  }
  os.precision(old);
}

}  // namespace sqg
