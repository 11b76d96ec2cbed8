#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

#include "sqg/fft.hpp"
#include "sqg/grid.hpp"

namespace sqg {

/// Real grid samples on a TorusGrid. Unlike SpectralField, the mean is kept.
class GridFunction {
 public:
  explicit GridFunction(TorusGrid grid) : grid_(grid), values_(grid.physical_size(), 0.0) {}
  GridFunction(TorusGrid grid, std::vector<double> values)
      : grid_(grid), values_(std::move(values)) {
    if (values_.size() != grid_.physical_size()) {
      throw std::invalid_argument("GridFunction: sample count does not match grid");
    }
  }

  /// Samples f(x) at every collocation point.
  template <class Fn>
  static GridFunction sample(TorusGrid grid, Fn&& fn) {
    std::vector<double> v(grid.physical_size());
    const double h = grid.spacing();
    for (int i1 = 0; i1 < grid.n(); ++i1) {
      for (int i2 = 0; i2 < grid.n(); ++i2) v[grid.point_index(i1, i2)] = fn(i1 * h, i2 * h);
    }
    return GridFunction(grid, std::move(v));
  }

  const TorusGrid& grid() const noexcept { return grid_; }
  std::span<const double> values() const noexcept { return values_; }
  double operator[](std::size_t i) const noexcept { return values_[i]; }

  /// Value at (i1, i2) with periodic wrap-around.
  double at(int i1, int i2) const noexcept {
    const int n = grid_.n();
    i1 = ((i1 % n) + n) % n;
    i2 = ((i2 % n) + n) % n;
    return values_[grid_.point_index(i1, i2)];
  }

  double mean() const noexcept {
    double s = 0.0;
    for (double v : values_) s += v;
    return s / static_cast<double>(values_.size());
  }

  double max_abs() const noexcept {
    double m = 0.0;
    for (double v : values_) m = std::max(m, std::abs(v));
    return m;
  }

 private:
  TorusGrid grid_;
  std::vector<double> values_;
};

/// Mean-free real scalar field stored as half-spectrum Fourier coefficients.
///
/// The zero mode is forced to zero on construction. Instances are immutable;
/// every operation returns a new field.
class SpectralField {
 public:
  explicit SpectralField(TorusGrid grid) : grid_(grid), coeffs_(grid.spectral_size()) {}
  SpectralField(TorusGrid grid, std::vector<Complex> coeffs)
      : grid_(grid), coeffs_(std::move(coeffs)) {
    if (coeffs_.size() != grid_.spectral_size()) {
      throw std::invalid_argument("SpectralField: coefficient count does not match grid");
    }
    coeffs_[0] = 0.0;
  }

  const TorusGrid& grid() const noexcept { return grid_; }
  std::span<const Complex> coeffs() const noexcept { return coeffs_; }
  Complex operator[](std::size_t i) const noexcept { return coeffs_[i]; }

  /// Coefficient of the signed wavevector (k1, k2), using conjugate symmetry for k2 < 0.
  Complex coeff(int k1, int k2) const {
    const int half = grid_.n() / 2;
    if (std::abs(k1) > half || std::abs(k2) > half) return 0.0;
    if (k2 >= 0) return coeffs_[grid_.mode_index(grid_.row_of(k1), k2)];
    return std::conj(coeffs_[grid_.mode_index(grid_.row_of(-k1), -k2)]);
  }

  bool is_finite() const noexcept {
    return std::all_of(coeffs_.begin(), coeffs_.end(), [](const Complex& c) {
      return std::isfinite(c.real()) && std::isfinite(c.imag());
    });
  }

  /// Applies m(k1, k2) coefficient-wise, returning a new field.
  template <class Multiplier>
  SpectralField map_modes(Multiplier&& m) const {
    std::vector<Complex> out(coeffs_.size());
    const int n = grid_.n();
    for (int row = 0; row < n; ++row) {
      const int k1 = grid_.wavenumber(row);
      for (int col = 0; col < grid_.nk(); ++col) {
        const auto idx = grid_.mode_index(row, col);
        out[idx] = (row == 0 && col == 0) ? Complex{} : m(k1, col, row) * coeffs_[idx];
      }
    }
    return SpectralField(grid_, std::move(out));
  }

  friend SpectralField operator+(const SpectralField& a, const SpectralField& b) {
    return combine(a, b, 1.0, 1.0);
  }
  friend SpectralField operator-(const SpectralField& a, const SpectralField& b) {
    return combine(a, b, 1.0, -1.0);
  }
  friend SpectralField operator*(double s, const SpectralField& a) {
    std::vector<Complex> out(a.coeffs_);
    for (auto& c : out) c *= s;
    return SpectralField(a.grid_, std::move(out));
  }

 private:
  static SpectralField combine(const SpectralField& a, const SpectralField& b, double sa,
                               double sb) {
    if (!(a.grid_ == b.grid_)) throw std::invalid_argument("SpectralField: grid mismatch");
    std::vector<Complex> out(a.coeffs_.size());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = sa * a.coeffs_[i] + sb * b.coeffs_[i];
    return SpectralField(a.grid_, std::move(out));
  }

  TorusGrid grid_;
  std::vector<Complex> coeffs_;
};

/// Pair of mean-free velocity components.
struct VelocityField {
  SpectralField u1;
  SpectralField u2;
};

inline GridFunction to_physical(const SpectralField& field) {
  std::vector<double> v(field.grid().physical_size());
  inverse_fft(field.grid(), field.coeffs(), v);
  return GridFunction(field.grid(), std::move(v));
}

/// Spectral projection of grid samples; the mean is discarded.
inline SpectralField from_physical(const GridFunction& f) {
  std::vector<Complex> c(f.grid().spectral_size());
  forward_fft(f.grid(), f.values(), c);
  return SpectralField(f.grid(), std::move(c));
}

/// Zeroes every mode with |k1| or |k2| above the 2/3 cutoff.
inline SpectralField dealias(const SpectralField& field) {
  const int kmax = field.grid().dealias_kmax();
  return field.map_modes([kmax](int k1, int k2, int) {
    return (std::abs(k1) > kmax || k2 > kmax) ? 0.0 : 1.0;
  });
}

/// Exact resampling of a field on a grid of a different size.
///
/// Modes that do not fit on the target grid are dropped, and Nyquist modes of
/// the source are dropped because their sign is ambiguous.
inline SpectralField resample(const SpectralField& field, TorusGrid target) {
  const TorusGrid& src = field.grid();
  const int lim = std::min(src.n(), target.n()) / 2;
  std::vector<Complex> out(target.spectral_size());
  for (int row = 0; row < src.n(); ++row) {
    const int k1 = src.wavenumber(row);
    if (std::abs(k1) >= lim) continue;
    for (int col = 0; col < lim && col < src.nk(); ++col) {
      out[target.mode_index(target.row_of(k1), col)] = field[src.mode_index(row, col)];
    }
  }
  return SpectralField(target, std::move(out));
}

/// Adds c e^{ik.x} + conj(c) e^{-ik.x} to a half-spectrum coefficient array.
inline void add_real_mode(const TorusGrid& grid, std::vector<Complex>& coeffs, int k1, int k2,
                          Complex c) {
  const int half = grid.n() / 2;
  if (std::abs(k1) >= half || std::abs(k2) >= half) {
    throw std::invalid_argument("add_real_mode: wavevector outside the resolved lattice");
  }
  if (k1 == 0 && k2 == 0) return;
  if (k2 < 0 || (k2 == 0 && k1 < 0)) {
    k1 = -k1;
    k2 = -k2;
    c = std::conj(c);
  }
  coeffs[grid.mode_index(grid.row_of(k1), k2)] += c;
  if (k2 == 0) coeffs[grid.mode_index(grid.row_of(-k1), 0)] += std::conj(c);
}

/// One real Fourier mode A cos(k.x + phase).
struct FourierMode {
  int k1 = 0;
  int k2 = 0;
  double amplitude = 1.0;
  double phase = 0.0;
};

/// Sum of real cosine modes as a spectral field.
inline SpectralField cosine_modes(TorusGrid grid, std::span<const FourierMode> modes) {
  std::vector<Complex> c(grid.spectral_size());
  for (const auto& m : modes) {
    add_real_mode(grid, c, m.k1, m.k2, 0.5 * m.amplitude * std::polar(1.0, m.phase));
  }
  return SpectralField(grid, std::move(c));
}

inline SpectralField cosine_mode(TorusGrid grid, int k1, int k2, double amplitude = 1.0,
                                 double phase = 0.0) {
  const FourierMode m{k1, k2, amplitude, phase};
  return cosine_modes(grid, std::span<const FourierMode>(&m, 1));
}

}  // namespace sqg
