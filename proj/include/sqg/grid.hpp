#pragma once

#include <cmath>
#include <cstddef>
#include <numbers>
#include <stdexcept>
#include <string>

namespace sqg {

inline constexpr double pi = std::numbers::pi;
inline constexpr double two_pi = 2.0 * std::numbers::pi;
/// Area of the periodic cell [0, 2pi)^2.
inline constexpr double torus_area = 4.0 * std::numbers::pi * std::numbers::pi;

/// Uniform collocation grid on the 2pi-periodic 2-torus.
///
/// Physical samples are stored row-major with the row index along x1 and the
/// column index along x2. Spectral coefficients use the matching
/// half-spectrum layout: n rows (k1 in FFT order) by n/2+1 columns (k2 >= 0).
class TorusGrid {
 public:
  explicit TorusGrid(int n) : n_(n) {
    if (n < 8 || (n & (n - 1)) != 0) {
      throw std::invalid_argument("TorusGrid: n must be a power of two >= 8 (got " +
                                  std::to_string(n) + ")");
    }
  }

  int n() const noexcept { return n_; }
  /// Number of stored k2 columns in the half spectrum.
  int nk() const noexcept { return n_ / 2 + 1; }
  double spacing() const noexcept { return two_pi / n_; }
  std::size_t physical_size() const noexcept { return static_cast<std::size_t>(n_) * n_; }
  std::size_t spectral_size() const noexcept { return static_cast<std::size_t>(n_) * nk(); }

  std::size_t point_index(int i1, int i2) const noexcept {
    return static_cast<std::size_t>(i1) * n_ + i2;
  }
  std::size_t mode_index(int row, int col) const noexcept {
    return static_cast<std::size_t>(row) * nk() + col;
  }

  /// Signed wavenumber of an FFT-ordered index. Index n/2 maps to +n/2.
  int wavenumber(int index) const noexcept { return index <= n_ / 2 ? index : index - n_; }
  /// FFT row holding the signed wavenumber k1.
  int row_of(int k1) const noexcept { return k1 >= 0 ? k1 : k1 + n_; }

  /// Largest |k_i| kept by the 2/3 truncation.
  int dealias_kmax() const noexcept { return (n_ - 1) / 3; }

  bool is_nyquist(int row, int col) const noexcept { return row == n_ / 2 || col == n_ / 2; }

  /// Weight of a stored half-spectrum column in full-lattice sums.
  double column_weight(int col) const noexcept {
    return (col == 0 || col == n_ / 2) ? 1.0 : 2.0;
  }

  /// Signed minimal-image offset of a grid shift, in [-n/2, n/2].
  int minimal_image(int shift) const noexcept {
    int s = ((shift % n_) + n_) % n_;
    return s <= n_ / 2 ? s : s - n_;
  }

  friend bool operator==(const TorusGrid&, const TorusGrid&) = default;

 private:
  int n_;
};

/// A grid translation h = (s1, s2) * spacing, taken modulo the torus.
struct GridShift {
  int s1 = 0;
  int s2 = 0;

  /// Torus (minimal-image) length of the shift.
  double length(const TorusGrid& grid) const {
    const double m1 = grid.minimal_image(s1);
    const double m2 = grid.minimal_image(s2);
    return grid.spacing() * std::hypot(m1, m2);
  }
};

struct GridPoint {
  int i1 = 0;
  int i2 = 0;
};

}  // namespace sqg
