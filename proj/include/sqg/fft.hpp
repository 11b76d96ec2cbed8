#pragma once

#include <fftw3.h>

#include <complex>
#include <map>
#include <memory>
#include <mutex>
#include <span>
#include <vector>

#include "sqg/grid.hpp"

namespace sqg {

using Complex = std::complex<double>;

namespace detail {

/// Real-to-complex / complex-to-real FFTW plans for one grid size.
///
/// Plans are created once under a global lock and executed through the
/// new-array interface, which FFTW documents as thread-safe.
class FftPlans {
 public:
  explicit FftPlans(int n) {
    std::vector<double> real(static_cast<std::size_t>(n) * n);
    std::vector<Complex> spec(static_cast<std::size_t>(n) * (n / 2 + 1));
    auto* cplx = reinterpret_cast<fftw_complex*>(spec.data());
    const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
    forward_ = fftw_plan_dft_r2c_2d(n, n, real.data(), cplx, flags);
    inverse_ = fftw_plan_dft_c2r_2d(n, n, cplx, real.data(), flags);
  }
  FftPlans(const FftPlans&) = delete;
  FftPlans& operator=(const FftPlans&) = delete;
  ~FftPlans() {
    fftw_destroy_plan(forward_);
    fftw_destroy_plan(inverse_);
  }

  static const FftPlans& for_size(int n) {
    static std::mutex mutex;
    static std::map<int, std::unique_ptr<FftPlans>> cache;
    std::lock_guard lock(mutex);
    auto& slot = cache[n];
    if (!slot) slot = std::make_unique<FftPlans>(n);
    return *slot;
  }

  fftw_plan forward() const noexcept { return forward_; }
  fftw_plan inverse() const noexcept { return inverse_; }

 private:
  fftw_plan forward_ = nullptr;
  fftw_plan inverse_ = nullptr;
};

}  // namespace detail

/// Fourier coefficients phi_k = (4 pi^2)^-1 \int phi e^{-ik.x} dx from grid samples.
inline void forward_fft(const TorusGrid& grid, std::span<const double> physical,
                        std::span<Complex> spectral) {
  const auto& plans = detail::FftPlans::for_size(grid.n());
  std::vector<double> in(physical.begin(), physical.end());
  fftw_execute_dft_r2c(plans.forward(), in.data(),
                       reinterpret_cast<fftw_complex*>(spectral.data()));
  const double scale = 1.0 / static_cast<double>(grid.physical_size());
  for (auto& c : spectral) c *= scale;
}

/// Grid samples of sum_k phi_k e^{ik.x}.
inline void inverse_fft(const TorusGrid& grid, std::span<const Complex> spectral,
                        std::span<double> physical) {
  const auto& plans = detail::FftPlans::for_size(grid.n());
  // c2r overwrites its input.
  std::vector<Complex> in(spectral.begin(), spectral.end());
  fftw_execute_dft_c2r(plans.inverse(), reinterpret_cast<fftw_complex*>(in.data()),
                       physical.data());
}

}  // namespace sqg
