// Real-space singular integral versus the Fourier multiplier |k|^gamma.
#include <algorithm>
#include <cmath>
#include <cstdio>

#include "sqg/quadrature.hpp"

int main() {
  for (int n : {32, 64}) {
    const sqg::TorusGrid grid(n);
    const auto f = sqg::cosine_mode(grid, 2, 0);
    for (double gamma : {1.2, 1.5, 1.8}) {
      const auto quad = sqg::frac_lap_quadrature(f, gamma);
      const auto spec = sqg::to_physical(sqg::lambda_pow(f, gamma));
      double err = 0.0;
      for (std::size_t i = 0; i < grid.physical_size(); ++i) err = std::max(err, std::abs(quad[i] - spec[i]));
      std::printf("n=%3d gamma=%.1f  sup error / sup |Lambda^gamma f| = %.3e\n", n, gamma,
                  err / spec.max_abs());
    }
  }
  const sqg::TorusGrid grid(64);
  std::printf("Cordoba residual on cos(x1), gamma=1.5: %.3e\n",
              sqg::cordoba_residual(sqg::cosine_mode(grid, 1, 0), 1.5));
}
