// A few forced random trajectories with the decay and energy checks applied.
#include <cstdio>

#include "sqg/estimates.hpp"
#include "sqg/spectrum.hpp"

int main() {
  const sqg::TorusGrid grid(32);
  const double gamma = 1.5;
  const auto forcing = sqg::cosine_mode(grid, 1, 1, 0.3);
  for (std::uint64_t seed = 0; seed < 3; ++seed) {
    const auto theta0 = sqg::generate_field({2.0, 1.0, 6.0, 1.0, seed}, grid);
    sqg::EstimateLedger ledger(sqg::EstimateLedger::default_alphas(gamma));
    sqg::IntegrateOptions opts;
    opts.sample_interval = 0.1;
    opts.on_sample = [&](const sqg::SolverState& s) { ledger.record(s); };
    sqg::integrate(sqg::SolverState(theta0, forcing, gamma), sqg::StepScheme{}, 2.0, opts);
    const auto l2 = sqg::check_decay_l2(ledger, theta0, forcing);
    const auto energy = sqg::check_energy_inequality(ledger, theta0, forcing);
    std::printf("seed %llu: decay_l2 %s (margin %.3e), energy %s (margin %.3e)\n",
                static_cast<unsigned long long>(seed), sqg::to_string(l2.status).c_str(), l2.margin_min,
                sqg::to_string(energy.status).c_str(), energy.margin_min);
  }
}
