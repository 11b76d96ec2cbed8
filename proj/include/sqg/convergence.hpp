#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <stdexcept>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "sqg/estimates.hpp"
#include "sqg/operators.hpp"
#include "sqg/parallel.hpp"
#include "sqg/solver.hpp"

namespace sqg {

/// ||(Lambda^{gamma-1} - I) phi||_{H^m} <= ((gamma-1)/s) ||phi||_{H^{m+s}}, both sides exact in coefficients.
inline BoundReport check_spectral_lemma(const SpectralField& phi, double gamma, double m, double s) {
  if (!(gamma > 1.0)) throw std::domain_error("check_spectral_lemma: gamma must exceed 1");
  if (!(m >= 0.0)) throw std::domain_error("check_spectral_lemma: m must be nonnegative");
  if (!(s >= gamma - 1.0) || !(s > 0.0)) {
    throw std::invalid_argument("check_spectral_lemma: s must be >= gamma - 1");
  }
  const auto lhs_field = phi.map_modes([gamma](int k1, int k2, int) {
    const double k = std::hypot(static_cast<double>(k1), static_cast<double>(k2));
    return std::pow(k, gamma - 1.0) - 1.0;
  });
  const double lhs = sobolev_norm(lhs_field, m);
  const double constant = (gamma - 1.0) / s;
  const double rhs = constant * sobolev_norm(phi, m + s);
  BoundReport r;
  r.name = "spectral_lemma";
  r.constant = constant;
  r.margin_min = rhs - lhs;
  r.margins = {rhs - lhs};
  r.extras["lhs"] = lhs;
  r.extras["rhs"] = rhs;
  r.extras["gamma"] = gamma;
  r.extras["m"] = m;
  r.extras["s"] = s;
  if (lhs > rhs * (1.0 + 1e-12)) {
    r.status = BoundStatus::violated;
    r.witness_time = 0.0;
  }
  return r;
}

/// Critical and subcritical solutions sampled at one time.
struct PairSnapshot {
  double t = 0.0;
  SpectralField critical;
  SpectralField subcritical;
};

/// Difference of the critical and subcritical flows from shared data, for a grid of gammas.
struct ConvergenceRun {
  ConvergenceRun(SpectralField theta0, SpectralField forcing)
      : theta0(std::move(theta0)), forcing(std::move(forcing)) {}

  SpectralField theta0;
  SpectralField forcing;
  std::vector<double> gammas{1.4, 1.2, 1.1, 1.05};
  double horizon = 1.0;
  double sample_interval = 0.05;
  StepScheme scheme{};
  double spread_limit = 3.0;
  /// Length of a critical-flow run applied to theta0 before the comparison starts.
  double transient = 0.0;
  bool keep_snapshots = false;
  unsigned threads = 1;
};

struct ConvergenceRow {
  double gamma = 0.0;
  double t = 0.0;
  double eta_h1 = 0.0;
  double ratio = 0.0;
};

struct ConvergenceReport {
  std::vector<double> gammas;
  std::vector<ConvergenceRow> rows;
  /// max_t ||eta(t)||_{H^1} / (gamma - 1), per gamma
  std::vector<double> max_ratios;
  double spread_factor = 1.0;
  double spread_limit = 3.0;
  /// Per gamma, when requested.
  std::vector<std::vector<PairSnapshot>> snapshots;

  bool within_limit() const noexcept { return spread_factor < spread_limit; }

  void write_csv(std::ostream& os) const {
    os << "gamma,t,eta_h1,ratio\n";
    const auto old = os.precision(17);
    for (const auto& r : rows) os << r.gamma << ',' << r.t << ',' << r.eta_h1 << ',' << r.ratio << '\n';
    os.precision(old);
  }

  nlohmann::json summary() const {
    nlohmann::json j;
    j["gamma_grid"] = gammas;
    j["max_ratios"] = max_ratios;
    j["spread_factor"] = std::isfinite(spread_factor) ? nlohmann::json(spread_factor) : nlohmann::json(nullptr);
    j["spread_limit"] = spread_limit;
    j["within_limit"] = within_limit();
    return j;
  }
};

/// max/min over the ratios; 1 when all vanish.
inline double spread_of(const std::vector<double>& ratios) {
  if (ratios.empty()) return 1.0;
  const auto [lo, hi] = std::minmax_element(ratios.begin(), ratios.end());
  if (*hi == 0.0) return 1.0;
  if (*lo == 0.0) return std::numeric_limits<double>::infinity();
  return *hi / *lo;
}

/// Shared data after the optional critical-flow transient.
inline SpectralField convergence_initial_data(const ConvergenceRun& run) {
  if (run.transient <= 0.0) return run.theta0;
  return integrate(SolverState(run.theta0, run.forcing, 1.0), run.scheme, run.transient).theta();
}

/// Co-integrates theta^gamma and the critical solution for every gamma with the critical
/// run's step sequence and records ||eta||_{H^1}.
inline ConvergenceReport run_convergence(const ConvergenceRun& run) {
  for (double g : run.gammas) {
    if (!(g > 1.0 && g < 2.0)) throw std::domain_error("run_convergence: gamma must lie in (1,2)");
  }
  if (!(run.theta0.grid() == run.forcing.grid())) {
    throw std::invalid_argument("run_convergence: data and forcing on different grids");
  }
  const auto start = convergence_initial_data(run);
  ConvergenceReport report;
  report.gammas = run.gammas;
  report.spread_limit = run.spread_limit;
  std::vector<std::vector<ConvergenceRow>> rows(run.gammas.size());
  std::vector<std::vector<PairSnapshot>> snaps(run.gammas.size());
  parallel_for(run.gammas.size(), run.threads, [&](std::size_t k) {
    const double g = run.gammas[k];
    std::vector<SolverState> pair{SolverState(start, run.forcing, g), SolverState(start, run.forcing, 1.0)};
    co_integrate(
        std::move(pair), run.scheme, run.horizon, run.sample_interval,
        [&](const std::vector<SolverState>& s) {
          const double eta = sobolev_norm(s[1].theta() - s[0].theta(), 1.0);
          rows[k].push_back({g, s[0].time(), eta, eta / (g - 1.0)});
          if (run.keep_snapshots) snaps[k].push_back({s[0].time(), s[1].theta(), s[0].theta()});
        },
        DtPolicy{1});
  });
  for (std::size_t k = 0; k < rows.size(); ++k) {
    double mx = 0.0;
    for (const auto& r : rows[k]) mx = std::max(mx, r.ratio);
    report.max_ratios.push_back(mx);
    report.rows.insert(report.rows.end(), rows[k].begin(), rows[k].end());
  }
  report.spread_factor = spread_of(report.max_ratios);
  if (run.keep_snapshots) report.snapshots = std::move(snaps);
  return report;
}

/// Terms of the H^1 balance for eta = theta_critical - theta^gamma at one snapshot.
struct EtaBalanceTerms {
  /// ||eta||^2_{H^{1+gamma/2}}
  double dissipation = 0.0;
  /// <P(u.grad eta), Laplacian eta>
  double transport = 0.0;
  /// <P(w.grad theta^gamma), Laplacian eta>
  double coupling = 0.0;
  /// <(Lambda^gamma - Lambda) theta, Laplacian eta>
  double source = 0.0;

  double rhs() const noexcept { return transport + coupling - source; }
};

inline EtaBalanceTerms eta_balance_terms(const PairSnapshot& s, double gamma) {
  const auto eta = s.critical - s.subcritical;
  const auto lap = laplacian(eta);
  EtaBalanceTerms r;
  r.dissipation = std::pow(sobolev_norm(eta, 1.0 + 0.5 * gamma), 2);
  r.transport = inner_product(advection(riesz_perp(s.critical), eta), lap);
  r.coupling = inner_product(advection(riesz_perp(eta), s.subcritical), lap);
  r.source = inner_product(lambda_pow(s.critical, gamma) - lambda_pow(s.critical, 1.0), lap);
  return r;
}

/// 1/2 d/dt ||eta||^2_{H^1} + ||eta||^2_{H^{1+gamma/2}} minus the right-hand side at snapshot i,
/// with the time derivative from centered differences (one-sided at the ends).
inline double eta_energy_residual(const std::vector<PairSnapshot>& snaps, double gamma, std::size_t i) {
  if (snaps.size() < 2) throw std::invalid_argument("eta_energy_residual: need at least two snapshots");
  if (i >= snaps.size()) throw std::out_of_range("eta_energy_residual: snapshot index");
  const auto h1sq = [&](std::size_t j) {
    return std::pow(sobolev_norm(snaps[j].critical - snaps[j].subcritical, 1.0), 2);
  };
  const std::size_t lo = i == 0 ? 0 : i - 1;
  const std::size_t hi = i + 1 < snaps.size() ? i + 1 : i;
  const double deriv = (h1sq(hi) - h1sq(lo)) / (snaps[hi].t - snaps[lo].t);
  const auto terms = eta_balance_terms(snaps[i], gamma);
  return 0.5 * deriv + terms.dissipation - terms.rhs();
}

}  // namespace sqg
