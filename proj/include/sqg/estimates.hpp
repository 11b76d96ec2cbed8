#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "sqg/ledger.hpp"
#include "sqg/operators.hpp"

namespace sqg {

enum class BoundStatus { holds, holds_with_constant, violated };

inline std::string to_string(BoundStatus s) {
  switch (s) {
    case BoundStatus::holds: return "holds";
    case BoundStatus::holds_with_constant: return "holds-with-constant";
    case BoundStatus::violated: return "violated";
  }
  return "unknown";
}

/// Outcome of checking one bound along a trajectory.
struct BoundReport {
  std::string name;
  BoundStatus status = BoundStatus::holds;
  /// Fitted or prescribed constant, when the bound has one.
  std::optional<double> constant;
  /// First sample where the bound fails.
  std::optional<double> witness_time;
  /// Smallest (bound - value) over the samples.
  double margin_min = std::numeric_limits<double>::infinity();
  std::vector<double> margins;
  std::map<std::string, double> extras;
  std::string note;

  bool violated() const noexcept { return status == BoundStatus::violated; }

  nlohmann::json to_json() const {
    const auto num = [](double v) -> nlohmann::json {
      return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(nullptr);
    };
    nlohmann::json j;
    j["name"] = name;
    j["status"] = to_string(status);
    j["constant"] = constant ? num(*constant) : nlohmann::json(nullptr);
    j["witness_time"] = witness_time ? num(*witness_time) : nlohmann::json(nullptr);
    j["margin_min"] = num(margin_min);
    if (!extras.empty()) {
      nlohmann::json e = nlohmann::json::object();
      for (const auto& [k, v] : extras) e[k] = num(v);
      j["extras"] = e;
    }
    if (!note.empty()) j["note"] = note;
    return j;
  }
};

/// Sampling too sparse for a derivative estimate.
class SamplingError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// K_inf = ||theta0||_inf + ||f||_inf / kappa.
inline double k_infty(const SpectralField& theta0, const SpectralField& f, double kappa = 1.0) {
  if (!(kappa >= 1.0)) throw std::domain_error("k_infty: kappa must be >= 1");
  return linf_norm(theta0) + linf_norm(f) / kappa;
}

namespace detail {

/// Compares value(t) against bound(t) sample by sample with relative slack tol.
template <class Bound>
BoundReport sample_check(std::string name, const std::vector<double>& t,
                         const std::vector<double>& value, Bound&& bound, double tol) {
  BoundReport r;
  r.name = std::move(name);
  for (std::size_t i = 0; i < t.size(); ++i) {
    const double b = bound(t[i]);
    const double margin = b - value[i];
    r.margins.push_back(margin);
    r.margin_min = std::min(r.margin_min, margin);
    if (margin < -tol * std::max(1.0, std::abs(b)) && !r.witness_time) {
      r.status = BoundStatus::violated;
      r.witness_time = t[i];
      r.extras["witness_value"] = value[i];
      r.extras["witness_bound"] = b;
    }
  }
  return r;
}

}  // namespace detail

/// ||theta(t)||_{L2} <= ||theta0|| e^{-kappa t} + ||f|| / kappa at every sample.
inline BoundReport check_decay_l2(const EstimateLedger& ledger, const SpectralField& theta0,
                                  const SpectralField& f, double kappa = 1.0,
                                  double tol = 1e-9) {
  const double a = l2_norm(theta0);
  const double b = l2_norm(f) / kappa;
  const double t0 = ledger.rows().empty() ? 0.0 : ledger.rows().front().t;
  auto r = detail::sample_check("decay_l2", ledger.times(), ledger.column("l2"),
                                [&](double t) { return a * std::exp(-kappa * (t - t0)) + b; }, tol);
  r.constant = kappa;
  return r;
}

/// ||theta(t)||_{L_inf} <= ||theta0||_inf e^{-kappa t} + ||f||_inf / kappa at every sample.
inline BoundReport check_decay_linf(const EstimateLedger& ledger, const SpectralField& theta0,
                                    const SpectralField& f, double kappa = 1.0,
                                    double tol = 1e-9) {
  const double a = linf_norm(theta0);
  const double b = linf_norm(f) / kappa;
  const double t0 = ledger.rows().empty() ? 0.0 : ledger.rows().front().t;
  auto r = detail::sample_check("decay_linf", ledger.times(), ledger.column("linf"),
                                [&](double t) { return a * std::exp(-kappa * (t - t0)) + b; }, tol);
  r.constant = kappa;
  return r;
}

/// ||theta(t)||^2 + int_0^t ||Lambda^{gamma/2} theta||^2 <= ||theta0||^2 + ||f||^2 t / kappa.
inline BoundReport check_energy_inequality(const EstimateLedger& ledger,
                                           const SpectralField& theta0, const SpectralField& f,
                                           double kappa = 1.0, double tol = 1e-9) {
  const double a = std::pow(l2_norm(theta0), 2);
  const double b = std::pow(l2_norm(f), 2) / kappa;
  const auto l2 = ledger.column("l2");
  const auto diss = ledger.column("dissipation");
  std::vector<double> lhs(l2.size());
  for (std::size_t i = 0; i < l2.size(); ++i) lhs[i] = l2[i] * l2[i] + diss[i];
  const double t0 = ledger.rows().empty() ? 0.0 : ledger.rows().front().t;
  auto r = detail::sample_check("energy_inequality", ledger.times(), lhs,
                                [&](double t) { return a + b * (t - t0); }, tol);
  r.constant = kappa;
  return r;
}

/// Fits the smallest c with
/// d/dt ||theta||^2_{H^alpha} + 1/4 ||theta||^2_{H^{alpha+gamma/2}} <= c K_inf^{4 gamma/(gamma-1)} + c ||f||^2_{H^alpha}.
///
/// The time derivative is a centered difference on the ledger samples.
inline BoundReport check_sobolev_inequality(const EstimateLedger& ledger, double alpha,
                                            double gamma, double k_inf, double f_h_alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw std::domain_error("check_sobolev_inequality: alpha must lie in (0,1)");
  if (!(gamma > 1.0 && gamma < 2.0)) throw std::domain_error("check_sobolev_inequality: gamma must lie in (1,2)");
  const auto ia = ledger.alpha_index(alpha);
  const auto ib = ledger.alpha_index(alpha + 0.5 * gamma);
  if (!ia || !ib) {
    throw SamplingError("check_sobolev_inequality: ledger lacks H^alpha or H^{alpha+gamma/2} samples");
  }
  const auto& rows = ledger.rows();
  if (rows.size() < 5) {
    throw SamplingError("check_sobolev_inequality: need at least 5 samples, got " +
                        std::to_string(rows.size()));
  }
  const double scale = std::pow(k_inf, 4.0 * gamma / (gamma - 1.0)) + f_h_alpha * f_h_alpha;
  BoundReport r;
  r.name = "sobolev_inequality";
  double c = 0.0;
  double worst_lhs = -std::numeric_limits<double>::infinity();
  double worst_t = 0.0;
  for (std::size_t i = 1; i + 1 < rows.size(); ++i) {
    const double y0 = std::pow(rows[i - 1].sobolev[*ia], 2);
    const double y1 = std::pow(rows[i + 1].sobolev[*ia], 2);
    const double dydt = (y1 - y0) / (rows[i + 1].t - rows[i - 1].t);
    const double lhs = dydt + 0.25 * std::pow(rows[i].sobolev[*ib], 2);
    if (lhs > worst_lhs) {
      worst_lhs = lhs;
      worst_t = rows[i].t;
    }
    r.margins.push_back(-lhs);
    if (scale > 0.0) c = std::max(c, lhs / scale);
  }
  r.margin_min = -worst_lhs;
  r.extras["lhs_max"] = worst_lhs;
  r.extras["lhs_max_time"] = worst_t;
  r.extras["scale"] = scale;
  r.extras["alpha"] = alpha;
  if (scale == 0.0 && worst_lhs > 0.0) {
    r.status = BoundStatus::violated;
    r.witness_time = worst_t;
    r.note = "positive left side with vanishing right side";
    return r;
  }
  r.status = BoundStatus::holds_with_constant;
  r.constant = c;
  return r;
}

/// Radii of the absorbing balls, with every unnamed constant set to c.
struct AbsorbingRadii {
  double r_inf = 0.0;
  double r1_gamma = 0.0;
  double r1 = 0.0;
  double r2 = 0.0;
};

/// R_inf = 2||f||_inf / kappa,
/// R_{1,gamma}^2 = c (2 R_inf)^{4 gamma/(gamma-1)} + c ||f||^2_{H^{2-gamma}},
/// R_1^2 = c (2 R_inf)^{4 gamma/(gamma+beta-1)} + c ||f||^2_{H^{2-gamma}},
/// R_{2,gamma}^2 = c (2 R_{1,gamma}^2 + ||f||^2_{H^{2-gamma}}) e^{c R_{1,gamma}^2}.
inline AbsorbingRadii absorbing_radii(double gamma, double f_linf, double f_h2mg, double kappa,
                                      double beta, double c = 1.0) {
  if (!(gamma > 1.0 && gamma < 2.0)) throw std::domain_error("absorbing_radii: gamma must lie in (1,2)");
  if (!(beta > 0.0 && beta <= 0.25)) throw std::domain_error("absorbing_radii: beta must lie in (0,1/4]");
  if (!(kappa >= 1.0)) throw std::domain_error("absorbing_radii: kappa must be >= 1");
  AbsorbingRadii r;
  r.r_inf = 2.0 * f_linf / kappa;
  const double f2 = f_h2mg * f_h2mg;
  const double r1g_sq = c * std::pow(2.0 * r.r_inf, 4.0 * gamma / (gamma - 1.0)) + c * f2;
  const double r1_sq = c * std::pow(2.0 * r.r_inf, 4.0 * gamma / (gamma + beta - 1.0)) + c * f2;
  r.r1_gamma = std::sqrt(r1g_sq);
  r.r1 = std::sqrt(r1_sq);
  r.r2 = std::sqrt(c * (2.0 * r1g_sq + f2) * std::exp(c * r1g_sq));
  return r;
}

/// beta = min{1 / (c3 K_inf^{3 gamma/(gamma+2)}), 1/4}.
inline double beta_exponent(double k_inf, double gamma, double c3 = 64.0) {
  if (!(c3 >= 64.0)) throw std::invalid_argument("beta_exponent: c3 must be >= 64");
  if (!(k_inf > 0.0)) throw std::domain_error("beta_exponent: K_inf must be positive");
  if (!(gamma > 1.0 && gamma < 2.0)) throw std::domain_error("beta_exponent: gamma must lie in (1,2)");
  return std::min(1.0 / (c3 * std::pow(k_inf, 3.0 * gamma / (gamma + 2.0))), 0.25);
}

/// Fits psi(t) <= c K_inf^2 over all samples and [theta]_{C^beta} <= c' K_inf after t_beta.
inline BoundReport check_holder_absorbing(const EstimateLedger& ledger, double k_inf,
                                          double gamma, double beta) {
  if (!ledger.has_holder()) {
    throw SamplingError("check_holder_absorbing: ledger carries no Holder samples");
  }
  if (!(k_inf > 0.0)) throw std::domain_error("check_holder_absorbing: K_inf must be positive");
  const double tb = regularization_time(gamma, beta);
  const double t0 = ledger.rows().empty() ? 0.0 : ledger.rows().front().t;
  BoundReport r;
  r.name = "holder_absorbing";
  double c_psi = 0.0;
  double c_holder = 0.0;
  bool after = false;
  for (const auto& row : ledger.rows()) {
    const double ratio = *row.psi / (k_inf * k_inf);
    c_psi = std::max(c_psi, ratio);
    r.margins.push_back(ratio);
    if (row.t - t0 >= tb) {
      after = true;
      c_holder = std::max(c_holder, *row.holder / k_inf);
    }
  }
  r.status = BoundStatus::holds_with_constant;
  r.constant = c_psi;
  r.margin_min = 0.0;
  r.extras["t_beta"] = tb;
  r.extras["beta"] = beta;
  r.extras["k_inf"] = k_inf;
  if (after) {
    r.extras["holder_constant"] = c_holder;
  } else {
    r.note = "no samples after t_beta";
  }
  return r;
}

/// One trajectory's sampled norm.
struct NormSeries {
  std::vector<double> t;
  std::vector<double> value;
};

/// Largest value over the final fraction of every trajectory.
inline double fitted_asymptotic_radius(const std::vector<NormSeries>& family, double tail_fraction = 0.25) {
  double r = 0.0;
  for (const auto& s : family) {
    if (s.t.empty()) continue;
    const double cut = s.t.back() - tail_fraction * (s.t.back() - s.t.front());
    for (std::size_t i = 0; i < s.t.size(); ++i) {
      if (s.t[i] >= cut) r = std::max(r, s.value[i]);
    }
  }
  return r;
}

/// First entry into {value <= radius} for each trajectory and confinement to
/// {value <= confinement * radius} afterwards.
inline BoundReport check_absorbing_entry(const std::vector<NormSeries>& family, double radius,
                                         const std::string& norm_name, double confinement = 1.0) {
  BoundReport r;
  r.name = "absorbing_entry_" + norm_name;
  r.constant = radius;
  double latest = 0.0;
  double worst_ratio = 0.0;
  for (std::size_t k = 0; k < family.size(); ++k) {
    const auto& s = family[k];
    std::optional<std::size_t> entry;
    for (std::size_t i = 0; i < s.t.size(); ++i) {
      if (s.value[i] <= radius) {
        entry = i;
        break;
      }
    }
    if (!entry) {
      r.status = BoundStatus::violated;
      r.note = "not absorbed by T (trajectory " + std::to_string(k) + ")";
      if (!s.t.empty() && !r.witness_time) r.witness_time = s.t.back();
      continue;
    }
    const double te = s.t[*entry] - (s.t.empty() ? 0.0 : s.t.front());
    r.extras["entry_time_" + std::to_string(k)] = te;
    latest = std::max(latest, te);
    for (std::size_t i = *entry; i < s.t.size(); ++i) {
      worst_ratio = std::max(worst_ratio, s.value[i] / radius);
      const double margin = confinement * radius - s.value[i];
      r.margin_min = std::min(r.margin_min, margin);
      if (margin < -1e-12 * radius && r.status != BoundStatus::violated) {
        r.status = BoundStatus::violated;
        r.witness_time = s.t[i];
        r.note = "left the absorbing ball after entry (trajectory " + std::to_string(k) + ")";
      }
    }
  }
  r.extras["latest_entry_time"] = latest;
  r.extras["max_ratio_after_entry"] = worst_ratio;
  return r;
}

namespace detail {

/// Linear interpolation of a sampled series at time x.
inline double interpolate(const std::vector<double>& t, const std::vector<double>& v, double x) {
  const auto it = std::upper_bound(t.begin(), t.end(), x);
  if (it == t.begin()) return v.front();
  if (it == t.end()) return v.back();
  const auto i = static_cast<std::size_t>(it - t.begin());
  const double w = (x - t[i - 1]) / (t[i] - t[i - 1]);
  return (1.0 - w) * v[i - 1] + w * v[i];
}

/// Trapezoid integral of a sampled series over [a, b].
inline double integrate_series(const std::vector<double>& t, const std::vector<double>& v,
                               double a, double b) {
  std::vector<double> xs{a};
  for (double x : t) {
    if (x > a && x < b) xs.push_back(x);
  }
  xs.push_back(b);
  double s = 0.0;
  for (std::size_t i = 0; i + 1 < xs.size(); ++i) {
    s += 0.5 * (xs[i + 1] - xs[i]) * (interpolate(t, v, xs[i]) + interpolate(t, v, xs[i + 1]));
  }
  return s;
}

}  // namespace detail

/// Uniform Gronwall bound y(t0 + r) <= (int y / r + int b) exp(int a), integrals over [t0, t0 + r].
inline double uniform_gronwall(const std::vector<double>& t, const std::vector<double>& y,
                               const std::vector<double>& a, const std::vector<double>& b,
                               double window, std::optional<double> start = std::nullopt) {
  if (t.size() < 2 || y.size() != t.size() || a.size() != t.size() || b.size() != t.size()) {
    throw std::invalid_argument("uniform_gronwall: series lengths differ or are too short");
  }
  for (std::size_t i = 1; i < t.size(); ++i) {
    if (!(t[i] > t[i - 1])) throw std::invalid_argument("uniform_gronwall: time grid not increasing");
  }
  if (!(window > 0.0)) throw std::invalid_argument("uniform_gronwall: window must be positive");
  const double t0 = start.value_or(t.front());
  if (t0 < t.front() || t0 + window > t.back() * (1.0 + 1e-12) + 1e-12) {
    throw std::invalid_argument("uniform_gronwall: window exceeds the series");
  }
  const double iy = detail::integrate_series(t, y, t0, t0 + window);
  const double ia = detail::integrate_series(t, a, t0, t0 + window);
  const double ib = detail::integrate_series(t, b, t0, t0 + window);
  return (iy / window + ib) * std::exp(ia);
}

}  // namespace sqg
