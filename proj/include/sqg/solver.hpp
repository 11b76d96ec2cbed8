#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "sqg/field.hpp"
#include "sqg/operators.hpp"

namespace sqg {

/// Time-stepping controls for the integrating-factor RK4 scheme.
struct StepScheme {
  double cfl = 0.5;
  /// Fixed step; 0 selects the adaptive CFL step.
  double fixed_dt = 0.0;
  /// Upper limit on the adaptive step.
  double max_dt = 0.05;
  bool dealias = true;
};

/// Time integrals entering the L2 energy balance.
struct EnergyBudget {
  double initial_l2_sq = 0.0;
  /// int ||Lambda^{gamma/2} theta||^2 dt
  double dissipation = 0.0;
  /// int epsilon ||grad theta||^2 dt
  double viscous = 0.0;
  /// int <f, theta> dt
  double forcing_work = 0.0;

  /// ||theta||^2 - ||theta0||^2 + 2 (dissipation + viscous - forcing_work); zero for exact solutions.
  double residual(double l2_sq) const {
    return l2_sq - initial_l2_sq + 2.0 * (dissipation + viscous - forcing_work);
  }
};

/// u.grad(theta) with u = grad-perp Lambda^{-1} theta, products formed on the grid.
inline SpectralField nonlinear_term(const SpectralField& theta, bool dealiased = true) {
  if (dealiased) return advection(riesz_perp(theta), theta);
  const auto u = riesz_perp(theta);
  const auto u1 = to_physical(u.u1);
  const auto u2 = to_physical(u.u2);
  const auto d1 = to_physical(partial(theta, 1));
  const auto d2 = to_physical(partial(theta, 2));
  std::vector<double> prod(theta.grid().physical_size());
  for (std::size_t i = 0; i < prod.size(); ++i) prod[i] = u1[i] * d1[i] + u2[i] * d2[i];
  return from_physical(GridFunction(theta.grid(), std::move(prod)));
}

namespace detail {

struct NonlinearEval {
  SpectralField value;
  /// max over the grid of |u|
  double speed = 0.0;
};

inline NonlinearEval nonlinear_with_speed(const SpectralField& theta, bool dealiased) {
  const auto u = riesz_perp(theta);
  const auto u1 = to_physical(dealiased ? dealias(u.u1) : u.u1);
  const auto u2 = to_physical(dealiased ? dealias(u.u2) : u.u2);
  const auto d1 = to_physical(dealiased ? dealias(partial(theta, 1)) : partial(theta, 1));
  const auto d2 = to_physical(dealiased ? dealias(partial(theta, 2)) : partial(theta, 2));
  std::vector<double> prod(theta.grid().physical_size());
  double speed = 0.0;
  for (std::size_t i = 0; i < prod.size(); ++i) {
    prod[i] = u1[i] * d1[i] + u2[i] * d2[i];
    speed = std::max(speed, std::hypot(u1[i], u2[i]));
  }
  auto value = from_physical(GridFunction(theta.grid(), std::move(prod)));
  return {dealiased ? dealias(value) : std::move(value), speed};
}

/// Per-mode data shared by every state of one trajectory.
struct LinearPart {
  LinearPart(const SpectralField& forcing, double gamma, double epsilon)
      : symbol(forcing.grid().spectral_size(), 0.0), forcing(forcing), steady(forcing.grid()) {
    const TorusGrid& g = forcing.grid();
    std::vector<Complex> s(g.spectral_size());
    for (int row = 0; row < g.n(); ++row) {
      const double k1 = g.wavenumber(row);
      for (int col = 0; col < g.nk(); ++col) {
        if (row == 0 && col == 0) continue;
        const double ksq = k1 * k1 + static_cast<double>(col) * col;
        const auto i = g.mode_index(row, col);
        symbol[i] = std::pow(ksq, 0.5 * gamma) + epsilon * ksq;
        s[i] = forcing[i] / symbol[i];
      }
    }
    steady = SpectralField(g, std::move(s));
  }
  /// |k|^gamma + epsilon |k|^2
  std::vector<double> symbol;
  SpectralField forcing;
  /// f / (|k|^gamma + epsilon |k|^2), the stationary solution of the linear part
  SpectralField steady;
};

}  // namespace detail

/// One point of a trajectory: theta(t) plus the data needed to continue it.
class SolverState {
 public:
  SolverState(SpectralField theta, SpectralField forcing, double gamma, double epsilon = 0.0,
              double time = 0.0)
      : theta_(std::move(theta)), gamma_(gamma), epsilon_(epsilon), time_(time) {
    if (!(gamma >= 1.0 && gamma < 2.0)) {
      throw std::domain_error("SolverState: gamma must lie in [1,2)");
    }
    if (!(epsilon >= 0.0)) throw std::domain_error("SolverState: epsilon must be nonnegative");
    if (!(forcing.grid() == theta_.grid())) {
      throw std::invalid_argument("SolverState: forcing and theta grids differ");
    }
    linear_ = std::make_shared<const detail::LinearPart>(forcing, gamma, epsilon);
    const double l2 = l2_norm(theta_);
    budget_.initial_l2_sq = l2 * l2;
  }

  const SpectralField& theta() const noexcept { return theta_; }
  const SpectralField& forcing() const noexcept { return linear_->forcing; }
  const TorusGrid& grid() const noexcept { return theta_.grid(); }
  double gamma() const noexcept { return gamma_; }
  double epsilon() const noexcept { return epsilon_; }
  double time() const noexcept { return time_; }
  const EnergyBudget& budget() const noexcept { return budget_; }
  long steps() const noexcept { return steps_; }

  double energy_residual() const {
    const double l2 = l2_norm(theta_);
    return budget_.residual(l2 * l2);
  }

  /// Replaces theta, keeping gamma, forcing and time but restarting the energy budget.
  SolverState with_theta(SpectralField theta) const {
    SolverState s(*this);
    s.theta_ = std::move(theta);
    s.cache_.reset();
    const double l2 = l2_norm(s.theta_);
    s.budget_ = EnergyBudget{l2 * l2};
    return s;
  }

 private:
  friend SolverState step(const SolverState&, double, bool);
  friend double stable_dt(const SolverState&, const StepScheme&);

  const detail::NonlinearEval& nonlinear(bool dealiased) const {
    if (!cache_ || cache_dealiased_ != dealiased) {
      cache_ = detail::nonlinear_with_speed(theta_, dealiased);
      cache_dealiased_ = dealiased;
    }
    return *cache_;
  }

  SpectralField theta_;
  double gamma_;
  double epsilon_;
  double time_;
  EnergyBudget budget_;
  long steps_ = 0;
  std::shared_ptr<const detail::LinearPart> linear_;
  mutable std::optional<detail::NonlinearEval> cache_;
  mutable bool cache_dealiased_ = true;
};

/// Non-finite coefficients after a step. Carries the last finite state.
class BlowUpError : public std::runtime_error {
 public:
  BlowUpError(const std::string& what, SolverState last_good)
      : std::runtime_error(what), last_good_(std::move(last_good)) {}
  const SolverState& last_good() const noexcept { return last_good_; }

 private:
  SolverState last_good_;
};

/// Step allowed by the CFL condition, or the fixed step when one is configured.
inline double stable_dt(const SolverState& s, const StepScheme& scheme) {
  if (scheme.fixed_dt > 0.0) return scheme.fixed_dt;
  if (!(scheme.cfl > 0.0 && scheme.cfl <= 1.0)) {
    throw std::invalid_argument("StepScheme: cfl must lie in (0,1]");
  }
  const double speed = s.nonlinear(scheme.dealias).speed;
  const double dx = s.grid().spacing();
  if (speed <= 0.0) return scheme.max_dt;
  return std::min(scheme.max_dt, scheme.cfl * dx / speed);
}

namespace detail {

/// Integrand values and time derivatives of the energy-balance integrals.
struct BudgetRates {
  double dissipation = 0.0, dissipation_rate = 0.0;
  double viscous = 0.0, viscous_rate = 0.0;
  double forcing = 0.0, forcing_rate = 0.0;
};

inline BudgetRates budget_rates(const SpectralField& theta, const SpectralField& nonlinear,
                                const LinearPart& lin, double gamma, double epsilon) {
  const TorusGrid& g = theta.grid();
  BudgetRates r;
  for (int row = 0; row < g.n(); ++row) {
    const double k1 = g.wavenumber(row);
    for (int col = 0; col < g.nk(); ++col) {
      if (row == 0 && col == 0) continue;
      const auto i = g.mode_index(row, col);
      const double w = g.column_weight(col);
      const double ksq = k1 * k1 + static_cast<double>(col) * col;
      const double kg = std::pow(ksq, 0.5 * gamma);
      const Complex th = theta[i];
      const Complex f = lin.forcing[i];
      const Complex rate = -nonlinear[i] - lin.symbol[i] * th + f;
      r.dissipation += w * kg * std::norm(th);
      r.dissipation_rate += 2.0 * w * kg * (std::conj(th) * rate).real();
      r.viscous += w * epsilon * ksq * std::norm(th);
      r.viscous_rate += 2.0 * w * epsilon * ksq * (std::conj(th) * rate).real();
      r.forcing += w * (std::conj(th) * f).real();
      r.forcing_rate += w * (std::conj(rate) * f).real();
    }
  }
  r.dissipation *= torus_area;
  r.dissipation_rate *= torus_area;
  r.viscous *= torus_area;
  r.viscous_rate *= torus_area;
  r.forcing *= torus_area;
  r.forcing_rate *= torus_area;
  return r;
}

/// Endpoint-corrected trapezoid rule, fourth order for smooth integrands.
inline double corrected_trapezoid(double dt, double g0, double d0, double g1, double d1) {
  return 0.5 * dt * (g0 + g1) + dt * dt / 12.0 * (d0 - d1);
}

}  // namespace detail

/// Advances by dt with integrating-factor RK4 applied to theta - f / (|k|^gamma + epsilon |k|^2).
///
/// The linear part is integrated exactly, so forced single-mode equilibria are preserved.
inline SolverState step(const SolverState& s, double dt, bool dealiased = true) {
  if (!(dt > 0.0) || !std::isfinite(dt)) {
    throw std::invalid_argument("step: dt must be positive and finite");
  }
  const TorusGrid& g = s.grid();
  const auto& lin = *s.linear_;
  const std::size_t m = g.spectral_size();
  std::vector<double> e(m);
  std::vector<double> e2(m);
  for (std::size_t i = 0; i < m; ++i) {
    e[i] = std::exp(-lin.symbol[i] * dt);
    e2[i] = std::exp(-0.5 * lin.symbol[i] * dt);
  }
  const SpectralField deviation = s.theta_ - lin.steady;
  const auto w = deviation.coeffs();
  const auto theta_of = [&](std::vector<Complex>&& v) {
    return SpectralField(g, std::move(v)) + lin.steady;
  };
  const auto eval = [&](const SpectralField& th) {
    return detail::nonlinear_with_speed(th, dealiased).value;
  };
  const auto& n1 = s.nonlinear(dealiased).value;

  // k_j = -N(theta_j)
  std::vector<Complex> buf(m);
  for (std::size_t i = 0; i < m; ++i) buf[i] = e2[i] * (w[i] - 0.5 * dt * n1[i]);
  const auto n2 = eval(theta_of(std::move(buf)));
  buf.assign(m, Complex{});
  for (std::size_t i = 0; i < m; ++i) buf[i] = e2[i] * w[i] - 0.5 * dt * n2[i];
  const auto n3 = eval(theta_of(std::move(buf)));
  buf.assign(m, Complex{});
  for (std::size_t i = 0; i < m; ++i) buf[i] = e[i] * w[i] - dt * e2[i] * n3[i];
  const auto n4 = eval(theta_of(std::move(buf)));
  buf.assign(m, Complex{});
  for (std::size_t i = 0; i < m; ++i) {
    buf[i] = e[i] * w[i] -
             dt / 6.0 * (e[i] * n1[i] + 2.0 * e2[i] * (n2[i] + n3[i]) + n4[i]);
  }

  SolverState next(s);
  next.theta_ = theta_of(std::move(buf));
  if (!next.theta_.is_finite()) {
    throw BlowUpError("non-finite coefficients at t = " + std::to_string(s.time_ + dt), s);
  }
  next.cache_ = detail::nonlinear_with_speed(next.theta_, dealiased);
  next.cache_dealiased_ = dealiased;
  next.time_ = s.time_ + dt;
  ++next.steps_;

  const auto r0 = detail::budget_rates(s.theta_, n1, lin, s.gamma_, s.epsilon_);
  const auto r1 = detail::budget_rates(next.theta_, next.cache_->value, lin, s.gamma_, s.epsilon_);
  next.budget_.dissipation += detail::corrected_trapezoid(
      dt, r0.dissipation, r0.dissipation_rate, r1.dissipation, r1.dissipation_rate);
  next.budget_.viscous +=
      detail::corrected_trapezoid(dt, r0.viscous, r0.viscous_rate, r1.viscous, r1.viscous_rate);
  next.budget_.forcing_work +=
      detail::corrected_trapezoid(dt, r0.forcing, r0.forcing_rate, r1.forcing, r1.forcing_rate);
  return next;
}

inline SolverState step(const SolverState& s, const StepScheme& scheme) {
  return step(s, stable_dt(s, scheme), scheme.dealias);
}

namespace detail {

/// Shortens dt so the step ends exactly on the next target time.
inline double clamp_to_target(double dt, double now, double target) {
  const double remaining = target - now;
  return remaining <= dt * (1.0 + 1e-6) ? remaining : dt;
}

/// Sorted target times: samples, checkpoints and the final time.
inline std::vector<double> stop_times(double t0, double t_end, double interval,
                                      const std::vector<double>& extra) {
  std::vector<double> out;
  if (interval > 0.0) {
    for (long k = 1;; ++k) {
      const double t = t0 + k * interval;
      if (t >= t_end - 1e-12 * std::max(1.0, t_end)) break;
      out.push_back(t);
    }
  }
  for (double t : extra) {
    if (t > t0 && t < t_end) out.push_back(t);
  }
  out.push_back(t_end);
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end(),
                        [](double a, double b) { return std::abs(a - b) <= 1e-12 * std::max(1.0, std::abs(a)); }),
            out.end());
  return out;
}

inline bool is_sample_time(double t, double t0, double interval) {
  if (interval <= 0.0) return false;
  const double k = std::round((t - t0) / interval);
  return k >= 1.0 && std::abs(t - (t0 + k * interval)) <= 1e-9 * std::max(1.0, std::abs(t));
}

}  // namespace detail

/// Hooks and output times for integrate.
struct IntegrateOptions {
  /// Spacing of sample callbacks; 0 samples only the initial and final states.
  double sample_interval = 0.0;
  std::function<void(const SolverState&)> on_sample;
  std::vector<double> checkpoint_times;
  std::function<void(const SolverState&)> on_checkpoint;
};

/// Runs the solution map from s.time() to s.time() + duration.
///
/// on_sample sees the initial state, every sample time and the final state.
inline SolverState integrate(SolverState s, const StepScheme& scheme, double duration,
                             const IntegrateOptions& opts = {}) {
  if (!(duration > 0.0)) throw std::invalid_argument("integrate: duration must be positive");
  const double t0 = s.time();
  const double t_end = t0 + duration;
  if (opts.on_sample) opts.on_sample(s);
  for (double target : detail::stop_times(t0, t_end, opts.sample_interval, opts.checkpoint_times)) {
    while (s.time() < target) {
      const double now = s.time();
      const double dt = detail::clamp_to_target(stable_dt(s, scheme), now, target);
      if (dt <= 0.0) break;
      const bool last = dt == target - now;
      s = step(s, dt, scheme.dealias);
      if (last) break;
    }
    const bool is_last = target == t_end;
    const bool sample = is_last || detail::is_sample_time(target, t0, opts.sample_interval);
    if (sample && opts.on_sample) opts.on_sample(s);
    if (opts.on_checkpoint) {
      for (double c : opts.checkpoint_times) {
        if (std::abs(c - target) <= 1e-12 * std::max(1.0, std::abs(c))) opts.on_checkpoint(s);
      }
    }
  }
  return s;
}

/// Which member of a co-integrated family sets the shared step.
struct DtPolicy {
  /// Index of the governing state; -1 takes the minimum stable step over all states.
  int leader = -1;
};

/// Advances several states with one shared dt sequence.
inline std::vector<SolverState> co_integrate(
    std::vector<SolverState> states, const StepScheme& scheme, double duration,
    double sample_interval, const std::function<void(const std::vector<SolverState>&)>& on_sample,
    DtPolicy policy = {}) {
  if (states.empty()) return states;
  if (!(duration > 0.0)) throw std::invalid_argument("co_integrate: duration must be positive");
  if (policy.leader >= static_cast<int>(states.size())) {
    throw std::invalid_argument("co_integrate: leader index out of range");
  }
  const double t0 = states.front().time();
  const double t_end = t0 + duration;
  if (on_sample) on_sample(states);
  for (double target : detail::stop_times(t0, t_end, sample_interval, {})) {
    while (states.front().time() < target) {
      double dt = std::numeric_limits<double>::infinity();
      if (policy.leader >= 0) {
        dt = stable_dt(states[static_cast<std::size_t>(policy.leader)], scheme);
      } else {
        for (const auto& s : states) dt = std::min(dt, stable_dt(s, scheme));
      }
      const double now = states.front().time();
      dt = detail::clamp_to_target(dt, now, target);
      if (dt <= 0.0) break;
      const bool last = dt == target - now;
      for (auto& s : states) s = step(s, dt, scheme.dealias);
      if (last) break;
    }
    if (on_sample) on_sample(states);
  }
  return states;
}

/// Difference series of two co-evolved solutions.
struct PairedTrajectory {
  std::vector<double> times;
  /// ||theta_a - theta_b||_{H^{2-gamma}}
  std::vector<double> difference;
  SolverState final_a;
  SolverState final_b;
};

inline PairedTrajectory pair_integrate(const SpectralField& theta_a, const SpectralField& theta_b,
                                       const SpectralField& forcing, double gamma,
                                       const StepScheme& scheme, double duration,
                                       double sample_interval, double epsilon = 0.0) {
  if (!(theta_a.grid() == theta_b.grid())) {
    throw std::invalid_argument("pair_integrate: initial data on different grids");
  }
  std::vector<double> times;
  std::vector<double> diff;
  std::vector<SolverState> states{SolverState(theta_a, forcing, gamma, epsilon),
                                  SolverState(theta_b, forcing, gamma, epsilon)};
  auto out = co_integrate(
      std::move(states), scheme, duration, sample_interval,
      [&](const std::vector<SolverState>& s) {
        times.push_back(s[0].time());
        diff.push_back(sobolev_norm(s[0].theta() - s[1].theta(), 2.0 - gamma));
      },
      DtPolicy{0});
  return PairedTrajectory{std::move(times), std::move(diff), std::move(out[0]), std::move(out[1])};
}

}  // namespace sqg
