#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "sqg/operators.hpp"
#include "sqg/solver.hpp"

namespace sqg {

/// Smooth cutoff xi(t) = (1 - t/t_beta)^{t_beta} for t < t_beta and 0 afterwards,
/// where t_beta = (2 + gamma) / (2 gamma (1 - beta)).
inline double regularization_time(double gamma, double beta) {
  if (!(gamma > 1.0 && gamma < 2.0)) throw std::domain_error("regularization_time: gamma must lie in (1,2)");
  if (!(beta > 0.0 && beta <= 0.25)) throw std::domain_error("regularization_time: beta must lie in (0,1/4]");
  return (2.0 + gamma) / (2.0 * gamma * (1.0 - beta));
}

inline double xi_weight(double t, double gamma, double beta) {
  const double tb = regularization_time(gamma, beta);
  if (t <= 0.0) return 1.0;
  if (t >= tb) return 0.0;
  return std::pow(1.0 - t / tb, tb);
}

/// Per-sample Holder diagnostics: [theta]_{C^beta} and psi = (sup w)^2 with the xi(t) weight.
struct HolderSampling {
  double beta = 0.25;
  double gamma = 1.5;
  /// Time at which xi restarts from 1.
  double t_origin = 0.0;
  PairRange pairs{};
};

/// One sampled row of a trajectory.
struct LedgerRow {
  double t = 0.0;
  double l2 = 0.0;
  double linf = 0.0;
  /// ||theta||_{H^alpha}, in the ledger's alpha order
  std::vector<double> sobolev;
  double dissipation = 0.0;
  double forcing_work = 0.0;
  double viscous = 0.0;
  std::optional<double> holder;
  std::optional<double> xi;
  std::optional<double> psi;
  double energy_residual = 0.0;
};

/// Time series of norms, energy integrals and Holder quantities along one trajectory.
///
/// CSV columns: t, l2, linf, h_<alpha>..., dissipation, forcing_work, viscous,
/// [holder, xi, psi,] energy_residual.
class EstimateLedger {
 public:
  explicit EstimateLedger(std::vector<double> alphas, std::optional<HolderSampling> holder = {})
      : alphas_(std::move(alphas)), holder_(holder) {}

  /// Exponents 2 - gamma, gamma/2 and 2 - gamma/2 plus any extras.
  static std::vector<double> default_alphas(double gamma, std::vector<double> extra = {}) {
    std::vector<double> a{2.0 - gamma, 0.5 * gamma, 2.0 - 0.5 * gamma};
    for (double e : extra) a.push_back(e);
    return a;
  }

  const std::vector<double>& alphas() const noexcept { return alphas_; }
  const std::optional<HolderSampling>& holder_sampling() const noexcept { return holder_; }
  const std::vector<LedgerRow>& rows() const noexcept { return rows_; }
  std::size_t size() const noexcept { return rows_.size(); }
  bool has_holder() const noexcept { return holder_.has_value(); }

  /// Index of alpha in the ledger, matched to 1e-9.
  std::optional<std::size_t> alpha_index(double alpha) const {
    for (std::size_t i = 0; i < alphas_.size(); ++i) {
      if (std::abs(alphas_[i] - alpha) < 1e-9) return i;
    }
    return std::nullopt;
  }

  void append(LedgerRow row) {
    if (row.sobolev.size() != alphas_.size()) {
      throw std::invalid_argument("EstimateLedger: Sobolev column count mismatch");
    }
    if (!rows_.empty()) {
      if (!(row.t > rows_.back().t)) throw std::invalid_argument("EstimateLedger: times must increase");
      if (row.dissipation < rows_.back().dissipation - 1e-12 * std::abs(rows_.back().dissipation)) {
        throw std::invalid_argument("EstimateLedger: cumulative dissipation decreased");
      }
    }
    const auto finite = [](double v) { return std::isfinite(v); };
    bool ok = finite(row.t) && finite(row.l2) && finite(row.linf) && finite(row.dissipation) &&
              finite(row.forcing_work) && finite(row.viscous) && finite(row.energy_residual);
    for (double v : row.sobolev) ok = ok && finite(v);
    for (const auto& v : {row.holder, row.xi, row.psi}) ok = ok && (!v || finite(*v));
    if (!ok) throw std::invalid_argument("EstimateLedger: non-finite entry at t = " + std::to_string(row.t));
    rows_.push_back(std::move(row));
  }

  /// Samples a solver state.
  void record(const SolverState& s) {
    LedgerRow r;
    const auto& th = s.theta();
    const auto phys = to_physical(th);
    r.t = s.time();
    r.l2 = l2_norm(th);
    r.linf = phys.max_abs();
    for (double a : alphas_) r.sobolev.push_back(sobolev_norm(th, a));
    r.dissipation = s.budget().dissipation;
    r.forcing_work = s.budget().forcing_work;
    r.viscous = s.budget().viscous;
    if (holder_) {
      const double xi = xi_weight(s.time() - holder_->t_origin, holder_->gamma, holder_->beta);
      r.holder = holder_seminorm(phys, holder_->beta, holder_->pairs);
      r.xi = xi;
      const double w = xi == 0.0 ? *r.holder : weighted_w_sup(phys, holder_->beta, xi, holder_->pairs);
      r.psi = w * w;
    }
    r.energy_residual = s.budget().residual(r.l2 * r.l2);
    append(std::move(r));
  }

  std::vector<double> column(const std::string& name) const {
    std::vector<double> out;
    out.reserve(rows_.size());
    for (const auto& r : rows_) out.push_back(value(r, name));
    return out;
  }

  std::vector<double> times() const { return column("t"); }

  std::vector<std::string> header() const {
    std::vector<std::string> h{"t", "l2", "linf"};
    for (double a : alphas_) h.push_back(alpha_column(a));
    h.insert(h.end(), {"dissipation", "forcing_work", "viscous"});
    if (holder_) h.insert(h.end(), {"holder", "xi", "psi"});
    h.push_back("energy_residual");
    return h;
  }

  static std::string alpha_column(double alpha) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "h_%.10g", alpha);
    return buf;
  }

  void write_csv(std::ostream& os) const {
    const auto h = header();
    for (std::size_t i = 0; i < h.size(); ++i) os << (i ? "," : "") << h[i];
    os << '\n';
    char buf[40];
    for (const auto& r : rows_) {
      for (std::size_t i = 0; i < h.size(); ++i) {
        std::snprintf(buf, sizeof buf, "%.17g", value(r, h[i]));
        os << (i ? "," : "") << buf;
      }
      os << '\n';
    }
  }

  void write_csv(const std::string& path) const {
    std::ofstream os(path);
    if (!os) throw std::runtime_error("cannot write " + path);
    write_csv(os);
  }

  /// Parses a ledger written by write_csv.
  static EstimateLedger read_csv(std::istream& is) {
    std::string line;
    if (!std::getline(is, line)) throw std::runtime_error("ledger CSV: missing header");
    const auto names = split(line);
    std::vector<double> alphas;
    bool holder = false;
    for (const auto& n : names) {
      if (n.rfind("h_", 0) == 0) alphas.push_back(std::stod(n.substr(2)));
      if (n == "holder") holder = true;
    }
    for (const char* required : {"t", "l2", "linf", "dissipation", "forcing_work", "viscous", "energy_residual"}) {
      if (std::find(names.begin(), names.end(), required) == names.end()) {
        throw std::runtime_error(std::string("ledger CSV: missing column ") + required);
      }
    }
    EstimateLedger ledger(alphas, holder ? std::optional<HolderSampling>(HolderSampling{}) : std::nullopt);
    std::size_t lineno = 1;
    while (std::getline(is, line)) {
      ++lineno;
      if (line.empty()) continue;
      const auto cells = split(line);
      if (cells.size() != names.size()) {
        throw std::runtime_error("ledger CSV: wrong cell count on line " + std::to_string(lineno));
      }
      LedgerRow r;
      for (std::size_t i = 0; i < names.size(); ++i) {
        const double v = std::stod(cells[i]);
        const auto& n = names[i];
        if (n == "t") r.t = v;
        else if (n == "l2") r.l2 = v;
        else if (n == "linf") r.linf = v;
        else if (n.rfind("h_", 0) == 0) r.sobolev.push_back(v);
        else if (n == "dissipation") r.dissipation = v;
        else if (n == "forcing_work") r.forcing_work = v;
        else if (n == "viscous") r.viscous = v;
        else if (n == "holder") r.holder = v;
        else if (n == "xi") r.xi = v;
        else if (n == "psi") r.psi = v;
        else if (n == "energy_residual") r.energy_residual = v;
      }
      ledger.append(std::move(r));
    }
    return ledger;
  }

  static EstimateLedger read_csv(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw std::runtime_error("cannot read " + path);
    return read_csv(is);
  }

 private:
  static std::vector<std::string> split(const std::string& line) {
    std::vector<std::string> out;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
      if (!cell.empty() && cell.back() == '\r') cell.pop_back();
      out.push_back(cell);
    }
    return out;
  }

  double value(const LedgerRow& r, const std::string& name) const {
    if (name == "t") return r.t;
    if (name == "l2") return r.l2;
    if (name == "linf") return r.linf;
    if (name == "dissipation") return r.dissipation;
    if (name == "forcing_work") return r.forcing_work;
    if (name == "viscous") return r.viscous;
    if (name == "energy_residual") return r.energy_residual;
    if (name == "holder" && r.holder) return *r.holder;
    if (name == "xi" && r.xi) return *r.xi;
    if (name == "psi" && r.psi) return *r.psi;
    for (std::size_t i = 0; i < alphas_.size(); ++i) {
      if (name == alpha_column(alphas_[i])) return r.sobolev[i];
    }
    throw std::out_of_range("EstimateLedger: no column " + name);
  }

  std::vector<double> alphas_;
  std::optional<HolderSampling> holder_;
  std::vector<LedgerRow> rows_;
};

}  // namespace sqg
