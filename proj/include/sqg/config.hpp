#pragma once

#include <cmath>
#include <cstdint>
#include <fstream>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "sqg/errors.hpp"
#include "sqg/field.hpp"
#include "sqg/operators.hpp"
#include "sqg/quadrature.hpp"
#include "sqg/solver.hpp"
#include "sqg/spectrum.hpp"

namespace sqg {

/// Parameters of one experiment, read from a flat `key = value` file.
///
/// Lists are whitespace separated; wavevectors are written `k1,k2`.
struct ExperimentConfig {
  int n = 64;
  double gamma = 1.5;
  double epsilon = 0.0;
  double cfl = 0.5;
  double dt = 0.0;
  double max_dt = 0.05;
  double T = 1.0;
  std::uint64_t seed = 0;
  double kappa = 1.0;

  double spectrum_a = 2.0;
  double spectrum_kmin = 1.0;
  double spectrum_kmax = 4.0;
  double spectrum_amplitude = 0.0;

  std::vector<std::pair<int, int>> initial_modes;
  std::vector<double> initial_amplitudes;
  double initial_scale_linf = 0.0;

  std::vector<std::pair<int, int>> forcing_modes;
  std::vector<double> forcing_amplitudes;
  double forcing_scale_linf = 0.0;

  double output_interval = 0.1;
  std::string output_dir = "out";
  std::vector<double> output_checkpoints;

  int quadrature_images = 3;

  bool holder_sample = false;
  double holder_beta = 0.0;
  double holder_c3 = 64.0;
  int holder_seeds = 1;
  std::vector<double> holder_gammas;

  std::vector<double> convergence_gammas{1.4, 1.2, 1.1, 1.05};
  double convergence_T = 1.0;
  double convergence_interval = 0.05;
  double convergence_spread_limit = 3.0;
  double convergence_transient = 0.0;

  int lowerbounds_count = 5;
  std::vector<std::pair<int, int>> lowerbounds_shifts{{1, 0}, {2, 1}};
  std::vector<double> lowerbounds_r_factors{4.0, 8.0, 16.0};

  TorusGrid grid() const { return TorusGrid(n); }

  StepScheme scheme() const {
    StepScheme s;
    s.cfl = cfl;
    s.fixed_dt = dt;
    s.max_dt = max_dt;
    return s;
  }

  QuadratureScheme quadrature() const {
    QuadratureScheme q;
    q.images = quadrature_images;
    return q;
  }

  SpectrumRecipe spectrum(std::uint64_t seed_override) const {
    return SpectrumRecipe{spectrum_a, spectrum_kmin, spectrum_kmax, spectrum_amplitude, seed_override};
  }
};

namespace detail {

inline std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

inline std::vector<std::string> words(const std::string& s) {
  std::istringstream is(s);
  std::vector<std::string> out;
  for (std::string w; is >> w;) out.push_back(w);
  return out;
}

inline double parse_double(const std::string& key, const std::string& v) {
  try {
    std::size_t pos = 0;
    const double d = std::stod(v, &pos);
    if (pos != v.size() || !std::isfinite(d)) throw std::invalid_argument(v);
    return d;
  } catch (const std::exception&) {
    throw ConfigError(key, "expected a number, got '" + v + "'");
  }
}

inline long long parse_int(const std::string& key, const std::string& v) {
  try {
    std::size_t pos = 0;
    const long long i = std::stoll(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return i;
  } catch (const std::exception&) {
    throw ConfigError(key, "expected an integer, got '" + v + "'");
  }
}

inline bool parse_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw ConfigError(key, "expected true or false, got '" + v + "'");
}

inline std::vector<double> parse_doubles(const std::string& key, const std::string& v) {
  std::vector<double> out;
  for (const auto& w : words(v)) out.push_back(parse_double(key, w));
  return out;
}

inline std::vector<std::pair<int, int>> parse_pairs(const std::string& key, const std::string& v) {
  std::vector<std::pair<int, int>> out;
  for (const auto& w : words(v)) {
    const auto comma = w.find(',');
    if (comma == std::string::npos) throw ConfigError(key, "expected k1,k2 pairs, got '" + w + "'");
    out.emplace_back(static_cast<int>(parse_int(key, w.substr(0, comma))),
                     static_cast<int>(parse_int(key, w.substr(comma + 1))));
  }
  return out;
}

inline std::string join(const std::vector<double>& v) {
  std::ostringstream os;
  os.precision(17);
  for (std::size_t i = 0; i < v.size(); ++i) os << (i ? " " : "") << v[i];
  return os.str();
}

inline std::string join(const std::vector<std::pair<int, int>>& v) {
  std::ostringstream os;
  for (std::size_t i = 0; i < v.size(); ++i) os << (i ? " " : "") << v[i].first << ',' << v[i].second;
  return os.str();
}

inline std::string num(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

}  // namespace detail

/// Applies one `key = value` assignment; unknown keys are rejected.
inline void apply_setting(ExperimentConfig& c, const std::string& key, const std::string& v) {
  using namespace detail;
  if (key == "n") c.n = static_cast<int>(parse_int(key, v));
  else if (key == "gamma") c.gamma = parse_double(key, v);
  else if (key == "epsilon") c.epsilon = parse_double(key, v);
  else if (key == "cfl") c.cfl = parse_double(key, v);
  else if (key == "dt") c.dt = parse_double(key, v);
  else if (key == "max_dt") c.max_dt = parse_double(key, v);
  else if (key == "T") c.T = parse_double(key, v);
  else if (key == "seed") {
    const auto s = parse_int(key, v);
    if (s < 0) throw ConfigError(key, "must be nonnegative");
    c.seed = static_cast<std::uint64_t>(s);
  } else if (key == "kappa") c.kappa = parse_double(key, v);
  else if (key == "spectrum.a") c.spectrum_a = parse_double(key, v);
  else if (key == "spectrum.band") {
    const auto b = parse_doubles(key, v);
    if (b.size() != 2) throw ConfigError(key, "expected two numbers k_min k_max");
    c.spectrum_kmin = b[0];
    c.spectrum_kmax = b[1];
  } else if (key == "spectrum.amplitude") c.spectrum_amplitude = parse_double(key, v);
  else if (key == "initial.modes") c.initial_modes = parse_pairs(key, v);
  else if (key == "initial.amplitudes") c.initial_amplitudes = parse_doubles(key, v);
  else if (key == "initial.scale_linf") c.initial_scale_linf = parse_double(key, v);
  else if (key == "forcing.modes") c.forcing_modes = parse_pairs(key, v);
  else if (key == "forcing.amplitudes") c.forcing_amplitudes = parse_doubles(key, v);
  else if (key == "forcing.scale_linf") c.forcing_scale_linf = parse_double(key, v);
  else if (key == "output.interval") c.output_interval = parse_double(key, v);
  else if (key == "output.dir") c.output_dir = v;
  else if (key == "output.checkpoints") c.output_checkpoints = parse_doubles(key, v);
  else if (key == "quadrature.images") c.quadrature_images = static_cast<int>(parse_int(key, v));
  else if (key == "holder.sample") c.holder_sample = parse_bool(key, v);
  else if (key == "holder.beta") c.holder_beta = parse_double(key, v);
  else if (key == "holder.c3") c.holder_c3 = parse_double(key, v);
  else if (key == "holder.seeds") c.holder_seeds = static_cast<int>(parse_int(key, v));
  else if (key == "holder.gammas") c.holder_gammas = parse_doubles(key, v);
  else if (key == "convergence.gammas") c.convergence_gammas = parse_doubles(key, v);
  else if (key == "convergence.T") c.convergence_T = parse_double(key, v);
  else if (key == "convergence.interval") c.convergence_interval = parse_double(key, v);
  else if (key == "convergence.spread_limit") c.convergence_spread_limit = parse_double(key, v);
  else if (key == "convergence.transient") c.convergence_transient = parse_double(key, v);
  else if (key == "lowerbounds.count") c.lowerbounds_count = static_cast<int>(parse_int(key, v));
  else if (key == "lowerbounds.shifts") c.lowerbounds_shifts = parse_pairs(key, v);
  else if (key == "lowerbounds.r_factors") c.lowerbounds_r_factors = parse_doubles(key, v);
  else throw ConfigError(key, "unknown key");
}

/// Range and consistency checks. Each failure names its key.
inline void validate(const ExperimentConfig& c) {
  if (c.n < 8 || (c.n & (c.n - 1)) != 0) throw ConfigError("n", "must be a power of two >= 8");
  if (!(c.gamma >= 1.0 && c.gamma < 2.0)) throw ConfigError("gamma", "must lie in [1,2)");
  if (!(c.epsilon >= 0.0)) throw ConfigError("epsilon", "must be nonnegative");
  if (!(c.cfl > 0.0 && c.cfl <= 1.0)) throw ConfigError("cfl", "must lie in (0,1]");
  if (c.dt < 0.0) throw ConfigError("dt", "must be nonnegative (0 selects the CFL step)");
  if (!(c.max_dt > 0.0)) throw ConfigError("max_dt", "must be positive");
  if (!(c.T > 0.0)) throw ConfigError("T", "must be positive");
  if (!(c.kappa >= 1.0)) throw ConfigError("kappa", "must be >= 1");
  if (c.spectrum_amplitude < 0.0) throw ConfigError("spectrum.amplitude", "must be nonnegative");
  if (c.spectrum_amplitude > 0.0 && c.spectrum_kmax > TorusGrid(c.n).dealias_kmax()) {
    throw ConfigError("spectrum.band", "k_max exceeds the dealiasing radius " +
                                           std::to_string(TorusGrid(c.n).dealias_kmax()));
  }
  if (c.initial_modes.size() != c.initial_amplitudes.size()) {
    throw ConfigError("initial.amplitudes", "needs one amplitude per entry of initial.modes");
  }
  if (c.forcing_modes.size() != c.forcing_amplitudes.size()) {
    throw ConfigError("forcing.amplitudes", "needs one amplitude per entry of forcing.modes");
  }
  const auto check_modes = [&](const char* key, const std::vector<std::pair<int, int>>& modes) {
    for (const auto& [a, b] : modes) {
      if ((a == 0 && b == 0) || std::abs(a) >= c.n / 2 || std::abs(b) >= c.n / 2) {
        throw ConfigError(key, "wavevector " + std::to_string(a) + "," + std::to_string(b) +
                                   " is zero or unresolved");
      }
    }
  };
  check_modes("initial.modes", c.initial_modes);
  check_modes("forcing.modes", c.forcing_modes);
  if (c.initial_scale_linf < 0.0) throw ConfigError("initial.scale_linf", "must be nonnegative");
  if (c.forcing_scale_linf < 0.0) throw ConfigError("forcing.scale_linf", "must be nonnegative");
  if (c.output_interval < 0.0) throw ConfigError("output.interval", "must be nonnegative");
  if (c.output_dir.empty()) throw ConfigError("output.dir", "must not be empty");
  if (c.quadrature_images < 1) throw ConfigError("quadrature.images", "must be >= 1");
  if (c.holder_beta != 0.0 && !(c.holder_beta > 0.0 && c.holder_beta <= 0.25)) {
    throw ConfigError("holder.beta", "must lie in (0,1/4], or 0 for the K_inf formula");
  }
  if (!(c.holder_c3 >= 64.0)) throw ConfigError("holder.c3", "must be >= 64");
  if (c.holder_seeds < 1) throw ConfigError("holder.seeds", "must be >= 1");
  for (double g : c.holder_gammas) {
    if (!(g > 1.0 && g < 2.0)) throw ConfigError("holder.gammas", "entries must lie in (1,2)");
  }
  for (double g : c.convergence_gammas) {
    if (!(g > 1.0 && g < 2.0)) throw ConfigError("convergence.gammas", "entries must lie in (1,2)");
  }
  if (!(c.convergence_T > 0.0)) throw ConfigError("convergence.T", "must be positive");
  if (!(c.convergence_interval > 0.0)) throw ConfigError("convergence.interval", "must be positive");
  if (!(c.convergence_spread_limit > 1.0)) throw ConfigError("convergence.spread_limit", "must exceed 1");
  if (c.convergence_transient < 0.0) throw ConfigError("convergence.transient", "must be nonnegative");
  if (c.lowerbounds_count < 1) throw ConfigError("lowerbounds.count", "must be >= 1");
  for (const auto& [a, b] : c.lowerbounds_shifts) {
    if (a == 0 && b == 0) throw ConfigError("lowerbounds.shifts", "shifts must be nonzero");
  }
  for (double r : c.lowerbounds_r_factors) {
    if (!(r >= 4.0)) throw ConfigError("lowerbounds.r_factors", "factors must be >= 4");
  }
}

inline ExperimentConfig parse_config(std::istream& is) {
  ExperimentConfig c;
  std::map<std::string, int> seen;
  std::string line;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = detail::trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("line " + std::to_string(lineno), "expected key = value");
    }
    const auto key = detail::trim(line.substr(0, eq));
    const auto value = detail::trim(line.substr(eq + 1));
    if (seen[key]++) throw ConfigError(key, "set more than once");
    apply_setting(c, key, value);
  }
  validate(c);
  return c;
}

inline ExperimentConfig load_config(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw ConfigError("--config", "cannot read " + path);
  return parse_config(is);
}

/// Every key with its effective value, in a form parse_config accepts.
inline void write_resolved(std::ostream& os, const ExperimentConfig& c) {
  using detail::join;
  using detail::num;
  os << "# resolved configuration\n";
  os << "n = " << c.n << '\n'
     << "gamma = " << num(c.gamma) << '\n'
     << "epsilon = " << num(c.epsilon) << '\n'
     << "cfl = " << num(c.cfl) << '\n'
     << "dt = " << num(c.dt) << '\n'
     << "max_dt = " << num(c.max_dt) << '\n'
     << "T = " << num(c.T) << '\n'
     << "seed = " << c.seed << '\n'
     << "kappa = " << num(c.kappa) << '\n'
     << "spectrum.a = " << num(c.spectrum_a) << '\n'
     << "spectrum.band = " << num(c.spectrum_kmin) << ' ' << num(c.spectrum_kmax) << '\n'
     << "spectrum.amplitude = " << num(c.spectrum_amplitude) << '\n'
     << "initial.modes = " << join(c.initial_modes) << '\n'
     << "initial.amplitudes = " << join(c.initial_amplitudes) << '\n'
     << "initial.scale_linf = " << num(c.initial_scale_linf) << '\n'
     << "forcing.modes = " << join(c.forcing_modes) << '\n'
     << "forcing.amplitudes = " << join(c.forcing_amplitudes) << '\n'
     << "forcing.scale_linf = " << num(c.forcing_scale_linf) << '\n'
     << "output.interval = " << num(c.output_interval) << '\n'
     << "output.dir = " << c.output_dir << '\n'
     << "output.checkpoints = " << join(c.output_checkpoints) << '\n'
     << "quadrature.images = " << c.quadrature_images << '\n'
     << "holder.sample = " << (c.holder_sample ? "true" : "false") << '\n'
     << "holder.beta = " << num(c.holder_beta) << '\n'
     << "holder.c3 = " << num(c.holder_c3) << '\n'
     << "holder.seeds = " << c.holder_seeds << '\n'
     << "holder.gammas = " << join(c.holder_gammas) << '\n'
     << "convergence.gammas = " << join(c.convergence_gammas) << '\n'
     << "convergence.T = " << num(c.convergence_T) << '\n'
     << "convergence.interval = " << num(c.convergence_interval) << '\n'
     << "convergence.spread_limit = " << num(c.convergence_spread_limit) << '\n'
     << "convergence.transient = " << num(c.convergence_transient) << '\n'
     << "lowerbounds.count = " << c.lowerbounds_count << '\n'
     << "lowerbounds.shifts = " << join(c.lowerbounds_shifts) << '\n'
     << "lowerbounds.r_factors = " << join(c.lowerbounds_r_factors) << '\n';
}

namespace detail {

inline SpectralField modes_field(TorusGrid g, const std::vector<std::pair<int, int>>& modes,
                                 const std::vector<double>& amps) {
  std::vector<FourierMode> m;
  for (std::size_t i = 0; i < modes.size(); ++i) m.push_back({modes[i].first, modes[i].second, amps[i], 0.0});
  return cosine_modes(g, m);
}

inline SpectralField scaled_to_linf(const SpectralField& f, double target) {
  if (target <= 0.0) return f;
  const double sup = linf_norm(f);
  return sup > 0.0 ? (target / sup) * f : f;
}

}  // namespace detail

/// theta0: random spectrum (when its amplitude is positive) plus listed cosine modes.
inline SpectralField initial_data(const ExperimentConfig& c, std::uint64_t seed) {
  const auto g = c.grid();
  auto f = detail::modes_field(g, c.initial_modes, c.initial_amplitudes);
  if (c.spectrum_amplitude > 0.0) f = f + generate_field(c.spectrum(seed), g);
  return detail::scaled_to_linf(f, c.initial_scale_linf);
}

inline SpectralField forcing_field(const ExperimentConfig& c) {
  const auto f = detail::modes_field(c.grid(), c.forcing_modes, c.forcing_amplitudes);
  return detail::scaled_to_linf(f, c.forcing_scale_linf);
}

}  // namespace sqg
