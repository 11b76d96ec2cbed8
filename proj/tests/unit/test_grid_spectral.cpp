#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <random>

#include "sqg/checkpoint.hpp"
#include "sqg/errors.hpp"
#include "sqg/operators.hpp"
#include "sqg/spectrum.hpp"

using namespace sqg;

namespace {

double max_coeff_diff(const SpectralField& a, const SpectralField& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.coeffs().size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

double max_coeff(const SpectralField& a) {
  double m = 0.0;
  for (auto c : a.coeffs()) m = std::max(m, std::abs(c));
  return m;
}

SpectralField random_field(TorusGrid g, std::uint64_t seed, double kmax = 5.0) {
  return generate_field({1.5, 1.0, kmax, 1.0, seed}, g);
}

// Brute-force sup over all point pairs at torus distance in (0, pi].
template <class Weight>
double brute_pair_sup(const GridFunction& f, Weight&& w) {
  const TorusGrid& g = f.grid();
  const int n = g.n();
  double best = 0.0;
  for (int a1 = 0; a1 < n; ++a1)
    for (int a2 = 0; a2 < n; ++a2)
      for (int b1 = 0; b1 < n; ++b1)
        for (int b2 = 0; b2 < n; ++b2) {
          const GridShift h{b1 - a1, b2 - a2};
          const double len = h.length(g);
          if (len == 0.0 || len > pi) continue;
          best = std::max(best, std::abs(f.at(b1, b2) - f.at(a1, a2)) * w(len));
        }
  return best;
}

}  // namespace

TEST(TorusGrid, RejectsBadSizes) {
  EXPECT_THROW(TorusGrid(6), std::invalid_argument);
  EXPECT_THROW(TorusGrid(4), std::invalid_argument);
  EXPECT_THROW(TorusGrid(48), std::invalid_argument);
  EXPECT_NO_THROW(TorusGrid(32));
}

TEST(TorusGrid, WavenumbersAndDealiasRadius) {
  TorusGrid g(64);
  EXPECT_EQ(g.nk(), 33);
  EXPECT_EQ(g.wavenumber(0), 0);
  EXPECT_EQ(g.wavenumber(1), 1);
  EXPECT_EQ(g.wavenumber(63), -1);
  EXPECT_EQ(g.row_of(-1), 63);
  EXPECT_EQ(g.dealias_kmax(), 21);
  EXPECT_NEAR(g.spacing(), two_pi / 64, 1e-15);
}

TEST(LambdaPow, SingleModes) {
  TorusGrid g(32);
  for (double s : {0.3, 1.0, 1.5, 1.9}) {
    EXPECT_LT(max_coeff_diff(lambda_pow(cosine_mode(g, 1, 0), s), cosine_mode(g, 1, 0)), 1e-15);
  }
  const auto out = lambda_pow(cosine_mode(g, 2, 0), 1.5);
  const auto expected = cosine_mode(g, 2, 0, std::pow(2.0, 1.5));
  EXPECT_LT(max_coeff_diff(out, expected) / max_coeff(expected), 1e-12);
  EXPECT_NEAR(out.coeff(2, 0).real(), 0.5 * 2.8284271247461903, 1e-12);
}

TEST(LambdaPow, CompositionAndInverse) {
  TorusGrid g(32);
  const auto phi = random_field(g, 3);
  EXPECT_LT(max_coeff_diff(lambda_pow(lambda_pow(phi, 1.3), -1.3), phi), 1e-13 * max_coeff(phi));
  EXPECT_LT(max_coeff_diff(lambda_pow(lambda_pow(phi, 0.7), 0.4), lambda_pow(phi, 1.1)),
            1e-12 * max_coeff(lambda_pow(phi, 1.1)));
}

TEST(RieszPerp, SingleModes) {
  TorusGrid g(32);
  const auto u = riesz_perp(cosine_mode(g, 1, 0));
  const auto u1 = to_physical(u.u1);
  const auto u2 = to_physical(u.u2);
  const auto v2 = GridFunction::sample(g, [](double x1, double) { return -std::sin(x1); });
  for (std::size_t i = 0; i < v2.values().size(); ++i) {
    EXPECT_NEAR(u1[i], 0.0, 1e-14);
    EXPECT_NEAR(u2[i], v2[i], 1e-14);
  }
  const auto w = riesz_perp(cosine_mode(g, 0, 1));
  const auto w1 = to_physical(w.u1);
  const auto v1 = GridFunction::sample(g, [](double, double x2) { return std::sin(x2); });
  for (std::size_t i = 0; i < v1.values().size(); ++i) EXPECT_NEAR(w1[i], v1[i], 1e-14);
}

TEST(RieszPerp, DivergenceFreeAndIsometric) {
  TorusGrid g(64);
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const auto th = random_field(g, seed, 20.0);
    const auto u = riesz_perp(th);
    EXPECT_LT(divergence_residual(u), 1e-15 * max_coeff(th));
    const double lhs = std::pow(l2_norm(u.u1), 2) + std::pow(l2_norm(u.u2), 2);
    EXPECT_NEAR(lhs, std::pow(l2_norm(th), 2), 1e-12 * lhs);
  }
}

TEST(SobolevNorm, ClosedForms) {
  TorusGrid g(32);
  const double pis2 = pi * std::sqrt(2.0);
  for (double s : {0.0, 0.5, 1.0, 2.5}) {
    EXPECT_NEAR(sobolev_norm(cosine_mode(g, 1, 0), s), pis2, 1e-12 * pis2);
  }
  EXPECT_NEAR(sobolev_norm(cosine_mode(g, 2, 0), 1.0), 2.0 * pis2, 1e-12 * pis2);
  EXPECT_EQ(sobolev_norm(SpectralField(g), 1.3), 0.0);
}

TEST(SobolevNorm, MatchesPhysicalQuadrature) {
  TorusGrid g(64);
  const auto th = random_field(g, 11, 12.0);
  const auto p = to_physical(th);
  double s = 0.0;
  for (double v : p.values()) s += v * v;
  const double l2 = std::sqrt(s * g.spacing() * g.spacing());
  EXPECT_NEAR(l2_norm(th), l2, 1e-10 * l2);
}

TEST(Transforms, RoundTrip) {
  TorusGrid g(64);
  const auto th = random_field(g, 5, 20.0);
  EXPECT_LT(max_coeff_diff(from_physical(to_physical(th)), th), 1e-15);
  const auto p = GridFunction::sample(g, [](double x1, double x2) { return std::cos(3 * x1 - x2) + 0.5; });
  const auto back = to_physical(from_physical(p));
  for (std::size_t i = 0; i < p.values().size(); ++i) EXPECT_NEAR(back[i], p[i] - 0.5, 1e-13);
}

TEST(Transforms, ResampleIsExactForResolvedModes) {
  TorusGrid g(32), big(64);
  const auto th = random_field(g, 9, 10.0);
  const auto up = resample(th, big);
  EXPECT_NEAR(l2_norm(up), l2_norm(th), 1e-13);
  EXPECT_LT(max_coeff_diff(resample(up, g), th), 1e-16);
}

TEST(Dealias, ZeroesHighModes) {
  TorusGrid g(32);
  const auto d = dealias(generate_field({0.5, 1.0, 10.0, 1.0, 2}, g));
  EXPECT_EQ(d.coeff(11, 0), Complex{});
  EXPECT_EQ(d.coeff(0, 11), Complex{});
  EXPECT_NE(d.coeff(10, 0), Complex{});
}

TEST(LinfNorm, MaxOverCollocation) {
  TorusGrid g(32);
  EXPECT_NEAR(linf_norm(cosine_mode(g, 1, 0)), 1.0, 1e-15);
  EXPECT_NEAR(linf_norm(cosine_mode(g, 1, 1, 2.5)), 2.5, 1e-14);
  EXPECT_EQ(linf_norm(SpectralField(g)), 0.0);
}

TEST(HolderSeminorm, ZeroField) {
  TorusGrid g(16);
  EXPECT_EQ(holder_seminorm(SpectralField(g), 0.5), 0.0);
  EXPECT_EQ(weighted_w_sup(SpectralField(g), 0.25, 1.0), 0.0);
}

TEST(HolderSeminorm, LipschitzConstantOfCosine) {
  TorusGrid g(64);
  const double v = holder_seminorm(cosine_mode(g, 1, 0), 1.0);
  EXPECT_LE(v, 1.0 + 1e-14);
  EXPECT_GE(v, 1.0 - 2.0 * g.spacing() * g.spacing());
}

TEST(HolderSeminorm, MatchesBruteForcePairs) {
  TorusGrid g(32);
  const auto f = to_physical(random_field(g, 21, 8.0));
  const double brute = brute_pair_sup(f, [](double len) { return std::pow(len, -0.5); });
  EXPECT_NEAR(holder_seminorm(f, 0.5), brute, 1e-14 * brute);
}

TEST(WeightedWSup, MatchesBruteForceOnCosine) {
  TorusGrid g(32);
  const auto f = to_physical(cosine_mode(g, 1, 0));
  const double brute = brute_pair_sup(f, [](double len) { return std::pow(1.0 + len * len, -0.125); });
  EXPECT_NEAR(weighted_w_sup(f, 0.25, 1.0), brute, 1e-14 * brute);
}

TEST(WeightedWSup, ReducesToHolderAndIsBoundedBySup) {
  TorusGrid g(32);
  for (std::uint64_t seed = 0; seed < 4; ++seed) {
    const auto f = to_physical(random_field(g, seed, 8.0));
    EXPECT_EQ(weighted_w_sup(f, 0.25, 0.0), holder_seminorm(f, 0.25));
    EXPECT_LE(weighted_w_sup(f, 0.25, 1.0), 2.0 * linf_norm(f));
  }
  EXPECT_THROW(weighted_w_sup(to_physical(cosine_mode(g, 1, 0)), 0.25, -1.0), std::domain_error);
}

TEST(HolderSeminorm, MonotoneInBetaOnShortPairs) {
  TorusGrid g(32);
  const PairRange shorter{0.0, 1.0};
  for (std::uint64_t seed = 0; seed < 4; ++seed) {
    auto th = random_field(g, seed, 8.0);
    th = (1.0 / linf_norm(th)) * th;
    double prev = 0.0;
    for (double beta : {0.1, 0.25, 0.5, 0.75, 1.0}) {
      const double v = holder_seminorm(th, beta, shorter);
      EXPECT_GE(v, prev * (1.0 - 1e-14));
      prev = v;
    }
  }
}

TEST(HolderSeminorm, RejectsBetaOutsideRange) {
  TorusGrid g(16);
  EXPECT_THROW(holder_seminorm(cosine_mode(g, 1, 0), 0.0), std::domain_error);
  EXPECT_THROW(holder_seminorm(cosine_mode(g, 1, 0), 1.5), std::domain_error);
}

TEST(GenerateField, AmplitudeZeroGivesZeroField) {
  TorusGrid g(32);
  EXPECT_EQ(l2_norm(generate_field({2.0, 1.0, 4.0, 0.0, 1}, g)), 0.0);
}

TEST(GenerateField, UnitShellParseval) {
  TorusGrid g(32);
  for (double a : {0.5, 2.0, 7.0}) {
    const auto f = generate_field({a, 1.0, 1.0, 1.0, 4}, g);
    // four modes (+-1,0), (0,+-1) of modulus 1
    EXPECT_NEAR(std::pow(l2_norm(f), 2), torus_area * 4.0, 1e-12);
    EXPECT_NEAR(to_physical(f).mean(), 0.0, 1e-15);
  }
}

TEST(GenerateField, ModulusFollowsDecay) {
  TorusGrid g(32);
  const auto f = generate_field({1.5, 1.0, 6.0, 2.0, 8}, g);
  EXPECT_NEAR(std::abs(f.coeff(3, 4)), 2.0 * std::pow(5.0, -1.5), 1e-14);
  EXPECT_EQ(f.coeff(7, 0), Complex{});
}

TEST(GenerateField, SeedIsDeterministic) {
  TorusGrid g(32);
  const auto a = generate_field({1.0, 1.0, 8.0, 1.0, 42}, g);
  const auto b = generate_field({1.0, 1.0, 8.0, 1.0, 42}, g);
  const auto c = generate_field({1.0, 1.0, 8.0, 1.0, 43}, g);
  EXPECT_EQ(max_coeff_diff(a, b), 0.0);
  EXPECT_GT(max_coeff_diff(a, c), 0.0);
}

TEST(GenerateField, BandBeyondDealiasRadiusIsConfigError) {
  TorusGrid g(32);
  try {
    generate_field({1.0, 1.0, 11.0, 1.0, 0}, g);
    FAIL() << "expected ConfigError";
  } catch (const ConfigError& e) {
    EXPECT_EQ(e.key(), "spectrum.band");
  }
  EXPECT_THROW(generate_field({0.0, 1.0, 4.0, 1.0, 0}, g), ConfigError);
}

TEST(Checkpoint, RoundTripIsBitExact) {
  TorusGrid g(32);
  const auto th = random_field(g, 17, 10.0);
  const auto path = std::filesystem::temp_directory_path() / "sqg_checkpoint_roundtrip.sqgf";
  write_checkpoint(path, th, 1.37, 2.5);
  const auto c = read_checkpoint(path);
  EXPECT_EQ(c.gamma, 1.37);
  EXPECT_EQ(c.time, 2.5);
  EXPECT_EQ(c.theta.grid().n(), 32);
  EXPECT_EQ(max_coeff_diff(c.theta, th), 0.0);
  std::filesystem::remove(path);
}
