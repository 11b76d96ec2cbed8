#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "sqg/estimates.hpp"
#include "sqg/ledger.hpp"
#include "sqg/spectrum.hpp"

using namespace sqg;

namespace {

EstimateLedger run_ledger(const SpectralField& th, const SpectralField& f, double gamma, double T,
                          double interval, std::optional<HolderSampling> holder = {}) {
  EstimateLedger L(EstimateLedger::default_alphas(gamma), holder);
  IntegrateOptions o;
  o.sample_interval = interval;
  o.on_sample = [&](const SolverState& s) { L.record(s); };
  integrate(SolverState(th, f, gamma), StepScheme{}, T, o);
  return L;
}

LedgerRow row(double t, double l2, double linf, std::vector<double> sob, double diss) {
  LedgerRow r;
  r.t = t;
  r.l2 = l2;
  r.linf = linf;
  r.sobolev = std::move(sob);
  r.dissipation = diss;
  return r;
}

SpectralField scaled(const SpectralField& f, double linf) { return (linf / linf_norm(f)) * f; }

}  // namespace

TEST(KInfty, Values) {
  TorusGrid g(32);
  const SpectralField z(g);
  EXPECT_EQ(k_infty(z, z), 0.0);
  EXPECT_NEAR(k_infty(cosine_mode(g, 1, 0), cosine_mode(g, 0, 1, 0.5)), 1.5, 1e-14);
  EXPECT_NEAR(k_infty(cosine_mode(g, 1, 1, 2.0), z), 2.0, 1e-14);
  EXPECT_THROW(k_infty(z, z, 0.5), std::domain_error);
}

TEST(DecayChecks, UnitModeHoldsWithEqualityInL2) {
  TorusGrid g(32);
  const auto th = cosine_mode(g, 1, 0);
  const auto L = run_ledger(th, SpectralField(g), 1.5, 2.0, 0.1);
  const auto r = check_decay_l2(L, th, SpectralField(g));
  EXPECT_EQ(r.status, BoundStatus::holds);
  EXPECT_NEAR(r.margin_min, 0.0, 1e-10);
  EXPECT_EQ(check_decay_linf(L, th, SpectralField(g)).status, BoundStatus::holds);
  EXPECT_EQ(check_energy_inequality(L, th, SpectralField(g)).status, BoundStatus::holds);
}

TEST(DecayChecks, RandomUnforcedDataHaveStrictMargin) {
  TorusGrid g(64);
  const auto th = generate_field({1.5, 1.0, 10.0, 1.0, 3}, g);
  const auto L = run_ledger(th, SpectralField(g), 1.5, 2.0, 0.1);
  const auto r = check_decay_l2(L, th, SpectralField(g));
  EXPECT_EQ(r.status, BoundStatus::holds);
  for (std::size_t i = 1; i < r.margins.size(); ++i) EXPECT_GT(r.margins[i], 0.0);
}

TEST(DecayChecks, ForcedRunEntersLinfBall) {
  TorusGrid g(64);
  const auto th = scaled(generate_field({2.0, 1.0, 8.0, 1.0, 4}, g), 3.0);
  const auto f = scaled(generate_field({1.0, 1.0, 2.0, 1.0, 104}, g), 0.3);
  const auto L = run_ledger(th, f, 1.5, 20.0, 0.1);
  EXPECT_EQ(check_decay_l2(L, th, f).status, BoundStatus::holds);
  EXPECT_EQ(check_decay_linf(L, th, f).status, BoundStatus::holds);
  EXPECT_EQ(check_energy_inequality(L, th, f).status, BoundStatus::holds);
  EXPECT_LE(L.column("linf").back(), 2.0 * linf_norm(f));
}

TEST(EnergyInequality, ZeroDataWithForcingGrowsAtMostLinearly) {
  TorusGrid g(32);
  const auto f = cosine_mode(g, 1, 2, 0.5);
  const auto L = run_ledger(SpectralField(g), f, 1.5, 3.0, 0.1);
  const auto r = check_energy_inequality(L, SpectralField(g), f);
  EXPECT_EQ(r.status, BoundStatus::holds);
}

TEST(DecayChecks, TamperedLedgerIsViolatedWithWitness) {
  TorusGrid g(32);
  const auto th = cosine_mode(g, 1, 0);
  const auto L = run_ledger(th, SpectralField(g), 1.5, 1.0, 0.1);
  std::stringstream csv;
  L.write_csv(csv);
  std::string text = csv.str();
  // double l2 on the row at t = 0.5
  std::stringstream in(text), out;
  std::string line;
  std::getline(in, line);
  out << line << '\n';
  while (std::getline(in, line)) {
    if (line.rfind("0.5,", 0) == 0) {
      const auto c1 = line.find(',');
      const auto c2 = line.find(',', c1 + 1);
      const double l2 = std::stod(line.substr(c1 + 1, c2 - c1 - 1));
      line = line.substr(0, c1 + 1) + std::to_string(2.0 * l2) + line.substr(c2);
    }
    out << line << '\n';
  }
  const auto bad = EstimateLedger::read_csv(out);
  const auto r = check_decay_l2(bad, th, SpectralField(g));
  ASSERT_TRUE(r.violated());
  ASSERT_TRUE(r.witness_time.has_value());
  EXPECT_NEAR(*r.witness_time, 0.5, 1e-12);
  EXPECT_TRUE(r.extras.count("witness_value"));
  EXPECT_EQ(r.to_json()["status"], "violated");
}

TEST(Ledger, CsvRoundTrip) {
  TorusGrid g(32);
  HolderSampling hs{0.25, 1.5, 0.0, {}};
  const auto L = run_ledger(generate_field({1.0, 1.0, 4.0, 1.0, 2}, g), SpectralField(g), 1.5, 0.5, 0.1, hs);
  std::stringstream ss;
  L.write_csv(ss);
  const auto back = EstimateLedger::read_csv(ss);
  ASSERT_EQ(back.size(), L.size());
  EXPECT_EQ(back.header(), L.header());
  for (const auto& name : L.header()) EXPECT_EQ(back.column(name), L.column(name)) << name;
}

TEST(Ledger, RejectsInvalidRows) {
  EstimateLedger L({0.5});
  L.append(row(0.0, 1.0, 1.0, {1.0}, 0.0));
  EXPECT_THROW(L.append(row(0.0, 1.0, 1.0, {1.0}, 0.1)), std::invalid_argument);
  EXPECT_THROW(L.append(row(0.1, 1.0, 1.0, {1.0, 2.0}, 0.1)), std::invalid_argument);
  EXPECT_THROW(L.append(row(0.1, NAN, 1.0, {1.0}, 0.1)), std::invalid_argument);
  L.append(row(0.1, 1.0, 1.0, {1.0}, 0.2));
  EXPECT_THROW(L.append(row(0.2, 1.0, 1.0, {1.0}, 0.1)), std::invalid_argument);
}

TEST(Ledger, DefaultAlphasAndColumns) {
  const auto a = EstimateLedger::default_alphas(1.5);
  ASSERT_EQ(a.size(), 3u);
  EXPECT_DOUBLE_EQ(a[0], 0.5);
  EXPECT_DOUBLE_EQ(a[1], 0.75);
  EXPECT_DOUBLE_EQ(a[2], 1.25);
  EXPECT_EQ(EstimateLedger::alpha_column(0.5), "h_0.5");
}

TEST(SobolevInequality, UnitModeHoldsWithNonnegativeConstant) {
  TorusGrid g(32);
  const auto L = run_ledger(cosine_mode(g, 1, 0), SpectralField(g), 1.5, 1.0, 0.05);
  const auto r = check_sobolev_inequality(L, 0.5, 1.5, 1.0, 0.0);
  EXPECT_EQ(r.status, BoundStatus::holds_with_constant);
  ASSERT_TRUE(r.constant.has_value());
  EXPECT_GE(*r.constant, 0.0);
  // d/dt ||theta||^2_{H^a} = -2 ||theta||^2_{H^{a+g/2}} here, so the left side is negative
  EXPECT_LT(r.extras.at("lhs_max"), 0.0);
}

TEST(SobolevInequality, ConstantStableAcrossGamma) {
  TorusGrid g(64);
  const auto th = scaled(generate_field({2.0, 1.0, 8.0, 1.0, 0}, g), 0.7);
  const auto f = scaled(generate_field({1.0, 1.0, 2.0, 1.0, 100}, g), 0.3);
  std::vector<double> cs;
  for (double gamma : {1.2, 1.5, 1.8}) {
    const auto L = run_ledger(th, f, gamma, 4.0, 0.05);
    const auto r = check_sobolev_inequality(L, 2.0 - gamma, gamma, k_infty(th, f), sobolev_norm(f, 2.0 - gamma));
    cs.push_back(*r.constant);
  }
  const auto [lo, hi] = std::minmax_element(cs.begin(), cs.end());
  EXPECT_GT(*lo, 0.0);
  EXPECT_LT(*hi / *lo, 10.0);
}

TEST(SobolevInequality, SparseSamplingIsDiagnosed) {
  TorusGrid g(32);
  const auto L = run_ledger(cosine_mode(g, 1, 0), SpectralField(g), 1.5, 0.3, 0.1);
  EXPECT_THROW(check_sobolev_inequality(L, 0.5, 1.5, 1.0, 0.0), SamplingError);
  EXPECT_THROW(check_sobolev_inequality(L, 0.3, 1.5, 1.0, 0.0), SamplingError);
}

TEST(AbsorbingRadii, ClosedForms) {
  const auto r = absorbing_radii(1.5, 0.5, 0.0, 1.0, 0.25);
  EXPECT_DOUBLE_EQ(r.r_inf, 1.0);
  EXPECT_NEAR(r.r1 * r.r1, 256.0, 1e-9);
  EXPECT_NEAR(r.r1_gamma * r.r1_gamma, std::pow(2.0, 12.0), 1e-6);
  const auto z = absorbing_radii(1.5, 0.0, 0.0, 1.0, 0.25);
  EXPECT_EQ(z.r_inf, 0.0);
  EXPECT_EQ(z.r1, 0.0);
  EXPECT_EQ(z.r2, 0.0);
  EXPECT_THROW(absorbing_radii(1.5, 0.5, 0.0, 1.0, 0.3), std::domain_error);
  EXPECT_THROW(absorbing_radii(1.0, 0.5, 0.0, 1.0, 0.25), std::domain_error);
}

TEST(AbsorbingRadii, SubcriticalRadiusBlowsUpWhileUniformRadiusStaysBounded) {
  const auto near = absorbing_radii(1.01, 0.3, 0.1, 1.0, 0.25);
  const auto mid = absorbing_radii(1.5, 0.3, 0.1, 1.0, 0.25);
  EXPECT_GT(near.r1_gamma, 1e6 * mid.r1_gamma);
  EXPECT_LT(near.r1 / mid.r1, 10.0);
}

TEST(BetaExponent, Values) {
  EXPECT_DOUBLE_EQ(beta_exponent(1.0, 1.5), 1.0 / 64.0);
  EXPECT_DOUBLE_EQ(beta_exponent(1.0, 1.1), 1.0 / 64.0);
  EXPECT_NEAR(beta_exponent(2.0, 1.5), 1.0 / (64.0 * std::pow(2.0, 9.0 / 7.0)), 1e-15);
  EXPECT_NEAR(beta_exponent(2.0, 1.5), 0.00641, 1e-5);
  EXPECT_DOUBLE_EQ(beta_exponent(0.1, 1.5), 0.25);
  EXPECT_THROW(beta_exponent(1.0, 1.5, 32.0), std::invalid_argument);
}

TEST(XiWeight, EndpointsAndRegularizationTime) {
  EXPECT_NEAR(regularization_time(1.5, 0.25), 3.5 / 2.25, 1e-15);
  EXPECT_NEAR(regularization_time(1.5, 0.25), 1.5556, 1e-4);
  EXPECT_EQ(xi_weight(0.0, 1.5, 0.25), 1.0);
  EXPECT_EQ(xi_weight(regularization_time(1.5, 0.25), 1.5, 0.25), 0.0);
  EXPECT_EQ(xi_weight(5.0, 1.5, 0.25), 0.0);
  EXPECT_THROW(regularization_time(1.5, 0.5), std::domain_error);
}

TEST(XiWeight, NonincreasingAndContinuousAtCutoff) {
  const double tb = regularization_time(1.3, 0.1);
  double prev = 1.0;
  for (int i = 0; i <= 1000; ++i) {
    const double v = xi_weight(1.2 * tb * i / 1000.0, 1.3, 0.1);
    EXPECT_LE(v, prev);
    prev = v;
  }
  EXPECT_LT(xi_weight(tb * (1.0 - 1e-9), 1.3, 0.1), 1e-6);
}

TEST(XiWeight, OdeResidualVanishesUnderRefinement) {
  // d xi/dt + xi^{1 - 2 gamma (1 - beta)/(2 + gamma)} = 0 before t_beta
  const double gamma = 1.5;
  const double beta = 0.25;
  const double p = 1.0 - 2.0 * gamma * (1.0 - beta) / (2.0 + gamma);
  double prev = 1e300;
  for (double h : {1e-2, 1e-3, 1e-4}) {
    double worst = 0.0;
    for (double t : {0.1, 0.5, 1.0, 1.4}) {
      const double d = (xi_weight(t + h, gamma, beta) - xi_weight(t - h, gamma, beta)) / (2.0 * h);
      worst = std::max(worst, std::abs(d + std::pow(xi_weight(t, gamma, beta), p)));
    }
    EXPECT_LT(worst, prev);
    prev = worst;
  }
  EXPECT_LT(prev, 1e-5);
}

TEST(HolderAbsorbing, UnitModeSeminormDecays) {
  TorusGrid g(32);
  HolderSampling hs{0.25, 1.5, 0.0, {}};
  const auto L = run_ledger(cosine_mode(g, 1, 0), SpectralField(g), 1.5, 2.0, 0.1, hs);
  const auto h = L.column("holder");
  for (std::size_t i = 1; i < h.size(); ++i) EXPECT_LT(h[i], h[i - 1]);
  const auto r = check_holder_absorbing(L, 1.0, 1.5, 0.25);
  EXPECT_EQ(r.status, BoundStatus::holds_with_constant);
  EXPECT_TRUE(r.extras.count("holder_constant"));
  // psi equals the squared seminorm once xi vanishes
  const auto psi = L.column("psi");
  const auto xi = L.column("xi");
  for (std::size_t i = 0; i < psi.size(); ++i) {
    if (xi[i] == 0.0) {
      EXPECT_EQ(psi[i], h[i] * h[i]);
    }
  }
}

TEST(HolderAbsorbing, RequiresHolderSamples) {
  TorusGrid g(32);
  const auto L = run_ledger(cosine_mode(g, 1, 0), SpectralField(g), 1.5, 0.2, 0.1);
  EXPECT_THROW(check_holder_absorbing(L, 1.0, 1.5, 0.25), SamplingError);
}

TEST(AbsorbingEntry, EntryTimesAndConfinement) {
  NormSeries inside{{0.0, 1.0, 2.0}, {0.5, 0.4, 0.45}};
  NormSeries later{{0.0, 1.0, 2.0, 3.0}, {5.0, 2.0, 0.9, 0.8}};
  auto r = check_absorbing_entry({inside, later}, 1.0, "linf");
  EXPECT_EQ(r.status, BoundStatus::holds);
  EXPECT_EQ(r.extras.at("entry_time_0"), 0.0);
  EXPECT_EQ(r.extras.at("entry_time_1"), 2.0);

  NormSeries never{{0.0, 1.0}, {5.0, 4.0}};
  r = check_absorbing_entry({never}, 1.0, "linf");
  EXPECT_TRUE(r.violated());
  EXPECT_NE(r.note.find("not absorbed by T"), std::string::npos);

  NormSeries leaves{{0.0, 1.0, 2.0}, {0.5, 1.5, 0.5}};
  EXPECT_TRUE(check_absorbing_entry({leaves}, 1.0, "linf").violated());
  EXPECT_FALSE(check_absorbing_entry({leaves}, 1.0, "linf", 2.0).violated());
}

TEST(AbsorbingEntry, UnforcedDecayIsAbsorbedByAnyRadius) {
  TorusGrid g(32);
  const auto L = run_ledger(generate_field({1.0, 1.0, 6.0, 1.0, 9}, g), SpectralField(g), 1.5, 10.0, 0.1);
  NormSeries s{L.times(), L.column("linf")};
  EXPECT_FALSE(check_absorbing_entry({s}, 1e-3, "linf").violated());
}

TEST(FittedRadius, UsesTail) {
  NormSeries s{{0.0, 1.0, 2.0, 3.0, 4.0}, {9.0, 3.0, 1.0, 1.2, 0.8}};
  EXPECT_DOUBLE_EQ(fitted_asymptotic_radius({s}), 1.2);
}

TEST(UniformGronwall, ClosedForms) {
  std::vector<double> t, y, zero, one;
  for (int i = 0; i <= 400; ++i) {
    t.push_back(i * 0.01);
    y.push_back(std::exp(-t.back()));
    zero.push_back(0.0);
    one.push_back(1.0);
  }
  const std::vector<double> flat(t.size(), 2.0);
  EXPECT_NEAR(uniform_gronwall(t, flat, zero, zero, 1.0), 2.0, 1e-12);
  for (double s : {0.0, 1.0, 2.5}) {
    EXPECT_GE(uniform_gronwall(t, y, zero, zero, 1.0, s), std::exp(-(s + 1.0)));
  }
  std::vector<double> grow;
  for (double x : t) grow.push_back(std::exp(x));
  // mean of e^t over [0,1] times e
  EXPECT_NEAR(uniform_gronwall(t, grow, one, zero, 1.0), (std::exp(1.0) - 1.0) * std::exp(1.0), 1e-3);
}

TEST(UniformGronwall, RejectsBadGrids) {
  const std::vector<double> t{0.0, 2.0, 1.0}, v{1.0, 1.0, 1.0};
  EXPECT_THROW(uniform_gronwall(t, v, v, v, 0.5), std::invalid_argument);
  const std::vector<double> u{0.0, 1.0, 2.0};
  EXPECT_THROW(uniform_gronwall(u, v, v, v, 5.0), std::invalid_argument);
}

TEST(BoundReport, JsonNullsNonFinite) {
  BoundReport r;
  r.name = "x";
  const auto j = r.to_json();
  EXPECT_TRUE(j["margin_min"].is_null());
  EXPECT_EQ(j["status"], "holds");
  EXPECT_EQ(to_string(BoundStatus::holds_with_constant), "holds-with-constant");
}
