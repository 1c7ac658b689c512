#include <gtest/gtest.h>

#include <cmath>
#include <memory>
#include <numbers>
#include <sstream>
#include <vector>

#include "rmtclt/ensemble.hpp"
#include "rmtclt/numeric.hpp"
#include "rmtclt/spectral.hpp"
#include "rmtclt/theory.hpp"

using namespace rmtclt;

namespace {

EnsembleSpec wigner(std::size_t n, std::uint64_t seed) {
  EnsembleSpec s;
  s.n = n;
  s.seed = seed;
  return s;
}

Spectrum random_spectrum(std::size_t n, std::uint64_t seed) {
  const Substream st(seed, StreamDomain::Diagnostics, 0);
  std::vector<double> v(n);
  for (std::size_t i = 0; i < n; ++i) v[i] = 4.0 * st.at(i).uniform() - 2.0;
  return make_spectrum(std::move(v));
}

}  // namespace

TEST(Eigenvalues, SumRulesOnHundredMatrices) {
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    EnsembleSpec spec = wigner(40, seed);
    if (seed % 2 == 1) {
      spec.kind = EnsembleKind::SampleCovariance;
      spec.c = 1.5;
    }
    const MatrixSample m = sample_matrix(std::make_shared<const EnsembleSpec>(spec), 0);
    const Spectrum sp = eigenvalues(m);
    EXPECT_TRUE(sum_rules_hold(sp.eigenvalues, m.matrix));
    EXPECT_TRUE(std::is_sorted(sp.eigenvalues.begin(), sp.eigenvalues.end()));
  }
}

TEST(Eigenvalues, SumRuleRejectsWrongValues) {
  SymMatrix m(2);
  m.set_symmetric(0, 1, 1.0);
  const std::vector<double> wrong{-1.0, 1.0 + 1e-6};
  EXPECT_FALSE(sum_rules_hold(wrong, m));
}

TEST(Eigenvalues, SecondMomentOfSemicircle) {
  // n^{-1} sum lambda^2 has mean 1 + (w2 - 1)/n; w2 = 1 makes it exactly 1
  EnsembleSpec spec = wigner(300, 8);
  spec.diag = EntryDistribution::gaussian(1.0);
  auto shared = std::make_shared<const EnsembleSpec>(spec);
  std::vector<double> m2(200), stat(200);
  const TestFunction sq = TestFunction::monomial(2);
  for (std::uint32_t r = 0; r < 200; ++r) {
    const Spectrum sp = eigenvalues(sample_wigner(shared, r));
    stat[r] = linear_statistic(sp, sq);
    m2[r] = stat[r] / 300.0;
  }
  const double se = std::sqrt(sample_variance(m2) / 200.0);
  EXPECT_NEAR(mean(m2), 1.0, 3.0 * se);
  EXPECT_NEAR(mean(stat), 300.0, 3.0 * 300.0 * se);
}

TEST(LinearStatistic, Basics) {
  const Spectrum sp = make_spectrum({1.0, -1.0});
  EXPECT_DOUBLE_EQ(linear_statistic(sp, TestFunction::monomial(1)), 0.0);
  EXPECT_DOUBLE_EQ(linear_statistic(random_spectrum(17, 3), TestFunction::constant(1.0)), 17.0);
  EXPECT_DOUBLE_EQ(linear_statistic(sp, TestFunction::monomial(2)), 2.0);
}

TEST(LinearStatistic, Linearity) {
  const Spectrum sp = random_spectrum(200, 4);
  const TestFunction f = TestFunction::gaussian_bump(0.3, 0.5);
  const TestFunction g = TestFunction::polynomial({0.5, -1.0, 0.25});
  const double a = 2.5, b = -0.75;
  CompensatedSum direct;
  for (double l : sp.eigenvalues) direct.add(a * f(l) + b * g(l));
  const double lin = a * linear_statistic(sp, f) + b * linear_statistic(sp, g);
  EXPECT_NEAR(lin, direct.value(), 1e-12 * std::abs(direct.value()));
  EXPECT_NEAR(linear_statistic(sp, f.scaled(a)), a * linear_statistic(sp, f), 1e-12 * std::abs(lin));
}

TEST(ResolventTrace, ClosedForms) {
  const complex one = resolvent_trace(make_spectrum({0.7}), {0.2, 0.5});
  const complex want = 1.0 / (0.7 - complex(0.2, 0.5));
  EXPECT_NEAR(one.real(), want.real(), 1e-15);
  EXPECT_NEAR(one.imag(), want.imag(), 1e-15);
  const complex two = resolvent_trace(make_spectrum({-1.0, 1.0}), {0.0, 1.0});
  EXPECT_NEAR(two.real(), 0.0, 1e-15);
  EXPECT_NEAR(two.imag(), 1.0, 1e-15);
  EXPECT_THROW(resolvent_trace(make_spectrum({0.0}), {1.0, 0.0}), Error);
}

TEST(ResolventTrace, HerglotzAndLargeY) {
  const Spectrum sp = random_spectrum(300, 5);
  const Substream st(5, StreamDomain::Diagnostics, 1);
  for (int i = 0; i < 500; ++i) {
    const ComplexPoint z{6.0 * st.at(i).uniform(0) - 3.0, std::exp(8.0 * st.at(i).uniform(1) - 6.0)};
    EXPECT_GT(resolvent_trace(sp, z).imag(), 0.0);
  }
  const double y = 1e3;
  const complex iy(0.0, y);
  EXPECT_LT(std::abs(iy * resolvent_trace(sp, {0.0, y}) + 300.0), 0.01 * 300.0);
}

TEST(ResolventTrace, NormalizedTraceNearStieltjes) {
  const Spectrum sp = eigenvalues(sample_wigner(wigner(400, 6), 0));
  const complex g = resolvent_trace(sp, {0.0, 2.0}) / 400.0;
  EXPECT_LT(std::abs(g - stieltjes_f({0.0, 2.0})), 0.05);
}

TEST(PoissonStatistic, PointMasses) {
  const Spectrum zero = make_spectrum({0.0});
  EXPECT_NEAR(poisson_statistic(zero, 0.0, 1.0).direct, 1.0 / pi, 1e-16);
  EXPECT_NEAR(poisson_statistic(zero, 1.0, 1.0).direct, 1.0 / (2.0 * pi), 1e-16);
  EXPECT_NEAR(poisson_statistic(zero, 1.0, 1.0).resolvent, 1.0 / (2.0 * pi), 1e-16);
}

TEST(PoissonStatistic, PathsAgree) {
  const Spectrum sp = random_spectrum(10, 7);
  for (double y : {0.01, 0.3, 2.0, 50.0}) {
    const PoissonStatistic p = poisson_statistic(sp, 0.4, y);
    EXPECT_NEAR(p.direct, p.resolvent, 1e-12 * std::abs(p.direct));
  }
}

TEST(PoissonStatistic, ImResolventFunctionIsBitExact) {
  const Spectrum sp = random_spectrum(50, 8);
  const TestFunction f = TestFunction::im_resolvent(0.25, 0.6);
  EXPECT_EQ(linear_statistic(sp, f), resolvent_trace(sp, {0.25, 0.6}).imag() / pi);
}

TEST(SpectrumCsv, HeaderAndRoundTrip) {
  const Spectrum sp = make_spectrum({0.1, -2.0 / 3.0, 1e-300});
  std::ostringstream os;
  write_spectrum_csv(os, sp, "abc");
  std::istringstream in(os.str());
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, "# spec_hash=abc replicate=0 n=3");
  std::vector<double> back;
  while (std::getline(in, line)) back.push_back(std::stod(line));
  EXPECT_EQ(back, sp.eigenvalues);
}
