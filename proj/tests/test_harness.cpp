#include <gtest/gtest.h>

#include <atomic>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "rmtclt/harness.hpp"

using namespace rmtclt;

namespace {

ExperimentConfig wigner_config(std::size_t n, std::size_t r, std::uint64_t seed) {
  ExperimentConfig c;
  c.ensemble.n = n;
  c.replicates = r;
  c.seed = seed;
  c.retain_values = true;
  c.bootstrap_resamples = 200;
  return c;
}

}  // namespace

TEST(ParallelFor, VisitsEveryIndexOnce) {
  std::vector<std::atomic<int>> hits(1000);
  parallel_for(hits.size(), 4, [&](std::size_t i) { hits[i]++; });
  for (const auto& h : hits) EXPECT_EQ(h.load(), 1);
}

TEST(ParallelFor, RethrowsLowestFailingIndex) {
  try {
    parallel_for(100, 4, [](std::size_t i) {
      if (i == 17 || i == 63) throw std::runtime_error("boom " + std::to_string(i));
    });
    FAIL() << "no exception";
  } catch (const std::runtime_error& e) {
    EXPECT_STREQ(e.what(), "boom 17");
  }
}

TEST(Experiment, ConstantStatisticHasZeroVariance) {
  ExperimentConfig c = wigner_config(20, 10, 1);
  c.phi = TestFunction::constant(2.5);
  const ExperimentResult r = run_clt_experiment(c);
  ASSERT_EQ(r.statistics.size(), 1u);
  for (double v : r.primary().values) EXPECT_DOUBLE_EQ(v, 50.0);
  EXPECT_EQ(r.primary().variance, 0.0);
  EXPECT_FALSE(r.primary().normality.has_value());
}

TEST(Experiment, SmokeRunKeepsTwoValues) {
  ExperimentConfig c = wigner_config(10, 2, 3);
  const ExperimentResult r = run_clt_experiment(c);
  EXPECT_EQ(r.primary().values.size(), 2u);
  ASSERT_TRUE(r.primary().theory.has_value());
  EXPECT_NEAR(*r.primary().theory, 2.0, 1e-10);
}

TEST(Experiment, BitIdenticalAcrossWorkerCounts) {
  ExperimentConfig c = wigner_config(40, 64, 12);
  c.statistic = StatisticKind::ResolventGrid;
  c.z_grid = {{0.0, 1.0}, {0.5, 0.25}};
  c.workers = 1;
  const ExperimentResult a = run_clt_experiment(c);
  c.workers = 4;
  const ExperimentResult b = run_clt_experiment(c);
  ASSERT_EQ(a.statistics.size(), 4u);
  for (std::size_t k = 0; k < a.statistics.size(); ++k) {
    EXPECT_EQ(a.statistics[k].values, b.statistics[k].values);
    EXPECT_EQ(a.statistics[k].variance, b.statistics[k].variance);
    EXPECT_EQ(a.statistics[k].ci.lo, b.statistics[k].ci.lo);
    EXPECT_EQ(a.statistics[k].ci.hi, b.statistics[k].ci.hi);
  }
}

TEST(Experiment, PoissonPathMatchesResolventGridBitExactly) {
  ExperimentConfig lin = wigner_config(30, 20, 4);
  lin.phi = TestFunction::im_resolvent(0.3, 0.7);
  ExperimentConfig poi = wigner_config(30, 20, 4);
  poi.statistic = StatisticKind::Poisson;
  poi.z_grid = {{0.3, 0.7}};
  ExperimentConfig grid = wigner_config(30, 20, 4);
  grid.statistic = StatisticKind::ResolventGrid;
  grid.z_grid = {{0.3, 0.7}};
  const auto a = run_clt_experiment(lin).primary().values;
  const auto b = run_clt_experiment(poi).primary().values;
  const auto g = run_clt_experiment(grid).statistics[1].values;
  ASSERT_EQ(a.size(), 20u);
  EXPECT_EQ(a, b);
  for (std::size_t r = 0; r < a.size(); ++r) EXPECT_EQ(a[r], g[r] / pi);
}

TEST(Experiment, TheoryForEachStatisticKind) {
  ExperimentConfig c = wigner_config(10, 2, 1);
  c.statistic = StatisticKind::ResolventGrid;
  c.z_grid = {{0.0, 1.0}};
  const ExperimentResult w = run_clt_experiment(c);
  ASSERT_EQ(w.statistics.size(), 2u);
  const complex czz = kernel_C({0.0, 1.0}, {0.0, 1.0}, {});
  const complex czc = kernel_C({0.0, 1.0}, {0.0, -1.0}, {});
  EXPECT_NEAR(*w.statistics[0].theory, 0.5 * (czz + czc).real(), 1e-15);
  EXPECT_NEAR(*w.statistics[1].theory, 0.5 * (czc - czz).real(), 1e-15);
  // the imaginary part is pi N[P_y], so its variance is pi^2 V[P_y]
  EXPECT_NEAR(*w.statistics[1].theory, pi * pi * variance_wigner(TestFunction::im_resolvent(0.0, 1.0), {}).total, 1e-8);

  ExperimentConfig s = c;
  s.ensemble.kind = EnsembleKind::SampleCovariance;
  s.ensemble.c = 2.0;
  const ExperimentResult sc = run_clt_experiment(s);
  EXPECT_FALSE(sc.statistics[0].theory.has_value());
  EXPECT_TRUE(sc.statistics[1].theory.has_value());
  EXPECT_DOUBLE_EQ(sc.requested_aspect, 2.0);

  ExperimentConfig poly = wigner_config(10, 2, 1);
  poly.phi = TestFunction::monomial(2);
  poly.ensemble.offdiag = EntryDistribution::uniform_sym();
  EXPECT_NEAR(*run_clt_experiment(poly).primary().theory, 1.6, 1e-10);
}

TEST(Experiment, SmallWignerVarianceNearTheory) {
  ExperimentConfig c = wigner_config(50, 600, 21);
  const ExperimentResult r = run_clt_experiment(c);
  const StatisticSummary& s = r.primary();
  EXPECT_NEAR(s.variance, 2.0, 3.0 * s.ci.se);
  ASSERT_TRUE(s.normality.has_value());
  EXPECT_EQ(s.normality->charfn.size(), 61u);
}

TEST(Experiment, SampleCovarianceAspectIsRealized) {
  ExperimentConfig c = wigner_config(7, 4, 2);
  c.ensemble.kind = EnsembleKind::SampleCovariance;
  c.ensemble.c = 1.5;
  const ExperimentResult r = run_clt_experiment(c);
  EXPECT_DOUBLE_EQ(r.requested_aspect, 1.5);
  EXPECT_DOUBLE_EQ(r.realized_aspect, 11.0 / 7.0);
}

TEST(ExperimentConfig, Validation) {
  ExperimentConfig c = wigner_config(10, 1, 0);
  EXPECT_THROW(c.validate(), Error);
  c.replicates = 5;
  c.statistic = StatisticKind::Poisson;
  EXPECT_THROW(c.validate(), Error);
  c.z_grid = {{0.0, -1.0}};
  EXPECT_THROW(c.validate(), Error);
  c.z_grid = {{0.0, 1.0}};
  EXPECT_NO_THROW(c.validate());
}

TEST(BoundScan, ScalarMatrixOracle) {
  // n = 1: gamma(iy) = 1 / (w - iy) with w ~ N(0, 2)
  EnsembleSpec spec;
  spec.n = 1;
  spec.seed = 17;
  const std::vector<double> ys{0.5, 1.0, 2.0};
  const BoundScanReport rep = resolvent_bound_scan(spec, 20000, ys, 0.0, 1);
  const Substream st(99, StreamDomain::Diagnostics, 0);
  const std::size_t draws = 1000000;
  std::vector<double> w(draws);
  for (std::size_t i = 0; i < draws; ++i) w[i] = std::numbers::sqrt2 * st.at(i).normal();
  for (const BoundScanRow& row : rep.rows) {
    std::vector<double> re(draws), im(draws);
    for (std::size_t i = 0; i < draws; ++i) {
      const complex g = 1.0 / complex(w[i], -row.y);
      re[i] = g.real();
      im[i] = g.imag();
    }
    const double oracle = sample_variance(re) + sample_variance(im);
    const double y4 = std::pow(row.y, 4);
    EXPECT_NEAR(row.variance, oracle, 3.0 * row.scaled_se / y4) << row.y;
  }
}

TEST(BoundScan, LargeYApproachesTraceVariance) {
  EnsembleSpec spec;
  spec.n = 100;
  spec.seed = 23;
  const std::vector<double> ys{50.0};
  const BoundScanReport rep = resolvent_bound_scan(spec, 400, ys, 0.0);
  EXPECT_NEAR(rep.rows[0].scaled, 2.0, 3.0 * rep.rows[0].scaled_se);
}

TEST(BoundScan, ShapeFlagAndPreconditions) {
  EnsembleSpec spec;
  spec.n = 50;
  spec.seed = 2;
  const std::vector<double> ys{0.25, 0.5, 1.0, 2.0};
  const BoundScanReport rep = resolvent_bound_scan(spec, 200, ys, 0.0);
  EXPECT_EQ(rep.rows.size(), 4u);
  EXPECT_FALSE(rep.shape_violation);
  EXPECT_GT(rep.spread, 1.0);
  EXPECT_THROW(resolvent_bound_scan(spec, 50, ys, 0.0), Error);
  const std::vector<double> bad{1.0, -1.0};
  EXPECT_THROW(resolvent_bound_scan(spec, 100, bad, 0.0), Error);
}

TEST(PjInequality, ZeroFunction) {
  EnsembleSpec spec;
  spec.n = 20;
  const PjReport r = check_pj_inequality(spec, TestFunction::constant(0.0), 2.0, 10);
  EXPECT_EQ(r.lhs, 0.0);
  EXPECT_EQ(r.rhs, 0.0);
  EXPECT_FALSE(r.flag);
}

TEST(PjInequality, HoldsAndIsHomogeneous) {
  EnsembleSpec spec;
  spec.n = 40;
  spec.seed = 8;
  const TestFunction phi = TestFunction::im_resolvent(0.0, 1.0);
  const PjReport a = check_pj_inequality(spec, phi, 2.0, 200);
  EXPECT_FALSE(a.flag);
  EXPECT_LT(a.lhs, a.rhs);
  EXPECT_LE(a.slack, 0.1 * a.rhs);
  EXPECT_EQ(a.y_nodes.size(), 20u);
  const PjReport b = check_pj_inequality(spec, phi.scaled(2.0), 2.0, 200);
  EXPECT_NEAR(b.lhs, 4.0 * a.lhs, 1e-12 * b.lhs);
  EXPECT_NEAR(b.rhs, 4.0 * a.rhs, 1e-12 * b.rhs);
  EXPECT_THROW(check_pj_inequality(spec, phi, 0.5, 200), Error);
  EXPECT_THROW(check_pj_inequality(spec, TestFunction::monomial(1), 2.0, 200), Error);
}

TEST(Truncation, BoundedEntriesGiveZero) {
  EnsembleSpec spec;
  spec.n = 100;
  spec.offdiag = EntryDistribution::rademacher();
  spec.diag = EntryDistribution::rademacher(std::numbers::sqrt2);
  const TruncationReport r = check_truncation_bound(spec, TestFunction::gaussian_bump(0.0, 0.5), 1.0, 50);
  EXPECT_EQ(r.mean_abs_diff, 0.0);
  EXPECT_EQ(r.lindeberg, 0.0);
  EXPECT_EQ(r.mean_truncated_entries, 0.0);
  EXPECT_TRUE(r.within);
}

TEST(Truncation, GaussianWithinBoundAndMonotone) {
  EnsembleSpec spec;
  spec.n = 100;
  spec.seed = 31;
  const TestFunction phi = TestFunction::gaussian_bump(0.0, 0.5);
  double prev = std::numeric_limits<double>::infinity(), prev_se = 0.0;
  for (double tau : {0.5, 1.0, 2.0}) {
    const TruncationReport r = check_truncation_bound(spec, phi, tau, 200);
    EXPECT_TRUE(r.within) << tau;
    EXPECT_LE(r.mean_abs_diff, prev + 3.0 * (r.se + prev_se)) << tau;
    EXPECT_NEAR(r.derivative_bound, std::exp(-0.5) / 0.5, 1e-12);
    prev = r.mean_abs_diff;
    prev_se = r.se;
  }
  EXPECT_THROW(check_truncation_bound(spec, TestFunction::monomial(2), 1.0, 10), Error);
}

TEST(Truncation, SmallTauChangesStatistic) {
  EnsembleSpec spec;
  spec.n = 30;
  spec.seed = 1;
  const TruncationReport r = check_truncation_bound(spec, TestFunction::gaussian_bump(0.0, 0.5), 0.1, 20);
  EXPECT_GT(r.mean_truncated_entries, 0.0);
  EXPECT_GT(r.mean_abs_diff, 0.0);
}

// |Var - 4| for lambda^2 should shrink with n. The finite-n bias of this
// statistic is about 4/n, below the Monte Carlo noise at these sizes, so the
// check passes or fails mostly by chance; kept for manual runs with larger R.
TEST(CltTrend, DISABLED_SquareStatisticApproachesLimit) {
  std::vector<double> gaps;
  for (std::size_t n : {50u, 100u, 200u, 400u}) {
    double avg = 0.0;
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
      ExperimentConfig c = wigner_config(n, 1000, seed * 1000 + n);
      c.phi = TestFunction::monomial(2);
      avg += run_clt_experiment(c).primary().variance / 5.0;
    }
    gaps.push_back(std::abs(avg - 4.0));
  }
  int inversions = 0;
  for (std::size_t i = 1; i < gaps.size(); ++i) inversions += gaps[i] > gaps[i - 1] ? 1 : 0;
  EXPECT_LE(inversions, 1);
}
