// Acceptance run: one PASS/FAIL line per criterion, details indented below.
//
// The exit status is nonzero when any criterion fails, except those listed in
// known_unattainable: they are still evaluated and printed as FAIL, but do not
// change the exit status. See README.md for why each one is listed.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <memory>
#include <set>
#include <string>
#include <vector>

#include "rmtclt/rmtclt.hpp"

using namespace rmtclt;

namespace {

// AC7 asks y^4 Var{gamma_n(iy)} to vary by less than a factor 10 over
// y in {0.25, 0.5, 1, 2}; the limit is 2 y^2 / (y^2 + 4) there, a factor 32.
const std::set<int> known_unattainable = {7};

struct Outcome {
  bool pass = true;
  std::vector<std::string> lines;

  void check(bool ok, const char* fmt, auto... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, fmt, args...);
    lines.push_back(std::string(ok ? "ok   " : "FAIL ") + buf);
    pass = pass && ok;
  }
};

double rel(double got, double want) { return std::abs(got - want) / std::max(std::abs(want), 1e-300); }

EnsembleSpec wigner(std::size_t n, std::uint64_t seed, EntryDistribution off = EntryDistribution::gaussian()) {
  EnsembleSpec s;
  s.n = n;
  s.seed = seed;
  s.offdiag = off;
  return s;
}

ExperimentConfig experiment(const EnsembleSpec& e, TestFunction phi, std::size_t r) {
  ExperimentConfig c;
  c.ensemble = e;
  c.seed = e.seed;
  c.phi = std::move(phi);
  c.replicates = r;
  return c;
}

void within_3se(Outcome& o, const char* what, const StatisticSummary& s, double target) {
  o.check(std::abs(s.variance - target) <= 3.0 * s.ci.se, "%s: var %.5f, target %.5f, 3 SE %.5f", what, s.variance,
          target, 3.0 * s.ci.se);
}

Outcome ac1() {
  Outcome o;
  for (double w2 : {1.0, 2.0, 3.0}) {
    const double v = variance_wigner(TestFunction::monomial(1), {w2, 0.0}).total;
    o.check(rel(v, w2) < 1e-6, "lambda, w2=%g: %.12g", w2, v);
  }
  for (double k4 : {-2.0, -1.2, 0.0, 1.0}) {
    // at kappa4 = -2 the target is 0, so the error is taken relative to the main term
    const VarianceReport r = variance_wigner(TestFunction::monomial(2), {2.0, k4});
    const double want = 2.0 * k4 + 4.0;
    const double err = std::abs(r.total - want) / std::max(std::abs(want), std::abs(r.term_main));
    o.check(err < 1e-6, "lambda^2, kappa4=%g: %.12g vs %.12g", k4, r.total, want);
  }
  return o;
}

Outcome ac2() {
  Outcome o;
  for (double c : {1.0, 2.0, 4.0})
    for (double k4 : {-1.2, 0.0}) {
      // Tr n^{-1} X X^T = n^{-1} sum of nm squares, each with variance E x^4 - 1
      const double n = 1000.0, m = c * n;
      const double oracle = n * m * (k4 + 2.0) / (n * n);
      const double v = variance_sample_cov(TestFunction::monomial(1), c, k4).total;
      o.check(rel(v, oracle) < 1e-6, "c=%g kappa4=%g: %.12g vs %.12g", c, k4, v, oracle);
    }
  return o;
}

ExperimentResult ac3_first;

Outcome ac3() {
  Outcome o;
  const EnsembleSpec g = wigner(200, 3001);
  ac3_first = run_clt_experiment(experiment(g, TestFunction::monomial(1), 4000));
  within_3se(o, "gaussian N[lambda]", ac3_first.primary(), 2.0);
  within_3se(o, "gaussian N[lambda^2]",
             run_clt_experiment(experiment(wigner(200, 3002), TestFunction::monomial(2), 4000)).primary(), 4.0);
  within_3se(o, "uniform N[lambda^2]",
             run_clt_experiment(
                 experiment(wigner(200, 3003, EntryDistribution::uniform_sym()), TestFunction::monomial(2), 4000))
                 .primary(),
             1.6);
  return o;
}

Outcome ac4() {
  Outcome o;
  EnsembleSpec s;
  s.kind = EnsembleKind::SampleCovariance;
  s.n = 200;
  s.c = 1.0;
  s.seed = 4001;
  within_3se(o, "sample covariance N[lambda]", run_clt_experiment(experiment(s, TestFunction::monomial(1), 4000)).primary(),
             2.0);
  return o;
}

Outcome ac5() {
  Outcome o;
  const auto& n = ac3_first.primary().normality;
  o.check(n.has_value(), "%s", "normality report present");
  if (!n) return o;
  o.check(n->ks_distance < 0.03, "KS distance %.4f < 0.03", n->ks_distance);
  o.check(n->max_charfn_diff < 0.05, "max |Z(x) - exp(-x^2/2)| %.4f < 0.05", n->max_charfn_diff);
  return o;
}

Outcome ac6() {
  Outcome o;
  const TestFunction phi0 = TestFunction::gaussian_bump(0.3, 0.7);
  const double eta = 0.5;
  const MomentParams cases[] = {{2.0, 0.0}, {2.0, -1.2}, {3.0, 0.0}};
  for (const auto& p : cases) {
    const double k = variance_kernel_form(phi0, eta, p).total;
    const double s = variance_wigner(smooth(phi0, eta), p).total;
    o.check(rel(k, s) < 1e-3, "w2=%g kappa4=%g: kernel %.10g, smoothed %.10g, rel %.2e", p.w2, p.kappa4, k, s,
            rel(k, s));
  }
  return o;
}

Outcome ac7() {
  Outcome o;
  const std::vector<double> ys{0.25, 0.5, 1.0, 2.0, 50.0};
  const auto spectra = simulate_spectra(wigner(200, 7001), 2000);
  const BoundScanReport rep = bound_scan_from_spectra(spectra, ys, 0.0);
  double mn = INFINITY, mx = 0.0;
  for (const auto& r : rep.rows) {
    if (r.y == 50.0) continue;
    mn = std::min(mn, r.scaled);
    mx = std::max(mx, r.scaled);
    o.lines.push_back("     y=" + std::to_string(r.y) + " y^4 Var=" + std::to_string(r.scaled) + " (limit " +
                      std::to_string(2.0 * r.y * r.y / (r.y * r.y + 4.0)) + ")");
  }
  o.check(mx / mn < 10.0, "spread over y in [0.25, 2]: %.2f < 10", mx / mn);
  const BoundScanRow& far = rep.rows.back();
  o.check(std::abs(far.scaled - 2.0) <= 3.0 * far.scaled_se, "y=50: %.4f vs w2=2, 3 SE %.4f", far.scaled,
          3.0 * far.scaled_se);
  return o;
}

Outcome ac8() {
  Outcome o;
  const PjReport r = check_pj_inequality(wigner(100, 8001), TestFunction::im_resolvent(0.0, 1.0), 2.0, 2000);
  o.lines.push_back("     left " + std::to_string(r.lhs) + " +- " + std::to_string(r.lhs_se) + ", right " +
                    std::to_string(r.rhs) + " (+ tail slack " + std::to_string(r.slack) + ")" +
                    (r.flag ? ", flagged" : ""));
  o.check(r.lhs <= 1.5 * (r.rhs + r.slack), "left/right %.4f <= 1.5", r.lhs / r.rhs);
  return o;
}

Outcome ac9() {
  Outcome o;
  const TestFunction phi = TestFunction::gaussian_bump(0.0, 0.5);
  for (double tau : {1.0, 2.0}) {
    const TruncationReport r = check_truncation_bound(wigner(100, 9001), phi, tau, 500);
    o.check(r.within, "gaussian tau=%g: E|diff| %.3e <= bound %.3e + 3 SE %.3e", tau, r.mean_abs_diff, r.bound,
            3.0 * r.se);
    EnsembleSpec rad = wigner(100, 9002, EntryDistribution::rademacher());
    rad.diag = EntryDistribution::rademacher(std::sqrt(2.0));
    const TruncationReport z = check_truncation_bound(rad, phi, tau, 500);
    o.check(z.mean_abs_diff == 0.0, "rademacher tau=%g: E|diff| = %g", tau, z.mean_abs_diff);
  }
  return o;
}

Outcome ac10() {
  Outcome o;
  auto shared = std::make_shared<const EnsembleSpec>(wigner(120, 10001));
  int good = 0;
  for (std::uint32_t r = 0; r < 100; ++r) {
    const MatrixSample m = sample_wigner(shared, r);
    good += sum_rules_hold(eigenvalues(m).eigenvalues, m.matrix) ? 1 : 0;
  }
  o.check(good == 100, "sum rules on %d / 100 matrices", good);

  ExperimentConfig c = experiment(wigner(60, 10002), TestFunction::gaussian_bump(0.0, 0.5), 200);
  c.retain_values = true;
  c.workers = 1;
  const ExperimentResult a = run_clt_experiment(c);
  c.workers = 4;
  const ExperimentResult b = run_clt_experiment(c);
  o.check(a.primary().values == b.primary().values && a.primary().ci.lo == b.primary().ci.lo &&
              a.primary().ci.hi == b.primary().ci.hi,
          "%s", "bit-identical values and intervals for workers 1 and 4");

  double worst = 0.0;
  const Substream st(10003, StreamDomain::Diagnostics, 0);
  for (std::uint32_t i = 0; i < 20; ++i) {
    const double x = 4.0 * st.at(i).uniform(0) - 2.0, mu = 4.0 * st.at(i).uniform(1) - 2.0;
    const double y1 = 0.1 + 2.0 * st.at(i).uniform(2), y2 = 0.1 + 2.0 * st.at(i).uniform(3);
    const double lhs = poisson_convolve_numeric(TestFunction::im_resolvent(mu, y2), y1, x);
    worst = std::max(worst, std::abs(lhs - poisson_kernel(x - mu, y1 + y2)));
  }
  o.check(worst < 1e-8, "Poisson semigroup, worst error %.2e", worst);
  return o;
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria = {
      {"theory, Wigner closed forms", ac1},
      {"theory, sample covariance closed forms", ac2},
      {"Monte Carlo variance, Wigner n=200 R=4000", ac3},
      {"Monte Carlo variance, sample covariance n=200 c=1 R=4000", ac4},
      {"Gaussianity of the first Wigner experiment", ac5},
      {"kernel form against smoothed variance", ac6},
      {"resolvent variance shape, n=200 R=2000", ac7},
      {"Sobolev-norm variance inequality, n=100 R=2000", ac8},
      {"truncation bound, n=100 R=500", ac9},
      {"infrastructure invariants", ac10},
  };
  int hard_failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const int id = static_cast<int>(i + 1);
    const auto t0 = std::chrono::steady_clock::now();
    Outcome out;
    try {
      out = criteria[i].second();
    } catch (const std::exception& e) {
      out.check(false, "exception: %s", e.what());
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const bool allowed = !out.pass && known_unattainable.count(id) > 0;
    std::printf("AC%-2d %s  %s (%.1f s)%s\n", id, out.pass ? "PASS" : "FAIL", criteria[i].first, secs,
                allowed ? "  [known unattainable, not counted]" : "");
    for (const auto& l : out.lines) std::printf("       %s\n", l.c_str());
    std::fflush(stdout);
    if (!out.pass && !allowed) ++hard_failures;
  }
  std::printf("%d criterion failure(s) counted\n", hard_failures);
  return hard_failures == 0 ? 0 : 1;
}
