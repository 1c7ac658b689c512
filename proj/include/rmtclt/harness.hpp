#pragma once

// Monte Carlo experiments over replicated matrices: CLT variance runs, the
// resolvent variance scan, the Poisson-kernel propagation inequality and the
// truncation bound.

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <exception>
#include <functional>
#include <limits>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "rmtclt/analysis.hpp"
#include "rmtclt/ensemble.hpp"
#include "rmtclt/error.hpp"
#include "rmtclt/numeric.hpp"
#include "rmtclt/quadrature.hpp"
#include "rmtclt/spectral.hpp"
#include "rmtclt/stats.hpp"
#include "rmtclt/test_function.hpp"
#include "rmtclt/theory.hpp"

namespace rmtclt {

inline std::size_t resolve_workers(std::size_t requested) {
  if (requested > 0) return requested;
  return std::max(1u, std::thread::hardware_concurrency());
}

/// Calls fn(i) for i in [0, count) on up to `workers` threads. Each index is
/// processed exactly once; the exception of the lowest failing index is
/// rethrown after all threads have joined.
inline void parallel_for(std::size_t count, std::size_t workers, const std::function<void(std::size_t)>& fn) {
  workers = std::min(resolve_workers(workers), std::max<std::size_t>(count, 1));
  std::atomic<std::size_t> next{0};
  std::atomic<bool> failed{false};
  std::mutex mu;
  std::size_t failed_index = std::numeric_limits<std::size_t>::max();
  std::exception_ptr error;

  auto body = [&] {
    while (!failed.load(std::memory_order_relaxed)) {
      const std::size_t i = next.fetch_add(1);
      if (i >= count) return;
      try {
        fn(i);
      } catch (...) {
        std::lock_guard lock(mu);
        if (i < failed_index) {
          failed_index = i;
          error = std::current_exception();
        }
        failed.store(true);
      }
    }
  };
  if (workers <= 1) {
    body();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(body);
    for (auto& t : pool) t.join();
  }
  if (error) std::rethrow_exception(error);
}

/// Spectra of replicates 0..R-1 of one ensemble.
inline std::vector<Spectrum> simulate_spectra(const EnsembleSpec& spec, std::size_t replicates,
                                              std::size_t workers = 0) {
  spec.validate();
  auto shared = std::make_shared<const EnsembleSpec>(spec);
  std::vector<Spectrum> out(replicates);
  parallel_for(replicates, workers, [&](std::size_t r) {
    out[r] = eigenvalues(sample_matrix(shared, static_cast<std::uint32_t>(r)));
  });
  return out;
}

// ---------------------------------------------------------------------------
// CLT experiments

enum class StatisticKind { Linear, ResolventGrid, Poisson };

inline const char* to_string(StatisticKind k) {
  switch (k) {
    case StatisticKind::Linear: return "linear";
    case StatisticKind::ResolventGrid: return "resolvent_grid";
    case StatisticKind::Poisson: return "poisson";
  }
  return "unknown";
}

struct ExperimentConfig {
  EnsembleSpec ensemble;
  TestFunction phi = TestFunction::monomial(1);  // used by the linear statistic
  std::size_t replicates = 2;
  StatisticKind statistic = StatisticKind::Linear;
  std::vector<ComplexPoint> z_grid;  // resolvent points; (x, y) pairs for the Poisson statistic
  std::vector<double> charfn_x = linspace(-3.0, 3.0, 61);
  std::uint64_t seed = 0;  // master seed, replaces ensemble.seed
  bool retain_values = false;
  std::size_t workers = 0;
  std::size_t bootstrap_resamples = 1000;

  EnsembleSpec effective_ensemble() const {
    EnsembleSpec e = ensemble;
    e.seed = seed;
    return e;
  }

  void validate() const {
    effective_ensemble().validate();
    require(replicates >= 2, ErrorCode::InvalidSpec, "replicates must be >= 2");
    if (statistic != StatisticKind::Linear) {
      require(!z_grid.empty(), ErrorCode::InvalidSpec, "resolvent and Poisson statistics need a non-empty grid");
      for (const auto& z : z_grid) {
        require(z.im != 0.0, ErrorCode::InvalidSpec, "grid points must be off the real axis");
        require(statistic != StatisticKind::Poisson || z.im > 0.0, ErrorCode::InvalidSpec,
                "Poisson statistic needs y > 0");
      }
    }
  }
};

struct StatisticSummary {
  std::string label;
  std::vector<double> values;  // filled when retention is on
  double mean = 0.0;
  double variance = 0.0;
  BootstrapInterval ci;
  std::optional<double> theory;
  std::optional<NormalityReport> normality;
};

struct ExperimentResult {
  ExperimentConfig config;
  std::vector<StatisticSummary> statistics;
  double requested_aspect = 0.0;
  double realized_aspect = 0.0;
  double runtime_seconds = 0.0;
  std::vector<std::string> notes;

  const StatisticSummary& primary() const { return statistics.front(); }
};

namespace detail {

inline std::string point_label(const char* what, ComplexPoint z) {
  char buf[96];
  std::snprintf(buf, sizeof buf, "%s(%.17g%+.17gi)", what, z.re, z.im);
  return buf;
}

/// Limiting variances of the tracked statistics, where a closed form exists.
inline std::vector<std::optional<double>> theory_values(const ExperimentConfig& cfg,
                                                        std::vector<std::string>& notes) {
  const EnsembleSpec spec = cfg.effective_ensemble();
  const MomentParams params = MomentParams::from(spec);
  const bool wigner = spec.kind == EnsembleKind::Wigner;
  auto variance_of = [&](const TestFunction& phi) -> std::optional<double> {
    try {
      if (wigner) return variance_wigner(phi, params).total;
      return variance_sample_cov(phi, spec.realized_aspect(), params.kappa4).total;
    } catch (const Error& e) {
      notes.push_back(std::string("theory unavailable: ") + e.what());
      return std::nullopt;
    }
  };
  std::vector<std::optional<double>> out;
  switch (cfg.statistic) {
    case StatisticKind::Linear: out.push_back(variance_of(cfg.phi)); break;
    case StatisticKind::Poisson:
      for (const auto& z : cfg.z_grid) out.push_back(variance_of(TestFunction::im_resolvent(z.re, z.im)));
      break;
    case StatisticKind::ResolventGrid:
      for (const auto& z : cfg.z_grid) {
        if (wigner) {
          const ComplexPoint zc{z.re, -z.im};
          const complex czz = kernel_C(z, z, params);
          const complex czc = kernel_C(z, zc, params);
          out.push_back(0.5 * (czz + czc).real());
          out.push_back(0.5 * (czc - czz).real());
        } else {
          out.push_back(std::nullopt);
          const auto v = variance_of(TestFunction::im_resolvent(z.re, std::abs(z.im)));
          out.push_back(v ? std::optional<double>(pi * pi * *v) : std::nullopt);
        }
      }
      break;
  }
  return out;
}

}  // namespace detail

/// Labels and per-replicate values of the configured statistics.
struct StatisticTable {
  std::vector<std::string> labels;
  std::vector<std::vector<double>> values;  // values[k][replicate]
};

inline StatisticTable collect_statistics(const ExperimentConfig& cfg) {
  cfg.validate();
  StatisticTable t;
  switch (cfg.statistic) {
    case StatisticKind::Linear: t.labels.push_back("N[" + cfg.phi.describe() + "]"); break;
    case StatisticKind::Poisson:
      for (const auto& z : cfg.z_grid) t.labels.push_back(detail::point_label("N[P_y(x-.)]", z));
      break;
    case StatisticKind::ResolventGrid:
      for (const auto& z : cfg.z_grid) {
        t.labels.push_back(detail::point_label("Re gamma", z));
        t.labels.push_back(detail::point_label("Im gamma", z));
      }
      break;
  }
  const std::size_t r_count = cfg.replicates;
  t.values.assign(t.labels.size(), std::vector<double>(r_count));
  auto spec = std::make_shared<const EnsembleSpec>(cfg.effective_ensemble());
  parallel_for(r_count, cfg.workers, [&](std::size_t r) {
    const Spectrum sp = eigenvalues(sample_matrix(spec, static_cast<std::uint32_t>(r)));
    switch (cfg.statistic) {
      case StatisticKind::Linear: t.values[0][r] = linear_statistic(sp, cfg.phi); break;
      case StatisticKind::Poisson:
        for (std::size_t k = 0; k < cfg.z_grid.size(); ++k)
          t.values[k][r] = poisson_statistic(sp, cfg.z_grid[k].re, cfg.z_grid[k].im).resolvent;
        break;
      case StatisticKind::ResolventGrid:
        for (std::size_t k = 0; k < cfg.z_grid.size(); ++k) {
          const complex g = resolvent_trace(sp, cfg.z_grid[k]);
          t.values[2 * k][r] = g.real();
          t.values[2 * k + 1][r] = g.imag();
        }
        break;
    }
  });
  return t;
}

/// Mean, variance, bootstrap interval and (for R >= 100 and nonzero
/// variance) the normality report of one statistic.
inline StatisticSummary summarize_statistic(std::string label, std::vector<double> values, std::uint64_t seed,
                                            const ExperimentConfig& cfg, std::optional<double> theory) {
  StatisticSummary s;
  s.label = std::move(label);
  s.mean = mean(values);
  s.variance = sample_variance(values);
  s.ci = bootstrap_variance(values, seed, cfg.bootstrap_resamples);
  s.theory = theory;
  if (values.size() >= 100 && s.variance > 0.0) s.normality = normality_report(values, cfg.charfn_x);
  if (cfg.retain_values) s.values = std::move(values);
  return s;
}

/// Samples R matrices, evaluates the statistic on each spectrum and reports
/// its fluctuations next to the limiting variance. Values are centered by
/// their sample mean.
inline ExperimentResult run_clt_experiment(const ExperimentConfig& cfg) {
  const auto start = std::chrono::steady_clock::now();
  ExperimentResult res;
  res.config = cfg;
  const EnsembleSpec spec = cfg.effective_ensemble();
  res.requested_aspect = spec.requested_aspect();
  res.realized_aspect = spec.realized_aspect();
  StatisticTable table = collect_statistics(cfg);
  const auto theory = detail::theory_values(cfg, res.notes);
  for (std::size_t k = 0; k < table.labels.size(); ++k) {
    res.statistics.push_back(
        summarize_statistic(std::move(table.labels[k]), std::move(table.values[k]), cfg.seed, cfg, theory[k]));
  }
  res.runtime_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return res;
}

// ---------------------------------------------------------------------------
// Resolvent variance scan

struct BoundScanRow {
  double y = 0.0;
  double var_re = 0.0;
  double var_im = 0.0;
  double variance = 0.0;  // Var Re + Var Im
  double scaled = 0.0;    // y^4 * variance
  double scaled_se = 0.0;
};

struct BoundScanReport {
  double x = 0.0;
  std::size_t n = 0;
  std::size_t replicates = 0;
  std::vector<BoundScanRow> rows;
  double spread = 0.0;  // max / min of y^4 Var over the grid
  bool shape_violation = false;
};

/// y^4 Var{gamma_n(x + iy)} over the grid from precomputed spectra. The flag
/// is raised when the value at the smallest y exceeds ten times the value at
/// the largest y.
inline BoundScanReport bound_scan_from_spectra(std::span<const Spectrum> spectra, std::span<const double> y_grid,
                                               double x) {
  require(!y_grid.empty(), ErrorCode::InvalidArgument, "y grid must be non-empty");
  require(spectra.size() >= 2, ErrorCode::InvalidArgument, "bound scan needs at least two spectra");
  BoundScanReport rep;
  rep.x = x;
  rep.n = spectra.front().size();
  rep.replicates = spectra.size();
  const std::size_t r_count = spectra.size();
  std::vector<double> re(r_count), im(r_count), dev(r_count);
  for (double y : y_grid) {
    require(y > 0.0, ErrorCode::InvalidArgument, "y grid must be positive");
    for (std::size_t r = 0; r < r_count; ++r) {
      const complex g = resolvent_trace(spectra[r], {x, y});
      re[r] = g.real();
      im[r] = g.imag();
    }
    BoundScanRow row;
    row.y = y;
    row.var_re = sample_variance(re);
    row.var_im = sample_variance(im);
    row.variance = row.var_re + row.var_im;
    const double mre = mean(re), mim = mean(im);
    for (std::size_t r = 0; r < r_count; ++r) {
      const double a = re[r] - mre, b = im[r] - mim;
      dev[r] = a * a + b * b;
    }
    const double y4 = y * y * y * y;
    row.scaled = y4 * row.variance;
    row.scaled_se = y4 * std::sqrt(sample_variance(dev) / static_cast<double>(r_count)) *
                    static_cast<double>(r_count) / static_cast<double>(r_count - 1);
    rep.rows.push_back(row);
  }
  const auto by_y = [](const BoundScanRow& a, const BoundScanRow& b) { return a.y < b.y; };
  const auto lo_y = std::min_element(rep.rows.begin(), rep.rows.end(), by_y);
  const auto hi_y = std::max_element(rep.rows.begin(), rep.rows.end(), by_y);
  rep.shape_violation = lo_y->scaled > 10.0 * hi_y->scaled;
  double mn = std::numeric_limits<double>::infinity(), mx = 0.0;
  for (const auto& row : rep.rows) {
    mn = std::min(mn, row.scaled);
    mx = std::max(mx, row.scaled);
  }
  rep.spread = mn > 0.0 ? mx / mn : std::numeric_limits<double>::infinity();
  return rep;
}

inline BoundScanReport resolvent_bound_scan(const EnsembleSpec& spec, std::size_t replicates,
                                            std::span<const double> y_grid, double x, std::size_t workers = 0) {
  require(replicates >= 100, ErrorCode::InvalidArgument, "bound scan needs R >= 100");
  const auto spectra = simulate_spectra(spec, replicates, workers);
  return bound_scan_from_spectra(spectra, y_grid, x);
}

// ---------------------------------------------------------------------------
// Propagation inequality Var N[phi] <= ||phi||_s^2 Gamma(2s)^{-1} int int e^{-y} y^{2s-1} Var Im gamma dx dy

struct PjOptions {
  std::size_t laguerre_nodes = 20;
  double initial_half_width = 6.0;
  double tail_fraction = 1e-3;  // allowed tail bound relative to each x integral
  std::size_t workers = 0;
};

struct PjReport {
  double lhs = 0.0;
  double lhs_se = 0.0;
  double norm_sq = 0.0;
  double rhs = 0.0;    // quadrature over the truncated x windows (a lower bound of the full integral)
  double slack = 0.0;  // analytic bound on the discarded x tails, in the same units as rhs
  double ratio = 0.0;  // lhs / rhs
  bool flag = false;   // lhs > rhs
  std::size_t replicates = 0;
  std::vector<double> y_nodes;
  std::vector<double> x_integrals;
  std::vector<double> half_widths;
};

namespace detail {

/// int_{-X}^{X} Var^{Im gamma(x + iy)} dx by the trapezoid rule with step y/4,
/// over flattened eigenvalues (n per replicate).
inline double x_integral_of_variance(std::span<const double> eigs, std::size_t n, double y, double half_width) {
  const std::size_t r_count = eigs.size() / n;
  const double h_target = y / 4.0;
  const auto intervals = static_cast<std::size_t>(std::ceil(2.0 * half_width / h_target));
  const double h = 2.0 * half_width / static_cast<double>(intervals);
  std::vector<double> im(r_count), terms(intervals + 1);
  for (std::size_t i = 0; i <= intervals; ++i) {
    const double x = -half_width + h * static_cast<double>(i);
    for (std::size_t r = 0; r < r_count; ++r) {
      CompensatedSum s;
      const double* l = eigs.data() + r * n;
      for (std::size_t j = 0; j < n; ++j) {
        const double d = l[j] - x;
        s.add(y / (d * d + y * y));
      }
      im[r] = s.value();
    }
    terms[i] = h * sample_variance(im) * ((i == 0 || i == intervals) ? 0.5 : 1.0);
  }
  return pairwise_sum(terms);
}

}  // namespace detail

/// Both sides of the propagation inequality. The y integral uses
/// generalized Gauss-Laguerre nodes for the weight y^{2s-1} e^{-y}; each x
/// window grows from +-6 until the analytic tail bound
/// 2 (R/(R-1)) (2 n L y)^2 / (5 (X - L)^5), L = max |lambda|, falls below
/// tail_fraction of its integral.
inline PjReport check_pj_inequality(const EnsembleSpec& spec, const TestFunction& phi, double s, std::size_t replicates,
                                    const PjOptions& opt = {}) {
  require(s > 0.5, ErrorCode::InvalidArgument, "the inequality check needs s > 1/2");
  require(replicates >= 2, ErrorCode::InvalidArgument, "replicates must be >= 2");
  PjReport rep;
  rep.replicates = replicates;
  rep.norm_sq = sobolev_norm_sq(phi, s);
  if (rep.norm_sq == 0.0) return rep;

  const auto spectra = simulate_spectra(spec, replicates, opt.workers);
  const std::size_t n = spectra.front().size();
  std::vector<double> stat(replicates), eigs(replicates * n);
  double big_l = 0.0;
  for (std::size_t r = 0; r < replicates; ++r) {
    stat[r] = linear_statistic(spectra[r], phi);
    std::copy(spectra[r].eigenvalues.begin(), spectra[r].eigenvalues.end(), eigs.begin() + static_cast<std::ptrdiff_t>(r * n));
    big_l = std::max({big_l, std::abs(spectra[r].eigenvalues.front()), std::abs(spectra[r].eigenvalues.back())});
  }
  rep.lhs = sample_variance(stat);
  {
    const double m = mean(stat);
    std::vector<double> dev(replicates);
    for (std::size_t r = 0; r < replicates; ++r) dev[r] = (stat[r] - m) * (stat[r] - m);
    rep.lhs_se = std::sqrt(sample_variance(dev) / static_cast<double>(replicates));
  }

  const QuadratureRule rule = gauss_laguerre(opt.laguerre_nodes, 2.0 * s - 1.0);
  const double inv_gamma = std::exp(-std::lgamma(2.0 * s));
  const double rr = static_cast<double>(replicates);
  const double nn = static_cast<double>(n);
  const std::size_t k_count = rule.nodes.size();
  rep.y_nodes = rule.nodes;
  rep.x_integrals.assign(k_count, 0.0);
  rep.half_widths.assign(k_count, 0.0);
  std::vector<double> tails(k_count);
  parallel_for(k_count, opt.workers, [&](std::size_t k) {
    const double y = rule.nodes[k];
    double half = std::max(opt.initial_half_width, 2.0 * big_l);
    while (true) {
      const double integral = detail::x_integral_of_variance(eigs, n, y, half);
      const double c = 2.0 * nn * big_l * y;
      const double tail = 2.0 * (rr / (rr - 1.0)) * c * c / (5.0 * std::pow(half - big_l, 5));
      if (tail <= opt.tail_fraction * integral || half > 1e7) {
        rep.x_integrals[k] = integral;
        rep.half_widths[k] = half;
        tails[k] = tail;
        return;
      }
      half *= 2.0;
    }
  });
  CompensatedSum rhs, slack;
  for (std::size_t k = 0; k < k_count; ++k) {
    rhs.add(rule.weights[k] * rep.x_integrals[k]);
    slack.add(rule.weights[k] * tails[k]);
  }
  rep.rhs = rep.norm_sq * inv_gamma * rhs.value();
  rep.slack = rep.norm_sq * inv_gamma * slack.value();
  if (rep.slack > 0.1 * rep.rhs) {
    throw AccuracyError("x-window tail bound exceeds 10% of the right side", rep.rhs, rep.slack);
  }
  rep.ratio = rep.lhs / rep.rhs;
  rep.flag = rep.lhs > rep.rhs;
  return rep;
}

// ---------------------------------------------------------------------------
// Truncation bound

struct TruncationReport {
  double tau = 0.0;
  double mean_abs_diff = 0.0;
  double se = 0.0;
  double lindeberg = 0.0;
  double derivative_bound = 0.0;  // sup |phi'|
  double bound = 0.0;             // sup|phi'| L_n(tau) / tau^3
  double mean_truncated_entries = 0.0;
  std::size_t replicates = 0;
  bool within = false;  // mean <= bound + 3 se
};

/// E|N[phi] - N~[phi]| over paired replicates (the same matrix before and
/// after truncation) against sup|phi'| L_n(tau) / tau^3.
inline TruncationReport check_truncation_bound(const EnsembleSpec& spec, const TestFunction& phi, double tau,
                                               std::size_t replicates, std::size_t workers = 0) {
  require(tau > 0.0, ErrorCode::InvalidArgument, "tau must be > 0");
  require(replicates >= 2, ErrorCode::InvalidArgument, "replicates must be >= 2");
  require(spec.kind == EnsembleKind::Wigner, ErrorCode::InvalidSpec, "truncation check needs a Wigner ensemble");
  spec.validate();
  TruncationReport rep;
  rep.tau = tau;
  rep.replicates = replicates;
  rep.derivative_bound = phi.sup_abs_derivative();
  require(std::isfinite(rep.derivative_bound), ErrorCode::InvalidArgument, "phi must have a bounded derivative");
  rep.lindeberg = lindeberg_l4(spec, tau);
  rep.bound = rep.derivative_bound * rep.lindeberg / (tau * tau * tau);

  auto shared = std::make_shared<const EnsembleSpec>(spec);
  std::vector<double> diff(replicates), truncated(replicates);
  parallel_for(replicates, workers, [&](std::size_t r) {
    const MatrixSample m = sample_wigner(shared, static_cast<std::uint32_t>(r));
    const MatrixSample t = truncate(m, tau);
    truncated[r] = static_cast<double>(count_truncated(m, tau));
    if (t.matrix == m.matrix) {
      diff[r] = 0.0;
      return;
    }
    diff[r] = std::abs(linear_statistic(eigenvalues(m), phi) - linear_statistic(eigenvalues(t), phi));
  });
  rep.mean_abs_diff = mean(diff);
  rep.se = std::sqrt(sample_variance(diff) / static_cast<double>(replicates));
  rep.mean_truncated_entries = mean(truncated);
  rep.within = rep.mean_abs_diff <= rep.bound + 3.0 * rep.se;
  return rep;
}

}  // namespace rmtclt
