#pragma once

// Estimators for Monte Carlo output: bootstrap intervals for a variance,
// Kolmogorov-Smirnov distance and the empirical characteristic function.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <span>
#include <vector>

#include "rmtclt/error.hpp"
#include "rmtclt/numeric.hpp"
#include "rmtclt/philox.hpp"

namespace rmtclt {

/// Linear-interpolation quantile of sorted data (the "type 7" definition).
inline double quantile_sorted(std::span<const double> sorted, double q) {
  require(!sorted.empty(), ErrorCode::InvalidArgument, "quantile of an empty sample");
  const double pos = q * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

struct BootstrapInterval {
  double estimate = 0.0;
  double lo = 0.0;
  double hi = 0.0;
  double se = 0.0;  // standard deviation of the bootstrap replicates
  std::size_t resamples = 0;
};

/// Percentile bootstrap for the sample variance. Resample b draws index i
/// from block (b, i) of the Bootstrap stream, so the interval depends only on
/// the data and the seed. The interval is widened to contain the point
/// estimate when the percentile bounds miss it.
inline BootstrapInterval bootstrap_variance(std::span<const double> values, std::uint64_t seed,
                                            std::size_t resamples = 1000, double level = 0.95) {
  require(values.size() >= 2, ErrorCode::InvalidArgument, "bootstrap needs at least two values");
  require(resamples >= 2, ErrorCode::InvalidArgument, "bootstrap needs at least two resamples");
  require(level > 0.0 && level < 1.0, ErrorCode::InvalidArgument, "confidence level must be in (0, 1)");
  BootstrapInterval out;
  out.estimate = sample_variance(values);
  out.resamples = resamples;
  const std::size_t r = values.size();
  std::vector<double> draw(r), stats(resamples);
  for (std::size_t b = 0; b < resamples; ++b) {
    const Substream stream(seed, StreamDomain::Bootstrap, static_cast<std::uint32_t>(b));
    for (std::size_t i = 0; i < r; ++i) {
      const auto idx = static_cast<std::size_t>(stream.at(i).uniform() * static_cast<double>(r));
      draw[i] = values[std::min(idx, r - 1)];
    }
    stats[b] = sample_variance(draw);
  }
  out.se = std::sqrt(sample_variance(stats));
  std::sort(stats.begin(), stats.end());
  const double tail = 0.5 * (1.0 - level);
  out.lo = std::min(quantile_sorted(stats, tail), out.estimate);
  out.hi = std::max(quantile_sorted(stats, 1.0 - tail), out.estimate);
  return out;
}

/// (v - mean) / sd with the R-1 sample standard deviation.
inline std::vector<double> standardize(std::span<const double> values) {
  const double sd = std::sqrt(sample_variance(values));
  require(values.size() >= 2 && sd > 0.0, ErrorCode::DegenerateSample, "sample has zero variance");
  const double m = mean(values);
  std::vector<double> out(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) out[i] = (values[i] - m) / sd;
  return out;
}

/// sup_x |F_n(x) - F(x)| for the empirical CDF of values.
template <class Cdf>
double ks_distance(std::span<const double> values, Cdf cdf) {
  require(!values.empty(), ErrorCode::InvalidArgument, "KS distance of an empty sample");
  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());
  const double n = static_cast<double>(sorted.size());
  double d = 0.0;
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    const double f = cdf(sorted[i]);
    d = std::max({d, static_cast<double>(i + 1) / n - f, f - static_cast<double>(i) / n});
  }
  return d;
}

inline double ks_distance_normal(std::span<const double> values) {
  return ks_distance(values, [](double x) { return normal_cdf(x); });
}

/// R^{-1} sum_j exp(i x v_j) at each x.
inline std::vector<complex> empirical_charfn(std::span<const double> values, std::span<const double> xs) {
  std::vector<complex> out;
  out.reserve(xs.size());
  const double n = static_cast<double>(values.size());
  for (double x : xs) {
    CompensatedSum re, im;
    for (double v : values) {
      re.add(std::cos(x * v));
      im.add(std::sin(x * v));
    }
    out.emplace_back(re.value() / n, im.value() / n);
  }
  return out;
}

struct CharfnRow {
  double x = 0.0;
  complex value;
  double reference = 0.0;  // exp(-x^2 / 2)
  double abs_diff = 0.0;
};

struct NormalityReport {
  double ks_distance = 0.0;
  std::vector<CharfnRow> charfn;
  double max_charfn_diff = 0.0;
};

inline std::vector<double> linspace(double lo, double hi, std::size_t count) {
  std::vector<double> out(count);
  for (std::size_t i = 0; i < count; ++i)
    out[i] = count == 1 ? lo : lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(count - 1);
  return out;
}

/// KS distance to the standard normal and the empirical characteristic
/// function against exp(-x^2/2), both on the standardized values.
inline NormalityReport normality_report(std::span<const double> values, std::span<const double> xs) {
  require(values.size() >= 100, ErrorCode::InvalidArgument, "normality report needs at least 100 values");
  const std::vector<double> z = standardize(values);
  NormalityReport r;
  r.ks_distance = ks_distance_normal(z);
  const std::vector<complex> ecf = empirical_charfn(z, xs);
  for (std::size_t i = 0; i < xs.size(); ++i) {
    CharfnRow row{xs[i], ecf[i], std::exp(-0.5 * xs[i] * xs[i]), 0.0};
    row.abs_diff = std::abs(row.value - row.reference);
    r.max_charfn_diff = std::max(r.max_charfn_diff, row.abs_diff);
    r.charfn.push_back(row);
  }
  return r;
}

}  // namespace rmtclt
