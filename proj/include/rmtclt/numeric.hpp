#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <span>
#include <vector>

namespace rmtclt {

using complex = std::complex<double>;

inline constexpr double pi = std::numbers::pi;

/// Pairwise summation. The association order depends only on the length, so
/// the result is reproducible regardless of how the inputs were produced.
inline double pairwise_sum(std::span<const double> values) {
  constexpr std::size_t block = 32;
  if (values.size() <= block) {
    double s = 0.0;
    for (double v : values) s += v;
    return s;
  }
  const std::size_t half = values.size() / 2;
  return pairwise_sum(values.first(half)) + pairwise_sum(values.subspan(half));
}

/// Neumaier-compensated running sum, for loops that do not materialize terms.
class CompensatedSum {
 public:
  void add(double v) {
    const double t = sum_ + v;
    if (std::abs(sum_) >= std::abs(v)) {
      comp_ += (sum_ - t) + v;
    } else {
      comp_ += (v - t) + sum_;
    }
    sum_ = t;
  }
  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

inline double mean(std::span<const double> values) {
  return pairwise_sum(values) / static_cast<double>(values.size());
}

/// Unbiased (R-1 denominator) sample variance, two-pass.
inline double sample_variance(std::span<const double> values) {
  const std::size_t r = values.size();
  if (r < 2) return 0.0;
  const double m = mean(values);
  std::vector<double> sq(r);
  for (std::size_t i = 0; i < r; ++i) {
    const double d = values[i] - m;
    sq[i] = d * d;
  }
  return pairwise_sum(sq) / static_cast<double>(r - 1);
}

/// Standard normal CDF.
inline double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

inline double normal_pdf(double x) { return std::exp(-0.5 * x * x) / std::sqrt(2.0 * pi); }

}  // namespace rmtclt
