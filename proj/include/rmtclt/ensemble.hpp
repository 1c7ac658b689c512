#pragma once

// Random matrix ensembles: entry laws with exact moments, Wigner and sample
// covariance sampling, entrywise truncation and the Lindeberg functional.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <memory>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include "rmtclt/error.hpp"
#include "rmtclt/numeric.hpp"
#include "rmtclt/philox.hpp"

namespace rmtclt {

enum class Family { Gaussian, Rademacher, UniformSym, TwoPointSym, Table };

inline const char* to_string(Family f) {
  switch (f) {
    case Family::Gaussian: return "gaussian";
    case Family::Rademacher: return "rademacher";
    case Family::UniformSym: return "uniform";
    case Family::TwoPointSym: return "two_point_sym";
    case Family::Table: return "table";
  }
  return "unknown";
}

/// A centered entry law w = scale * xi, where xi has mean 0 and variance 1.
///
/// TwoPointSym puts mass p/2 on each of +-a and 1-p on 0 with p*a^2 = 1, so
/// its standardized fourth moment is 1/p and any kappa4 >= -2 is reachable.
/// Table is a finite discrete law given by (value, probability) pairs.
class EntryDistribution {
 public:
  static EntryDistribution gaussian(double scale = 1.0) { return {Family::Gaussian, scale}; }
  static EntryDistribution rademacher(double scale = 1.0) { return {Family::Rademacher, scale}; }
  static EntryDistribution uniform_sym(double scale = 1.0) { return {Family::UniformSym, scale}; }

  static EntryDistribution two_point_sym(double a, double scale = 1.0) {
    require(std::isfinite(a) && a >= 1.0, ErrorCode::InvalidSpec,
            "two_point_sym needs a >= 1 so that p = 1/a^2 is a probability");
    EntryDistribution d{Family::TwoPointSym, scale};
    d.atom_ = a;
    d.weight_ = 1.0 / (a * a);
    return d;
  }

  static EntryDistribution two_point_sym_kappa4(double kappa4, double scale = 1.0) {
    require(std::isfinite(kappa4) && kappa4 >= -2.0, ErrorCode::InvalidSpec,
            "two_point_sym reaches kappa4 in [-2, inf) only");
    return two_point_sym(std::sqrt(kappa4 + 3.0), scale);
  }

  static EntryDistribution table(std::vector<double> values, std::vector<double> probs, double scale = 1.0) {
    require(!values.empty() && values.size() == probs.size(), ErrorCode::InvalidSpec,
            "table needs matching non-empty value and probability lists");
    double total = 0.0, m1 = 0.0, m2 = 0.0;
    for (std::size_t i = 0; i < values.size(); ++i) {
      require(probs[i] >= 0.0 && std::isfinite(values[i]), ErrorCode::InvalidSpec,
              "table probabilities must be non-negative and values finite");
      total += probs[i];
      m1 += probs[i] * values[i];
      m2 += probs[i] * values[i] * values[i];
    }
    require(std::abs(total - 1.0) < 1e-12, ErrorCode::InvalidSpec, "table probabilities must sum to 1");
    require(std::abs(m1) < 1e-12, ErrorCode::InvalidSpec, "table law must have mean 0");
    require(std::abs(m2 - 1.0) < 1e-12, ErrorCode::InvalidSpec, "table law must have variance 1");
    EntryDistribution d{Family::Table, scale};
    d.values_ = std::move(values);
    d.probs_ = std::move(probs);
    d.cumulative_.resize(d.probs_.size());
    std::partial_sum(d.probs_.begin(), d.probs_.end(), d.cumulative_.begin());
    return d;
  }

  Family family() const { return family_; }
  double scale() const { return scale_; }
  double atom() const { return atom_; }
  double weight() const { return weight_; }
  const std::vector<double>& values() const { return values_; }
  const std::vector<double>& probs() const { return probs_; }

  EntryDistribution with_scale(double scale) const {
    EntryDistribution d = *this;
    d.scale_ = scale;
    d.validate_scale();
    return d;
  }

  double mean() const { return 0.0; }
  double variance() const { return scale_ * scale_; }

  /// E{xi^4} of the standardized law.
  double standardized_fourth_moment() const {
    switch (family_) {
      case Family::Gaussian: return 3.0;
      case Family::Rademacher: return 1.0;
      case Family::UniformSym: return 9.0 / 5.0;
      case Family::TwoPointSym: return 1.0 / weight_;
      case Family::Table: {
        double m4 = 0.0;
        for (std::size_t i = 0; i < values_.size(); ++i) m4 += probs_[i] * std::pow(values_[i], 4);
        return m4;
      }
    }
    return 0.0;
  }

  /// E{w^4} including the scale.
  double fourth_moment() const { return std::pow(scale_, 4) * standardized_fourth_moment(); }

  /// Fourth cumulant of the standardized law.
  double kappa4() const { return standardized_fourth_moment() - 3.0; }

  /// E{|w|^p}; reported as the (4+eps)-moment diagnostic, never enforced.
  double absolute_moment(double p) const {
    double m = 0.0;
    switch (family_) {
      case Family::Gaussian:
        m = std::pow(2.0, p / 2.0) * std::tgamma((p + 1.0) / 2.0) / std::sqrt(pi);
        break;
      case Family::Rademacher: m = 1.0; break;
      case Family::UniformSym: m = std::pow(std::sqrt(3.0), p) / (p + 1.0); break;
      case Family::TwoPointSym: m = weight_ * std::pow(atom_, p); break;
      case Family::Table:
        for (std::size_t i = 0; i < values_.size(); ++i) m += probs_[i] * std::pow(std::abs(values_[i]), p);
        break;
    }
    return std::pow(scale_, p) * m;
  }

  /// E{w^4 1_{|w| > threshold}}, exact for every family.
  double tail_fourth_moment(double threshold) const {
    require(threshold >= 0.0, ErrorCode::InvalidArgument, "tail threshold must be >= 0");
    const double t = threshold / scale_;
    const double s4 = std::pow(scale_, 4);
    switch (family_) {
      case Family::Gaussian: {
        // 2 * int_t^inf x^4 phi(x) dx = 2 [(t^3 + 3t) phi(t) + 3 Q(t)]
        const double q = 0.5 * std::erfc(t / std::numbers::sqrt2);
        return s4 * 2.0 * ((t * t * t + 3.0 * t) * normal_pdf(t) + 3.0 * q);
      }
      case Family::Rademacher: return t < 1.0 ? s4 : 0.0;
      case Family::UniformSym: {
        const double r3 = std::sqrt(3.0);
        if (t >= r3) return 0.0;
        return s4 * (std::pow(r3, 5) - std::pow(t, 5)) / (5.0 * r3);
      }
      case Family::TwoPointSym: return atom_ > t ? s4 * weight_ * std::pow(atom_, 4) : 0.0;
      case Family::Table: {
        double m = 0.0;
        for (std::size_t i = 0; i < values_.size(); ++i)
          if (std::abs(values_[i]) > t) m += probs_[i] * std::pow(values_[i], 4);
        return s4 * m;
      }
    }
    fail(ErrorCode::UnsupportedDistribution, "no tail moment for this family");
  }

  /// E{w 1_{|w| <= threshold}}: zero for symmetric laws, exact sum for tables.
  double truncated_mean(double threshold) const {
    if (family_ != Family::Table) return 0.0;
    const double t = threshold / scale_;
    double m = 0.0;
    for (std::size_t i = 0; i < values_.size(); ++i)
      if (std::abs(values_[i]) <= t) m += probs_[i] * values_[i];
    return scale_ * m;
  }

  /// One draw from a 128-bit random block.
  double sample(const RandomBlock& block) const {
    switch (family_) {
      case Family::Gaussian: return scale_ * block.normal();
      case Family::Rademacher: return block.bit() ? scale_ : -scale_;
      case Family::UniformSym: return scale_ * std::sqrt(3.0) * (2.0 * block.uniform(0) - 1.0);
      case Family::TwoPointSym: {
        if (block.uniform(0) >= weight_) return 0.0;
        return block.bit() ? scale_ * atom_ : -scale_ * atom_;
      }
      case Family::Table: {
        const double u = block.uniform(0);
        auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), u);
        const auto i = std::min<std::size_t>(static_cast<std::size_t>(it - cumulative_.begin()), values_.size() - 1);
        return scale_ * values_[i];
      }
    }
    return 0.0;
  }

  friend bool operator==(const EntryDistribution&, const EntryDistribution&) = default;

 private:
  EntryDistribution(Family family, double scale) : family_(family), scale_(scale) { validate_scale(); }

  void validate_scale() const {
    require(std::isfinite(scale_) && scale_ > 0.0, ErrorCode::InvalidSpec, "entry scale must be positive");
  }

  Family family_;
  double scale_;
  double atom_ = 1.0;
  double weight_ = 1.0;
  std::vector<double> values_;
  std::vector<double> probs_;
  std::vector<double> cumulative_;
};

enum class EnsembleKind { Wigner, SampleCovariance };

inline const char* to_string(EnsembleKind k) {
  return k == EnsembleKind::Wigner ? "wigner" : "sample_covariance";
}

/// Parameters of one ensemble. For SampleCovariance the aspect is either an
/// explicit column count m or a ratio c realized as m = round(c n).
struct EnsembleSpec {
  EnsembleKind kind = EnsembleKind::Wigner;
  std::size_t n = 0;
  std::optional<std::size_t> m;
  std::optional<double> c;
  EntryDistribution offdiag = EntryDistribution::gaussian();
  EntryDistribution diag = EntryDistribution::gaussian(std::numbers::sqrt2);
  std::uint64_t seed = 0;

  std::size_t columns() const {
    if (m) return *m;
    if (c) return static_cast<std::size_t>(std::llround(*c * static_cast<double>(n)));
    return n;
  }

  double requested_aspect() const {
    if (c) return *c;
    return static_cast<double>(columns()) / static_cast<double>(n);
  }

  double realized_aspect() const { return static_cast<double>(columns()) / static_cast<double>(n); }

  void validate() const {
    require(n >= 1, ErrorCode::InvalidSpec, "matrix size n must be >= 1");
    require(std::abs(offdiag.variance() - 1.0) < 1e-12, ErrorCode::InvalidSpec,
            "off-diagonal (or X) entries must have unit variance");
    if (kind == EnsembleKind::SampleCovariance) {
      require(!(m && c), ErrorCode::InvalidSpec, "give either m or c, not both");
      if (c) require(std::isfinite(*c) && *c >= 1.0, ErrorCode::UnsupportedAspect, "aspect c must be >= 1");
      require(columns() >= n, ErrorCode::UnsupportedAspect, "sample covariance needs m >= n (c >= 1)");
    }
  }
};

/// Dense symmetric matrix, row-major with both triangles stored.
class SymMatrix {
 public:
  SymMatrix() = default;
  explicit SymMatrix(std::size_t n) : n_(n), data_(n * n, 0.0) {}

  std::size_t size() const { return n_; }
  double operator()(std::size_t i, std::size_t j) const { return data_[i * n_ + j]; }
  double& operator()(std::size_t i, std::size_t j) { return data_[i * n_ + j]; }

  void set_symmetric(std::size_t i, std::size_t j, double v) {
    data_[i * n_ + j] = v;
    data_[j * n_ + i] = v;
  }

  std::span<const double> row(std::size_t i) const { return {data_.data() + i * n_, n_}; }
  std::span<double> row(std::size_t i) { return {data_.data() + i * n_, n_}; }
  const std::vector<double>& data() const { return data_; }

  bool is_symmetric() const {
    for (std::size_t i = 0; i < n_; ++i)
      for (std::size_t j = i + 1; j < n_; ++j)
        if (data_[i * n_ + j] != data_[j * n_ + i]) return false;
    return true;
  }

  double max_abs() const {
    double m = 0.0;
    for (double v : data_) m = std::max(m, std::abs(v));
    return m;
  }

  double trace() const {
    CompensatedSum s;
    for (std::size_t i = 0; i < n_; ++i) s.add(data_[i * n_ + i]);
    return s.value();
  }

  /// Tr M^2, i.e. the squared Frobenius norm of a symmetric matrix.
  double trace_square() const {
    CompensatedSum s;
    for (double v : data_) s.add(v * v);
    return s.value();
  }

  friend bool operator==(const SymMatrix&, const SymMatrix&) = default;

 private:
  std::size_t n_ = 0;
  std::vector<double> data_;
};

struct MatrixSample {
  std::shared_ptr<const EnsembleSpec> spec;
  SymMatrix matrix;
  std::uint32_t replicate = 0;
};

/// M = n^{-1/2} W with W symmetric; entry (i, j), i <= j, is drawn from
/// random block i*n + j of the replicate's substream.
inline MatrixSample sample_wigner(std::shared_ptr<const EnsembleSpec> spec, std::uint32_t replicate) {
  require(spec != nullptr, ErrorCode::InvalidSpec, "null ensemble spec");
  require(spec->kind == EnsembleKind::Wigner, ErrorCode::InvalidSpec, "sample_wigner needs a Wigner spec");
  spec->validate();
  const std::size_t n = spec->n;
  const double norm = 1.0 / std::sqrt(static_cast<double>(n));
  const Substream stream(spec->seed, StreamDomain::MatrixEntries, replicate);
  SymMatrix m(n);
  for (std::size_t i = 0; i < n; ++i) {
    m(i, i) = norm * spec->diag.sample(stream.at(i * n + i));
    for (std::size_t j = i + 1; j < n; ++j) m.set_symmetric(i, j, norm * spec->offdiag.sample(stream.at(i * n + j)));
  }
  return {std::move(spec), std::move(m), replicate};
}

inline MatrixSample sample_wigner(const EnsembleSpec& spec, std::uint32_t replicate) {
  return sample_wigner(std::make_shared<const EnsembleSpec>(spec), replicate);
}

/// M = n^{-1} X X^T with X of size n x m; X(j, k) comes from block j*m + k.
inline MatrixSample sample_covariance(std::shared_ptr<const EnsembleSpec> spec, std::uint32_t replicate) {
  require(spec != nullptr, ErrorCode::InvalidSpec, "null ensemble spec");
  require(spec->kind == EnsembleKind::SampleCovariance, ErrorCode::InvalidSpec,
          "sample_covariance needs a SampleCovariance spec");
  spec->validate();
  const std::size_t n = spec->n;
  const std::size_t m = spec->columns();
  const Substream stream(spec->seed, StreamDomain::MatrixEntries, replicate);
  std::vector<double> x(n * m);
  for (std::size_t j = 0; j < n; ++j)
    for (std::size_t k = 0; k < m; ++k) x[j * m + k] = spec->offdiag.sample(stream.at(j * m + k));
  const double norm = 1.0 / static_cast<double>(n);
  SymMatrix out(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double* xi = x.data() + i * m;
    for (std::size_t j = i; j < n; ++j) {
      const double* xj = x.data() + j * m;
      double s = 0.0;
      for (std::size_t k = 0; k < m; ++k) s += xi[k] * xj[k];
      out.set_symmetric(i, j, norm * s);
    }
  }
  return {std::move(spec), std::move(out), replicate};
}

inline MatrixSample sample_covariance(const EnsembleSpec& spec, std::uint32_t replicate) {
  return sample_covariance(std::make_shared<const EnsembleSpec>(spec), replicate);
}

inline MatrixSample sample_matrix(std::shared_ptr<const EnsembleSpec> spec, std::uint32_t replicate) {
  require(spec != nullptr, ErrorCode::InvalidSpec, "null ensemble spec");
  return spec->kind == EnsembleKind::Wigner ? sample_wigner(std::move(spec), replicate)
                                            : sample_covariance(std::move(spec), replicate);
}

/// Entrywise truncation M_ij 1{|M_ij| <= tau}, recentered by the exact mean
/// of the truncated entry law. Defined for Wigner samples, whose entries are
/// independent draws with known laws.
inline MatrixSample truncate(const MatrixSample& sample, double tau) {
  require(tau > 0.0, ErrorCode::InvalidArgument, "truncation level tau must be > 0");
  require(sample.spec != nullptr && sample.spec->kind == EnsembleKind::Wigner, ErrorCode::InvalidSpec,
          "truncation is defined for Wigner samples only");
  const std::size_t n = sample.matrix.size();
  const double root_n = std::sqrt(static_cast<double>(n));
  // M_ij = w_ij / sqrt(n), so |M_ij| <= tau iff |w_ij| <= tau sqrt(n).
  const double shift_off = sample.spec->offdiag.truncated_mean(tau * root_n) / root_n;
  const double shift_diag = sample.spec->diag.truncated_mean(tau * root_n) / root_n;
  MatrixSample out{sample.spec, SymMatrix(n), sample.replicate};
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i; j < n; ++j) {
      const double v = sample.matrix(i, j);
      const double kept = std::abs(v) <= tau ? v : 0.0;
      out.matrix.set_symmetric(i, j, kept - (i == j ? shift_diag : shift_off));
    }
  }
  return out;
}

/// Number of upper-triangle entries zeroed by truncate(sample, tau).
inline std::size_t count_truncated(const MatrixSample& sample, double tau) {
  std::size_t count = 0;
  const std::size_t n = sample.matrix.size();
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i; j < n; ++j)
      if (std::abs(sample.matrix(i, j)) > tau) ++count;
  return count;
}

/// L_n^(4)(tau) = E{w^4 1{|w| > tau sqrt(n)}} for i.i.d. entries with law dist.
inline double lindeberg_l4(const EntryDistribution& dist, std::size_t n, double tau) {
  require(tau > 0.0, ErrorCode::InvalidArgument, "tau must be > 0");
  require(n >= 1, ErrorCode::InvalidArgument, "n must be >= 1");
  return dist.tail_fourth_moment(tau * std::sqrt(static_cast<double>(n)));
}

/// Full double-sum form n^{-2} sum_{j,k} E{w_jk^4 1{...}} over a Wigner
/// ensemble, keeping the n diagonal terms with their own law.
inline double lindeberg_l4(const EnsembleSpec& spec, double tau) {
  require(spec.kind == EnsembleKind::Wigner, ErrorCode::InvalidSpec, "Lindeberg functional needs a Wigner spec");
  const double n = static_cast<double>(spec.n);
  const double off = lindeberg_l4(spec.offdiag, spec.n, tau);
  const double dia = lindeberg_l4(spec.diag, spec.n, tau);
  return ((n - 1.0) * off + dia) / n;
}

}  // namespace rmtclt
