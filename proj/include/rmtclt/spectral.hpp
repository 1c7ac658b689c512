#pragma once

// Spectra of sampled matrices and the statistics read off them.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <memory>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "rmtclt/eigensolver.hpp"
#include "rmtclt/ensemble.hpp"
#include "rmtclt/error.hpp"
#include "rmtclt/numeric.hpp"
#include "rmtclt/test_function.hpp"

namespace rmtclt {

struct Spectrum {
  std::vector<double> eigenvalues;  // ascending
  std::shared_ptr<const EnsembleSpec> spec;
  std::uint32_t replicate = 0;

  std::size_t size() const { return eigenvalues.size(); }
};

/// Point in the complex plane used as a resolvent argument.
struct ComplexPoint {
  double re = 0.0;
  double im = 0.0;

  complex value() const { return {re, im}; }
};

/// Sum-rule check: sum(lambda) against Tr M, sum(lambda^2) against Tr M^2.
/// Tolerance 1e-10 n max|M_ij| (squared scale for the second moment).
inline bool sum_rules_hold(std::span<const double> eigenvalues, const SymMatrix& m) {
  const double n = static_cast<double>(m.size());
  const double mmax = m.max_abs();
  CompensatedSum s1, s2;
  for (double l : eigenvalues) {
    s1.add(l);
    s2.add(l * l);
  }
  const double tol1 = 1e-10 * n * mmax;
  const double tol2 = 1e-10 * n * std::max(mmax, mmax * mmax);
  return std::abs(s1.value() - m.trace()) <= tol1 && std::abs(s2.value() - m.trace_square()) <= tol2;
}

inline Spectrum eigenvalues(const MatrixSample& sample) {
  require(sample.matrix.is_symmetric(), ErrorCode::InvalidArgument, "eigenvalues() needs a symmetric matrix");
  const std::uint64_t seed = sample.spec ? sample.spec->seed : 0;
  std::vector<double> values = symmetric_eigenvalues(sample.matrix, seed, sample.replicate);
  if (!sum_rules_hold(values, sample.matrix)) {
    throw EigensolverFailure("eigenvalues violate the trace sum rules", seed, sample.replicate);
  }
  return {std::move(values), sample.spec, sample.replicate};
}

/// Spectrum built from given values (sorted on construction).
inline Spectrum make_spectrum(std::vector<double> values) {
  std::sort(values.begin(), values.end());
  return {std::move(values), nullptr, 0};
}

/// gamma_n(z) = sum_j 1/(lambda_j - z), accumulated as separate real and
/// imaginary compensated sums.
inline complex resolvent_trace(const Spectrum& spectrum, ComplexPoint z) {
  require(z.im != 0.0, ErrorCode::Domain, "resolvent argument must be off the real axis");
  CompensatedSum re, im;
  for (double l : spectrum.eigenvalues) {
    const double d = l - z.re;
    const double den = d * d + z.im * z.im;
    re.add(d / den);
    im.add(z.im / den);
  }
  return {re.value(), im.value()};
}

/// N_n[phi] = sum_j phi(lambda_j). An ImResolvent function is routed through
/// the resolvent trace so the two paths agree bit for bit.
inline double linear_statistic(const Spectrum& spectrum, const TestFunction& phi) {
  if (const auto* r = std::get_if<TestFunction::ImResolvent>(&phi.variant())) {
    return phi.scale() * resolvent_trace(spectrum, {r->x, r->y}).imag() / pi;
  }
  CompensatedSum s;
  for (double l : spectrum.eigenvalues) s.add(phi(l));
  return s.value();
}

struct PoissonStatistic {
  double direct = 0.0;     // sum_j P_y(x - lambda_j)
  double resolvent = 0.0;  // pi^{-1} Im gamma_n(x + iy)
};

/// Both evaluations of N_n[P_y(x - .)]; they must agree to 1e-12 n relative.
inline PoissonStatistic poisson_statistic(const Spectrum& spectrum, double x, double y) {
  require(y > 0.0, ErrorCode::Domain, "poisson_statistic needs y > 0");
  CompensatedSum direct;
  for (double l : spectrum.eigenvalues) {
    const double u = x - l;
    direct.add(y / (pi * (u * u + y * y)));
  }
  PoissonStatistic out{direct.value(), resolvent_trace(spectrum, {x, y}).imag() / pi};
  const double scale = std::max(std::abs(out.direct), 1e-300);
  if (std::abs(out.direct - out.resolvent) > 1e-12 * static_cast<double>(std::max<std::size_t>(spectrum.size(), 1)) * scale) {
    fail(ErrorCode::Accuracy, "Poisson and resolvent evaluations disagree");
  }
  return out;
}

/// One eigenvalue per line after a header comment carrying the spec hash.
inline void write_spectrum_csv(std::ostream& os, const Spectrum& spectrum, const std::string& spec_hash) {
  os << "# spec_hash=" << spec_hash << " replicate=" << spectrum.replicate << " n=" << spectrum.size() << "\n";
  char buf[32];
  for (double l : spectrum.eigenvalues) {
    std::snprintf(buf, sizeof buf, "%.17g", l);
    os << buf << "\n";
  }
}

}  // namespace rmtclt
