#pragma once

// Eigenvalues of dense real symmetric matrices: Householder reduction to
// tridiagonal form followed by implicit-shift QL. No eigenvectors.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <vector>

#include "rmtclt/ensemble.hpp"
#include "rmtclt/error.hpp"

namespace rmtclt {

struct Tridiagonal {
  std::vector<double> diag;     // n entries
  std::vector<double> offdiag;  // n-1 entries, offdiag[i] couples i and i+1
};

/// Orthogonal similarity reduction A -> Q^T A Q = T. Operates on a copy of
/// the full row-major storage; rows of the trailing block stay contiguous, so
/// the symmetric matrix-vector product and rank-2 update both stream rows.
inline Tridiagonal tridiagonalize(const SymMatrix& matrix) {
  const std::size_t n = matrix.size();
  Tridiagonal t;
  t.diag.assign(n, 0.0);
  t.offdiag.assign(n > 0 ? n - 1 : 0, 0.0);
  if (n == 0) return t;
  std::vector<double> a = matrix.data();
  std::vector<double> v(n), p(n);

  for (std::size_t k = 0; k + 2 < n; ++k) {
    t.diag[k] = a[k * n + k];
    const std::size_t len = n - k - 1;
    const double* x = a.data() + k * n + k + 1;  // row k right of the diagonal == column k below it

    double scale = 0.0;
    for (std::size_t i = 1; i < len; ++i) scale = std::max(scale, std::abs(x[i]));
    if (scale == 0.0) {
      t.offdiag[k] = x[0];
      continue;
    }
    scale = std::max(scale, std::abs(x[0]));
    double ss = 0.0;
    for (std::size_t i = 0; i < len; ++i) {
      const double xi = x[i] / scale;
      ss += xi * xi;
    }
    const double alpha = scale * std::sqrt(ss);
    const double beta = x[0] >= 0.0 ? -alpha : alpha;

    // Reflector I - tau v v^T with v = x - beta e1.
    for (std::size_t i = 0; i < len; ++i) v[i] = x[i];
    v[0] -= beta;
    const double vtv = 2.0 * alpha * (alpha + std::abs(x[0]));
    const double tau = 2.0 / vtv;

    // p = tau A22 v
    const std::size_t off = k + 1;
    for (std::size_t i = 0; i < len; ++i) {
      const double* row = a.data() + (off + i) * n + off;
      double s = 0.0;
      for (std::size_t j = 0; j < len; ++j) s += row[j] * v[j];
      p[i] = tau * s;
    }
    double ptv = 0.0;
    for (std::size_t i = 0; i < len; ++i) ptv += p[i] * v[i];
    const double kk = 0.5 * tau * ptv;
    for (std::size_t i = 0; i < len; ++i) p[i] -= kk * v[i];  // p now holds w

    // A22 -= v w^T + w v^T
    for (std::size_t i = 0; i < len; ++i) {
      double* row = a.data() + (off + i) * n + off;
      const double vi = v[i];
      const double wi = p[i];
      for (std::size_t j = 0; j < len; ++j) row[j] -= vi * p[j] + wi * v[j];
    }
    t.offdiag[k] = beta;
  }
  if (n >= 2) {
    t.diag[n - 2] = a[(n - 2) * n + (n - 2)];
    t.offdiag[n - 2] = a[(n - 2) * n + (n - 1)];
  }
  t.diag[n - 1] = a[(n - 1) * n + (n - 1)];
  return t;
}

namespace detail {

/// sqrt(a^2 + b^2); falls back to hypot only where squaring could overflow.
inline double pythag(double a, double b) {
  const double m = std::max(std::abs(a), std::abs(b));
  if (m > 1e150 || (m < 1e-150 && m > 0.0)) return std::hypot(a, b);
  return std::sqrt(a * a + b * b);
}

}  // namespace detail

struct QlOptions {
  double deflation_tol = 1e-15;  // relative to |d_m| + |d_{m+1}|
  std::size_t sweeps_per_row = 30;
};

/// Implicit-shift QL on a symmetric tridiagonal matrix. Returns the
/// eigenvalues ascending, or nullopt when the iteration cap is exceeded.
inline std::optional<std::vector<double>> tridiagonal_eigenvalues(Tridiagonal t, const QlOptions& opt = {}) {
  const std::size_t n = t.diag.size();
  std::vector<double>& d = t.diag;
  std::vector<double> e = t.offdiag;
  e.push_back(0.0);

  double tnorm = 0.0;
  for (std::size_t i = 0; i < n; ++i) tnorm = std::max(tnorm, std::abs(d[i]) + std::abs(e[i]));
  const double tiny = 1e-30 * tnorm;

  const std::size_t cap = opt.sweeps_per_row * std::max<std::size_t>(n, 1);
  std::size_t iterations = 0;
  const auto ni = static_cast<std::ptrdiff_t>(n);

  for (std::ptrdiff_t l = 0; l < ni; ++l) {
    std::ptrdiff_t m;
    do {
      for (m = l; m < ni - 1; ++m) {
        const double dd = std::abs(d[m]) + std::abs(d[m + 1]);
        if (std::abs(e[m]) <= opt.deflation_tol * dd || std::abs(e[m]) <= tiny) break;
      }
      if (m == l) break;
      if (++iterations > cap) return std::nullopt;

      double g = (d[l + 1] - d[l]) / (2.0 * e[l]);
      double r = detail::pythag(g, 1.0);
      g = d[m] - d[l] + e[l] / (g + std::copysign(r, g));
      double s = 1.0, c = 1.0, p = 0.0;
      bool underflow = false;
      std::ptrdiff_t i;
      for (i = m - 1; i >= l; --i) {
        const double f = s * e[i];
        const double b = c * e[i];
        r = detail::pythag(f, g);
        e[i + 1] = r;
        if (r == 0.0) {
          d[i + 1] -= p;
          e[m] = 0.0;
          underflow = true;
          break;
        }
        s = f / r;
        c = g / r;
        g = d[i + 1] - p;
        r = (d[i] - g) * s + 2.0 * c * b;
        p = s * r;
        d[i + 1] = g + p;
        g = c * r - b;
      }
      if (underflow) continue;
      d[l] -= p;
      e[l] = g;
      e[m] = 0.0;
    } while (m != l);
  }
  std::sort(d.begin(), d.end());
  return d;
}

/// Eigenvalues of a symmetric matrix, ascending. The seed and replicate only
/// label the failure for reproduction.
inline std::vector<double> symmetric_eigenvalues(const SymMatrix& matrix, std::uint64_t seed = 0,
                                                 std::int64_t replicate = -1, const QlOptions& opt = {}) {
  auto values = tridiagonal_eigenvalues(tridiagonalize(matrix), opt);
  if (!values) {
    throw EigensolverFailure("QL iteration exceeded " + std::to_string(opt.sweeps_per_row) + "*n sweeps", seed,
                             replicate);
  }
  return std::move(*values);
}

}  // namespace rmtclt
