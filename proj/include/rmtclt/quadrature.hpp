#pragma once

// Fixed quadrature rules used by the variance evaluators and the
// propagation-inequality check.

#include <cmath>
#include <cstddef>
#include <vector>

#include "rmtclt/eigensolver.hpp"
#include "rmtclt/error.hpp"
#include "rmtclt/numeric.hpp"

namespace rmtclt {

struct QuadratureRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

/// Midpoint rule on [0, pi]: theta_k = (k + 1/2) pi / n, weight pi / n.
/// Under lambda = 2 cos(theta) these are the Chebyshev-Gauss nodes of the
/// first kind, so int f(lambda) / sqrt(4 - lambda^2) d lambda is exact for
/// polynomials of degree < 2n.
inline QuadratureRule chebyshev_midpoint(std::size_t n) {
  QuadratureRule r;
  r.nodes.resize(n);
  r.weights.assign(n, pi / static_cast<double>(n));
  for (std::size_t k = 0; k < n; ++k) r.nodes[k] = (static_cast<double>(k) + 0.5) * pi / static_cast<double>(n);
  return r;
}

/// Trapezoid rule on [0, pi] with n + 1 points theta_j = j pi / n, halved end
/// weights. Interleaves the midpoint grid of the same n.
inline QuadratureRule chebyshev_trapezoid(std::size_t n) {
  QuadratureRule r;
  r.nodes.resize(n + 1);
  r.weights.assign(n + 1, pi / static_cast<double>(n));
  for (std::size_t j = 0; j <= n; ++j) r.nodes[j] = static_cast<double>(j) * pi / static_cast<double>(n);
  r.weights.front() *= 0.5;
  r.weights.back() *= 0.5;
  return r;
}

/// Generalized Gauss-Laguerre rule for int_0^inf x^alpha e^{-x} f(x) dx.
/// Nodes are eigenvalues of the Jacobi matrix (Golub-Welsch); weights come
/// from the closed form Gamma(n+a+1) x_i / (n! (n+1)^2 L_{n+1}^a(x_i)^2).
inline QuadratureRule gauss_laguerre(std::size_t n, double alpha) {
  require(n >= 1, ErrorCode::InvalidArgument, "Gauss-Laguerre needs at least one node");
  require(alpha > -1.0, ErrorCode::InvalidArgument, "Gauss-Laguerre needs alpha > -1");
  Tridiagonal jacobi;
  jacobi.diag.resize(n);
  jacobi.offdiag.resize(n - 1);
  for (std::size_t i = 0; i < n; ++i) jacobi.diag[i] = 2.0 * static_cast<double>(i) + alpha + 1.0;
  for (std::size_t i = 1; i < n; ++i) {
    const double di = static_cast<double>(i);
    jacobi.offdiag[i - 1] = std::sqrt(di * (di + alpha));
  }
  auto nodes = tridiagonal_eigenvalues(std::move(jacobi));
  if (!nodes) fail(ErrorCode::Accuracy, "Gauss-Laguerre node computation did not converge");

  QuadratureRule r;
  r.nodes = std::move(*nodes);
  r.weights.resize(n);
  const double dn = static_cast<double>(n);
  const double log_ratio = std::lgamma(dn + alpha + 1.0) - std::lgamma(dn + 1.0);
  for (std::size_t i = 0; i < n; ++i) {
    const double x = r.nodes[i];
    double prev = 1.0;
    double cur = 1.0 + alpha - x;
    for (std::size_t k = 1; k <= n; ++k) {
      const double dk = static_cast<double>(k);
      const double next = ((2.0 * dk + 1.0 + alpha - x) * cur - (dk + alpha) * prev) / (dk + 1.0);
      prev = cur;
      cur = next;
    }
    r.weights[i] = std::exp(log_ratio) * x / ((dn + 1.0) * (dn + 1.0) * cur * cur);
  }
  return r;
}

}  // namespace rmtclt
