#pragma once

// Limiting objects for linear eigenvalue statistics: the semicircle and
// Marchenko-Pastur laws, the semicircle Stieltjes transform, the limiting
// variance functionals and the resolvent covariance kernel.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numbers>
#include <string>
#include <utility>
#include <vector>

#include <boost/math/special_functions/erf.hpp>

#include "rmtclt/ensemble.hpp"
#include "rmtclt/error.hpp"
#include "rmtclt/numeric.hpp"
#include "rmtclt/quadrature.hpp"
#include "rmtclt/spectral.hpp"
#include "rmtclt/test_function.hpp"

namespace rmtclt {

inline double semicircle_density(double lambda) {
  if (lambda <= -2.0 || lambda >= 2.0) return 0.0;
  return std::sqrt(4.0 - lambda * lambda) / (2.0 * pi);
}

inline double semicircle_cdf(double lambda) {
  if (lambda <= -2.0) return 0.0;
  if (lambda >= 2.0) return 1.0;
  return 0.5 + lambda * std::sqrt(4.0 - lambda * lambda) / (4.0 * pi) + std::asin(lambda / 2.0) / pi;
}

struct MarchenkoPasturLaw {
  double c = 1.0;

  explicit MarchenkoPasturLaw(double ratio) : c(ratio) {
    require(std::isfinite(ratio) && ratio >= 1.0, ErrorCode::UnsupportedAspect, "Marchenko-Pastur law needs c >= 1");
  }

  double a_minus() const { return (1.0 - std::sqrt(c)) * (1.0 - std::sqrt(c)); }
  double a_plus() const { return (1.0 + std::sqrt(c)) * (1.0 + std::sqrt(c)); }
  double a_m() const { return 1.0 + c; }

  double density(double lambda) const {
    if (lambda <= a_minus() || lambda >= a_plus() || lambda <= 0.0) return 0.0;
    // factored so the hard edge at c = 1 keeps its digits
    return std::sqrt((a_plus() - lambda) * (lambda - a_minus())) / (2.0 * pi * lambda);
  }
};

inline double mp_density(const MarchenkoPasturLaw& law, double lambda) { return law.density(lambda); }

/// sqrt(z^2 - 4) as sqrt(z - 2) sqrt(z + 2) with principal roots; the cut is
/// [-2, 2] only.
inline complex sqrt_z2_minus_4(complex z) { return std::sqrt(z - 2.0) * std::sqrt(z + 2.0); }

/// Root of f^2 + z f + 1 = 0 with Im f Im z > 0, written as -2 / (z + s)
/// to avoid cancellation for large |z|.
inline complex stieltjes_f(ComplexPoint z) {
  require(z.im != 0.0, ErrorCode::Domain, "Stieltjes transform needs Im z != 0");
  const complex zz = z.value();
  return -2.0 / (zz + sqrt_z2_minus_4(zz));
}

/// Entry-law parameters entering the limiting variance: the diagonal
/// variance w2 and the off-diagonal fourth cumulant kappa4.
struct MomentParams {
  double w2 = 2.0;
  double kappa4 = 0.0;

  void validate() const {
    require(std::isfinite(w2) && w2 >= 0.0, ErrorCode::InvalidArgument, "w2 must be >= 0");
    require(std::isfinite(kappa4) && kappa4 >= -2.0, ErrorCode::InvalidArgument, "kappa4 must be >= -2");
  }

  static MomentParams from(const EnsembleSpec& spec) {
    MomentParams p;
    p.kappa4 = spec.offdiag.kappa4();
    p.w2 = spec.kind == EnsembleKind::Wigner ? spec.diag.variance() : 2.0;
    return p;
  }
};

struct QuadratureSpec {
  std::size_t nodes = 256;
  double tol = 1e-10;  // relative change allowed between successive doublings
  std::size_t max_nodes = 8192;

  /// Defaults for the trapezoid rule of the contour-form variance.
  static QuadratureSpec trapezoid() { return {1000, 1e-8, 16000}; }
};

struct VarianceReport {
  double total = 0.0;
  double term_main = 0.0;
  double term_kappa4 = 0.0;
  double term_w2 = 0.0;
  std::size_t nodes_used = 0;
  double est_error = 0.0;
};

namespace detail {

struct ChebyshevTerms {
  double main = 0.0;  // the double integral, already divided by 2 pi^2
  double m1 = 0.0;    // int_0^pi phi(center + radius cos t) cos t dt
  double m2 = 0.0;    // int_0^pi phi(center + radius cos t) cos 2t dt
  double phi_scale = 0.0;
};

/// Terms common to both variance functionals on the support
/// [center - radius, center + radius] after lambda = center + radius cos t.
/// The double integral pairs a midpoint grid with the interleaved trapezoid
/// grid so the difference quotient never sees lambda1 == lambda2 except
/// through rounding near the endpoints.
inline ChebyshevTerms chebyshev_terms(const TestFunction& phi, double center, double radius, std::size_t n) {
  const QuadratureRule a = chebyshev_midpoint(n);
  const QuadratureRule b = chebyshev_trapezoid(n);
  const double width = 2.0 * radius;
  const double diag_tol = 1e-7 * width;
  constexpr double fd_step = 1e-5;

  std::vector<double> ca(a.nodes.size()), la(a.nodes.size()), fa(a.nodes.size());
  std::vector<double> cb(b.nodes.size()), lb(b.nodes.size()), fb(b.nodes.size());
  ChebyshevTerms t;
  for (std::size_t i = 0; i < a.nodes.size(); ++i) {
    ca[i] = std::cos(a.nodes[i]);
    la[i] = center + radius * ca[i];
    fa[i] = phi(la[i]);
    t.phi_scale = std::max(t.phi_scale, std::abs(fa[i]));
  }
  for (std::size_t j = 0; j < b.nodes.size(); ++j) {
    cb[j] = std::cos(b.nodes[j]);
    lb[j] = center + radius * cb[j];
    fb[j] = phi(lb[j]);
    t.phi_scale = std::max(t.phi_scale, std::abs(fb[j]));
  }

  std::vector<double> rows(a.nodes.size());
  for (std::size_t i = 0; i < a.nodes.size(); ++i) {
    CompensatedSum row;
    for (std::size_t j = 0; j < b.nodes.size(); ++j) {
      const double dl = la[i] - lb[j];
      double q;
      if (std::abs(dl) < diag_tol) {
        q = phi.has_derivative() ? phi.derivative(la[i])
                                 : (phi(la[i] + fd_step) - phi(la[i] - fd_step)) / (2.0 * fd_step);
      } else {
        q = (fa[i] - fb[j]) / dl;
      }
      row.add(b.weights[j] * q * q * (1.0 - ca[i] * cb[j]));
    }
    rows[i] = a.weights[i] * row.value();
  }
  t.main = radius * radius * pairwise_sum(rows) / (2.0 * pi * pi);

  std::vector<double> s1(a.nodes.size()), s2(a.nodes.size());
  for (std::size_t i = 0; i < a.nodes.size(); ++i) {
    s1[i] = a.weights[i] * fa[i] * ca[i];
    s2[i] = a.weights[i] * fa[i] * (2.0 * ca[i] * ca[i] - 1.0);
  }
  t.m1 = pairwise_sum(s1);
  t.m2 = pairwise_sum(s2);
  return t;
}

template <class Eval>
VarianceReport refine_by_doubling(const QuadratureSpec& quad, Eval eval, const char* what) {
  require(quad.nodes >= 32, ErrorCode::InvalidArgument, "quadrature needs at least 32 nodes");
  require(quad.tol > 0.0, ErrorCode::InvalidArgument, "quadrature tolerance must be > 0");
  std::size_t n = quad.nodes;
  VarianceReport prev = eval(n).first;
  while (true) {
    const std::size_t next = 2 * n;
    auto [cur, fl] = eval(next);
    const double change = std::abs(cur.total - prev.total);
    const double scale =
        std::max(std::abs(cur.total), std::abs(cur.term_main) + std::abs(cur.term_kappa4) + std::abs(cur.term_w2));
    cur.nodes_used = next;
    cur.est_error = change;
    // The second test accepts changes at rounding level relative to phi^2.
    if (change <= quad.tol * scale || change <= 1e-13 * fl) return cur;
    if (next >= quad.max_nodes) throw AccuracyError(std::string(what) + " did not converge", cur.total, change);
    prev = cur;
    n = next;
  }
}

}  // namespace detail

/// Limiting variance of a Wigner linear statistic: the main double integral,
/// the kappa4 term and the (w2 - 2) term, integrated in theta with
/// lambda = 2 cos(theta). Nodes double until successive totals agree.
inline VarianceReport variance_wigner(const TestFunction& phi, const MomentParams& params,
                                      const QuadratureSpec& quad = {}) {
  params.validate();
  auto eval = [&](std::size_t n) {
    const detail::ChebyshevTerms t = detail::chebyshev_terms(phi, 0.0, 2.0, n);
    VarianceReport r;
    r.term_main = t.main;
    r.term_kappa4 = 2.0 * params.kappa4 * t.m2 * t.m2 / (pi * pi);
    r.term_w2 = (params.w2 - 2.0) * t.m1 * t.m1 / (pi * pi);
    r.total = r.term_main + r.term_kappa4 + r.term_w2;
    return std::pair{r, t.phi_scale * t.phi_scale};
  };
  return detail::refine_by_doubling(quad, eval, "variance_wigner");
}

/// Limiting variance of a sample covariance linear statistic (main term and
/// kappa4 term), integrated with lambda = a_m + 2 sqrt(c) cos(theta).
inline VarianceReport variance_sample_cov(const TestFunction& phi, double c, double kappa4,
                                          const QuadratureSpec& quad = {}) {
  const MarchenkoPasturLaw law(c);
  require(std::isfinite(kappa4) && kappa4 >= -2.0, ErrorCode::InvalidArgument, "kappa4 must be >= -2");
  auto eval = [&](std::size_t n) {
    const detail::ChebyshevTerms t = detail::chebyshev_terms(phi, law.a_m(), 2.0 * std::sqrt(c), n);
    VarianceReport r;
    r.term_main = t.main;
    r.term_kappa4 = kappa4 * t.m1 * t.m1 / (pi * pi);
    r.total = r.term_main + r.term_kappa4;
    return std::pair{r, t.phi_scale * t.phi_scale};
  };
  return detail::refine_by_doubling(quad, eval, "variance_sample_cov");
}

namespace detail {

/// Kernel with s = sqrt(z^2 - 4) and f = f(z) supplied for both arguments.
/// The first term (z1 z2 - 4 - s1 s2) / ((z1 - z2)^2 s1 s2) is rewritten via
/// (z1 z2 - 4)^2 - (s1 s2)^2 = 4 (z1 - z2)^2 as 4 / (s1 s2 (z1 z2 - 4 + s1 s2))
/// whenever that denominator is the larger one, which removes the
/// cancellation at z1 = z2.
inline complex kernel_C(complex z1, complex s1, complex f1, complex z2, complex s2, complex f2,
                        const MomentParams& p) {
  const complex ss = s1 * s2;
  const complex base = z1 * z2 - 4.0;
  const complex plus = base + ss;
  const complex minus = base - ss;
  complex first;
  if (std::abs(plus) >= std::abs(minus)) {
    first = 4.0 / (ss * plus);
  } else {
    const complex d = z1 - z2;
    first = minus / (d * d * ss);
  }
  const complex ff = f1 * f2;
  return first + (p.w2 - 2.0) * ff / ss + 2.0 * p.kappa4 * ff * ff / ss;
}

}  // namespace detail

/// Limiting covariance kernel of the resolvent traces,
/// lim Cov{gamma_n(z1), gamma_n(z2)}.
inline complex kernel_C(ComplexPoint z1, ComplexPoint z2, const MomentParams& params) {
  require(z1.im != 0.0 && z2.im != 0.0, ErrorCode::Domain, "kernel_C needs both arguments off the real axis");
  const complex a = z1.value();
  const complex b = z2.value();
  return detail::kernel_C(a, sqrt_z2_minus_4(a), stieltjes_f(z1), b, sqrt_z2_minus_4(b), stieltjes_f(z2), params);
}

/// Half-width (about the center) of the smallest window holding
/// 1 - mass_tol of int |phi0|. Infinite when phi0 is not integrable.
inline double integrable_window(const TestFunction& phi0, double mass_tol, double* center = nullptr) {
  const auto& v = phi0.variant();
  if (const auto* g = std::get_if<TestFunction::GaussianBump>(&v)) {
    if (center) *center = g->center;
    return g->width * std::numbers::sqrt2 * boost::math::erfc_inv(mass_tol);
  }
  if (const auto* r = std::get_if<TestFunction::ImResolvent>(&v)) {
    if (center) *center = r->x;
    return r->y / std::tan(0.5 * pi * mass_tol);
  }
  if (const auto* s = std::get_if<TestFunction::PoissonSmoothed>(&v)) {
    // Both the base and the Poisson kernel may leak half the budget.
    const double base = integrable_window(*s->base, 0.5 * mass_tol, center);
    return base + s->eta / std::tan(0.25 * pi * mass_tol);
  }
  return std::numeric_limits<double>::infinity();
}

/// Limiting variance of N[P_eta * phi0] written as a double integral of phi0
/// against the covariance kernel at mu + i eta:
/// (4 pi^2)^{-1} int int phi0 phi0 [2 Re C(z1, conj z2) - 2 Re C(z1, z2)].
/// The trapezoid rule runs on the window holding 1 - 1e-8 of int |phi0|.
inline VarianceReport variance_kernel_form(const TestFunction& phi0, double eta, const MomentParams& params,
                                           const QuadratureSpec& quad = QuadratureSpec::trapezoid()) {
  require(eta > 0.0, ErrorCode::Domain, "eta must be > 0");
  params.validate();
  if (phi0.is_zero()) return {};
  require(phi0.is_integrable(), ErrorCode::Unsupported, "kernel-form variance needs an integrable phi0");
  constexpr double mass_tol = 1e-8;
  double center = 0.0;
  const double half = integrable_window(phi0, mass_tol, &center);
  // Resolving the kernel needs a step well below eta.
  const double min_nodes = 8.0 * half / eta;
  if (!std::isfinite(half) || min_nodes > static_cast<double>(quad.max_nodes)) {
    throw AccuracyError("tail of phi0 beyond a resolvable window exceeds the mass tolerance",
                        std::numeric_limits<double>::quiet_NaN(), mass_tol);
  }

  auto eval = [&](std::size_t n) {
    const double lo = center - half;
    const double h = 2.0 * half / static_cast<double>(n - 1);
    std::vector<complex> z(n), s(n), f(n);
    std::vector<double> w(n);
    double scale = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double mu = lo + h * static_cast<double>(i);
      z[i] = {mu, eta};
      s[i] = sqrt_z2_minus_4(z[i]);
      f[i] = -2.0 / (z[i] + s[i]);
      w[i] = h * phi0(mu) * ((i == 0 || i + 1 == n) ? 0.5 : 1.0);
      scale = std::max(scale, std::abs(w[i] / h));
    }
    std::vector<double> rows(n);
    for (std::size_t i = 0; i < n; ++i) {
      CompensatedSum row;
      if (w[i] != 0.0) {
        for (std::size_t j = i; j < n; ++j) {
          const complex cc = detail::kernel_C(z[i], s[i], f[i], std::conj(z[j]), std::conj(s[j]), std::conj(f[j]),
                                              params);
          const complex cz = detail::kernel_C(z[i], s[i], f[i], z[j], s[j], f[j], params);
          const double bracket = 2.0 * (cc.real() - cz.real());
          row.add((j == i ? 1.0 : 2.0) * w[j] * bracket);
        }
      }
      rows[i] = w[i] * row.value();
    }
    VarianceReport r;
    r.total = pairwise_sum(rows) / (4.0 * pi * pi);
    r.term_main = r.total;
    return std::pair{r, scale * scale};
  };
  QuadratureSpec q = quad;
  q.nodes = std::max<std::size_t>(q.nodes, static_cast<std::size_t>(std::ceil(min_nodes)));
  return detail::refine_by_doubling(q, eval, "variance_kernel_form");
}

}  // namespace rmtclt
