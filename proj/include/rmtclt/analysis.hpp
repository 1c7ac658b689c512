#pragma once

// Poisson kernel and smoothing, Fourier transforms on a grid, the H_s norm
// int (1 + 2|k|)^{2s} |phi^(k)|^2 dk and the D_s kernel.

#include <cmath>
#include <complex>
#include <cstddef>
#include <limits>
#include <mutex>
#include <vector>

#include <fftw3.h>

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/special_functions/erf.hpp>

#include "rmtclt/error.hpp"
#include "rmtclt/numeric.hpp"
#include "rmtclt/test_function.hpp"

namespace rmtclt {

inline double poisson_kernel(double x, double y) {
  require(y > 0.0, ErrorCode::Domain, "Poisson kernel needs y > 0");
  return y / (pi * (x * x + y * y));
}

/// phi_eta = P_eta * phi0. Closed forms are used for Gaussian and Poisson
/// bases; see TestFunction::poisson_smoothed.
inline TestFunction smooth(const TestFunction& phi0, double eta) { return TestFunction::poisson_smoothed(phi0, eta); }

/// (P_eta * phi0)(x) by adaptive quadrature after t = x + eta tan(u), which
/// turns the convolution into pi^{-1} int_{-pi/2}^{pi/2} phi0(x + eta tan u) du.
inline double poisson_convolve_numeric(const TestFunction& phi0, double eta, double x) {
  require(eta > 0.0, ErrorCode::Domain, "smoothing width eta must be > 0");
  require(phi0.is_integrable(), ErrorCode::Unsupported, "Poisson smoothing needs an integrable base");
  auto integrand = [&](double u) { return phi0(x + eta * std::tan(u)); };
  double err = 0.0;
  const double half = 0.5 * pi;
  const double v =
      boost::math::quadrature::gauss_kronrod<double, 61>::integrate(integrand, -half, half, 30, 1e-13, &err);
  return v / pi;
}

namespace detail {

/// FFTW's planner is not thread-safe; execution is.
inline std::mutex& fftw_planner_mutex() {
  static std::mutex m;
  return m;
}

/// Half-width around the center outside of which |phi|^2 carries at most
/// tail_tol of its total mass.
inline double l2_window(const TestFunction& phi, double tail_tol, double* center) {
  const auto& v = phi.variant();
  if (const auto* g = std::get_if<TestFunction::GaussianBump>(&v)) {
    *center = g->center;
    return g->width * boost::math::erfc_inv(tail_tol);
  }
  if (const auto* r = std::get_if<TestFunction::ImResolvent>(&v)) {
    // int_{|u|>R} P_y^2 / int P_y^2 <= 4 y^3 / (3 pi R^3)
    *center = r->x;
    return r->y * std::cbrt(4.0 / (3.0 * pi * tail_tol));
  }
  if (const auto* s = std::get_if<TestFunction::PoissonSmoothed>(&v)) {
    const double base = l2_window(*s->base, 0.5 * tail_tol, center);
    return base + s->eta * std::cbrt(4.0 / (3.0 * pi * 0.5 * tail_tol));
  }
  fail(ErrorCode::NotInHs, phi.name() + " is not square integrable");
}

/// Length scale of phi in x; |phi^| decays on the scale 1 / width.
inline double spatial_width(const TestFunction& phi) {
  const auto& v = phi.variant();
  if (const auto* g = std::get_if<TestFunction::GaussianBump>(&v)) return g->width;
  if (const auto* r = std::get_if<TestFunction::ImResolvent>(&v)) return r->y;
  if (const auto* s = std::get_if<TestFunction::PoissonSmoothed>(&v)) return std::max(spatial_width(*s->base), s->eta);
  return 1.0;
}

}  // namespace detail

/// Samples of phi^(k) = (2 pi)^{-1} int e^{ikx} phi(x) dx on the FFT grid
/// k_m = 2 pi m / (N dx), m = -N/2 .. N/2 - 1, from N samples of phi on
/// [center - L, center + L).
struct FourierGrid {
  double center = 0.0;
  double half_width = 0.0;
  std::size_t samples = 0;
  double dk = 0.0;
  std::vector<double> k;
  std::vector<complex> values;
};

inline FourierGrid fourier_grid(const TestFunction& phi, std::size_t samples = std::size_t{1} << 14,
                                double tail_tol = 1e-10) {
  require(samples >= 16 && samples % 2 == 0, ErrorCode::InvalidArgument, "FFT grid needs an even size >= 16");
  require(phi.is_integrable(), ErrorCode::NotInHs, phi.name() + " has no Fourier transform (not integrable)");
  FourierGrid g;
  g.samples = samples;
  // The window is padded so the k spacing stays below 0.05 / width.
  g.half_width = std::max(detail::l2_window(phi, tail_tol, &g.center), 20.0 * pi * detail::spatial_width(phi));
  const double dx = 2.0 * g.half_width / static_cast<double>(samples);
  const double x0 = g.center - g.half_width;
  g.dk = 2.0 * pi / (static_cast<double>(samples) * dx);

  auto* buf = static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * samples));
  require(buf != nullptr, ErrorCode::Io, "fftw_malloc failed");
  fftw_plan plan;
  {
    // FFTW_ESTIMATE does not touch the buffer while planning.
    std::lock_guard lock(detail::fftw_planner_mutex());
    plan = fftw_plan_dft_1d(static_cast<int>(samples), buf, buf, FFTW_BACKWARD, FFTW_ESTIMATE);
  }
  for (std::size_t j = 0; j < samples; ++j) {
    buf[j][0] = phi(x0 + dx * static_cast<double>(j));
    buf[j][1] = 0.0;
  }
  fftw_execute(plan);

  // sum_j phi(x_j) e^{i k_m x_j} = e^{i k_m x0} * sum_j phi(x_j) e^{2 pi i m j / N}
  const auto half = static_cast<std::ptrdiff_t>(samples / 2);
  g.k.resize(samples);
  g.values.resize(samples);
  for (std::ptrdiff_t m = -half; m < half; ++m) {
    const std::size_t idx = static_cast<std::size_t>(m < 0 ? m + static_cast<std::ptrdiff_t>(samples) : m);
    const std::size_t out = static_cast<std::size_t>(m + half);
    const double km = g.dk * static_cast<double>(m);
    const complex raw(buf[idx][0], buf[idx][1]);
    g.k[out] = km;
    g.values[out] = std::polar(dx / (2.0 * pi), km * x0) * raw;
  }
  {
    std::lock_guard lock(detail::fftw_planner_mutex());
    fftw_destroy_plan(plan);
  }
  fftw_free(buf);
  return g;
}

namespace detail {

inline double sobolev_weight(double k, double s) { return std::pow(1.0 + 2.0 * std::abs(k), 2.0 * s); }

/// 2 int_0^inf of the even integrand by the trapezoid rule on the FFT grid,
/// with the Euler-Maclaurin end correction for the kink of (1 + 2|k|)^{2s}
/// at k = 0.
inline double grid_norm_sq(const FourierGrid& g, double s) {
  const std::size_t zero = g.samples / 2;
  const std::size_t count = g.samples / 2;  // k_0 .. k_{N/2-1}
  std::vector<double> f(count);
  for (std::size_t m = 0; m < count; ++m) {
    const double mag = m == 0 ? std::norm(g.values[zero])
                              : 0.5 * (std::norm(g.values[zero + m]) + std::norm(g.values[zero - m]));
    f[m] = sobolev_weight(g.k[zero + m], s) * mag;
  }
  const double h = g.dk;
  const double slope0 = (-3.0 * f[0] + 4.0 * f[1] - f[2]) / (2.0 * h);
  std::vector<double> terms(f);
  terms[0] *= 0.5;
  return 2.0 * (h * pairwise_sum(terms) + h * h / 12.0 * slope0);
}

}  // namespace detail

/// ||phi||_s^2 from the closed-form transform, 2 int_0^inf (1+2k)^{2s} |phi^(k)|^2 dk
/// (|phi^| is even for real phi).
inline double sobolev_norm_sq(const TestFunction& phi, double s) {
  require(s > 0.0, ErrorCode::InvalidArgument, "Sobolev index s must be > 0");
  if (phi.is_zero()) return 0.0;
  require(phi.has_fourier(), ErrorCode::NotInHs,
          phi.name() + " is not in H_s; use the polynomial-specific Monte Carlo paths");
  auto integrand = [&](double k) {
    const double mag = std::norm(phi.fourier(k));
    return mag == 0.0 ? 0.0 : detail::sobolev_weight(k, s) * mag;
  };
  boost::math::quadrature::exp_sinh<double> integrator;
  double err = 0.0, l1 = 0.0;
  const double v = integrator.integrate(integrand, 0.0, std::numeric_limits<double>::infinity(), 1e-12, &err, &l1);
  if (!(err <= 1e-8 * std::max(l1, 1e-300))) throw AccuracyError("H_s norm quadrature did not converge", 2.0 * v, err);
  return 2.0 * v;
}

inline double sobolev_norm(const TestFunction& phi, double s) { return std::sqrt(sobolev_norm_sq(phi, s)); }

struct SobolevGridReport {
  double norm = 0.0;
  double half_width = 0.0;
  std::size_t samples = 0;
  double dk = 0.0;
  double discretization_error = 0.0;  // |norm^2 at N - norm^2 at N/2|
};

/// ||phi||_s from the FFT grid, with the change against a half-size grid on
/// the same window reported as the discretization error of ||phi||_s^2.
inline SobolevGridReport sobolev_norm_grid(const TestFunction& phi, double s,
                                           std::size_t samples = std::size_t{1} << 14) {
  require(s > 0.0, ErrorCode::InvalidArgument, "Sobolev index s must be > 0");
  SobolevGridReport r;
  r.samples = samples;
  if (phi.is_zero()) return r;
  require(phi.has_fourier(), ErrorCode::NotInHs,
          phi.name() + " is not in H_s; use the polynomial-specific Monte Carlo paths");
  const FourierGrid fine = fourier_grid(phi, samples);
  const FourierGrid coarse = fourier_grid(phi, samples / 2);
  const double v = detail::grid_norm_sq(fine, s);
  r.norm = std::sqrt(v);
  r.half_width = fine.half_width;
  r.dk = fine.dk;
  r.discretization_error = std::abs(v - detail::grid_norm_sq(coarse, s));
  return r;
}

/// Gamma(2s)^{-1} int_0^inf e^{-y} y^{2s-1} P_{2y}(lambda - mu) dy, the x
/// integral of P_y(x - lambda) P_y(x - mu) having been collapsed to P_{2y}.
inline double ds_kernel(double lambda, double mu, double s) {
  require(s > 0.0, ErrorCode::InvalidArgument, "s must be > 0");
  const double d = lambda - mu;
  require(d != 0.0 || s > 0.5, ErrorCode::Domain, "D_s kernel diverges on the diagonal for s <= 1/2");
  const double d2 = d * d;
  const double log_gamma = std::lgamma(2.0 * s);
  auto integrand = [&](double y) {
    if (y <= 0.0 || !std::isfinite(y)) return 0.0;
    const double ratio = d2 == 0.0 ? 0.0 : d2 / (y * y);
    // e^{-y} y^{2s-1} 2y / (pi (d^2 + 4 y^2)) / Gamma(2s), arranged to stay finite as y -> 0
    return 2.0 * std::exp(-y + (2.0 * s - 2.0) * std::log(y) - log_gamma) / (pi * (ratio + 4.0));
  };
  boost::math::quadrature::exp_sinh<double> integrator;
  double err = 0.0, l1 = 0.0;
  const double v = integrator.integrate(integrand, 0.0, std::numeric_limits<double>::infinity(), 1e-12, &err, &l1);
  if (!(err <= 1e-8 * std::max(l1, 1e-300))) throw AccuracyError("D_s kernel quadrature did not converge", v, err);
  return v;
}

}  // namespace rmtclt
