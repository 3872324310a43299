#pragma once

// Scattering in the two critical channels m = -1, 0: the coefficient matrix of
// the generalized eigenfunctions, N(k), det N(k), the wave-operator factors
// Omega_+/-, the channel S-matrix Sigma(k) and the full angular kernel.

#include <cmath>
#include <concepts>

#include "abpoint/errors.hpp"
#include "abpoint/params.hpp"
#include "abpoint/specfun.hpp"
#include "abpoint/types.hpp"

namespace abpoint {

// Library-level exclusion of the forward direction, on |sin((theta - theta0) / 2)|.
inline constexpr double kForwardCone = 1e-8;

template <std::floating_point Real>
struct ChannelMatrix {
  Real k{};
  Matrix2c<Real> entries = Matrix2c<Real>::Zero();
};

template <std::floating_point Real>
struct KernelSample {
  Real k{};
  Real theta{};
  Real theta0{};
  Complex<Real> value{};         // smooth part of S(k; theta, theta0)
  Real delta_coefficient{};      // weight of delta(theta - theta0), cos(pi alpha)
};

namespace detail {

template <std::floating_point Real>
struct ChannelTerms {
  Real quadratic;  // (uv / a(1-a) - |w|^2) k^2 / 4
  Real first;      // u G(a) k^{2-2a} / (2^{2-2a} G(2-a))
  Real second;     // v G(1-a) k^{2a} / (2^{2a} G(1+a))

  ChannelTerms(const Flux<Real>& flux, const LambdaParams<Real>& lam, Real k) {
    const Real a = flux.alpha();
    const Real s = k / 2;
    quadratic = lambda_determinant(flux, lam) / (a * (1 - a)) * s * s;
    first = lam.u * gamma_real(a) / gamma_real(2 - a) * std::pow(s, 2 - 2 * a);
    second = lam.v * gamma_real(1 - a) / gamma_real(1 + a) * std::pow(s, 2 * a);
  }
};

template <std::floating_point Real>
void require_positive_k(Real k) {
  if (!(k > 0)) throw DomainError("momentum k must be positive");
}

}  // namespace detail

/// [[xi1, xi2], [eta1, eta2]] = (k/2)^D G(1-D) Lambda G(1+D)^{-1} (k/2)^D.
template <std::floating_point Real>
Matrix2c<Real> coefficient_matrix(const Flux<Real>& flux, const LambdaParams<Real>& lam, Real k) {
  detail::require_positive_k(k);
  const Real a = flux.alpha();
  const Real s = k / 2;
  Matrix2c<Real> c;
  c << lam.u * gamma_real(a) / gamma_real(2 - a) * std::pow(s, 2 - 2 * a), std::conj(lam.w) * s,
       lam.w * s, lam.v * gamma_real(1 - a) / gamma_real(1 + a) * std::pow(s, 2 * a);
  return c;
}

// N(k) = coefficient_matrix + exp(i pi D).
template <std::floating_point Real>
Matrix2c<Real> n_matrix(const Flux<Real>& flux, const LambdaParams<Real>& lam, Real k) {
  const Vector2r<Real> d = flux.d();
  Matrix2c<Real> n = coefficient_matrix(flux, lam, k);
  n(0, 0) += std::polar(Real(1), kPi<Real> * d(0));
  n(1, 1) += std::polar(Real(1), kPi<Real> * d(1));
  return n;
}

// N~(k) = coefficient_matrix + exp(-i pi D).
template <std::floating_point Real>
Matrix2c<Real> n_tilde_matrix(const Flux<Real>& flux, const LambdaParams<Real>& lam, Real k) {
  const Vector2r<Real> d = flux.d();
  Matrix2c<Real> n = coefficient_matrix(flux, lam, k);
  n(0, 0) += std::polar(Real(1), -kPi<Real> * d(0));
  n(1, 1) += std::polar(Real(1), -kPi<Real> * d(1));
  return n;
}

/// Closed form of det N(k); never vanishes for k >= 0.
template <std::floating_point Real>
Complex<Real> det_n(const Flux<Real>& flux, const LambdaParams<Real>& lam, Real k) {
  detail::require_positive_k(k);
  const detail::ChannelTerms<Real> t(flux, lam, k);
  const Real pa = kPi<Real> * flux.alpha();
  return t.quadratic + t.first * std::polar(Real(1), pa) - t.second * std::polar(Real(1), -pa) - Real(1);
}

// det N continued to k = i p with the branch (i p)^nu = p^nu e^{i pi nu / 2}.
// Equals minus (p/2)^2 (F(p) - |w|^2), so it vanishes at every bound state.
template <std::floating_point Real>
Complex<Real> det_n_imaginary(const Flux<Real>& flux, const LambdaParams<Real>& lam, Real p) {
  detail::require_positive_k(p);
  const Real a = flux.alpha();
  const detail::ChannelTerms<Real> t(flux, lam, p);
  const Real pa = kPi<Real> * a;
  const Complex<Real> first = t.first * std::polar(Real(1), kPi<Real> * (1 - a));  // k^{2-2a}
  const Complex<Real> second = t.second * std::polar(Real(1), pa);                  // k^{2a}
  return -t.quadratic + first * std::polar(Real(1), pa) - second * std::polar(Real(1), -pa) - Real(1);
}

/// Omega_-(k) = diag(-e^{-i pi a / 2}, e^{i pi a / 2}), independent of k.
template <std::floating_point Real>
Matrix2c<Real> omega_minus(const Flux<Real>& flux) {
  const Real half = kPi<Real> * flux.alpha() / 2;
  Matrix2c<Real> m = Matrix2c<Real>::Zero();
  m(0, 0) = -std::polar(Real(1), -half);
  m(1, 1) = std::polar(Real(1), half);
  return m;
}

/// Omega_+(k), the inverse of diag(-e^{-i pi a / 2}, e^{i pi a / 2}) N~(k) N(k)^{-1}.
template <std::floating_point Real>
Matrix2c<Real> omega_plus(const Flux<Real>& flux, const LambdaParams<Real>& lam, Real k) {
  const Matrix2c<Real> inverse = omega_minus(flux) * n_tilde_matrix(flux, lam, k) * n_matrix(flux, lam, k).inverse();
  return inverse.inverse();
}

/// Channel S-matrix Sigma(k) from its explicit entries.
template <std::floating_point Real>
ChannelMatrix<Real> sigma(const Flux<Real>& flux, const LambdaParams<Real>& lam, Real k) {
  detail::require_positive_k(k);
  const detail::ChannelTerms<Real> t(flux, lam, k);
  const Real pa = kPi<Real> * flux.alpha();
  const Complex<Real> e = std::polar(Real(1), pa);
  const Complex<Real> inv_det = Real(1) / det_n(flux, lam, k);
  const Complex<Real> off = -kI<Real> * std::sin(pa) * k * inv_det;

  ChannelMatrix<Real> out;
  out.k = k;
  out.entries(0, 0) = inv_det * (std::conj(e) * t.quadratic + t.first - t.second - e);
  out.entries(0, 1) = off * std::conj(lam.w);
  out.entries(1, 0) = off * lam.w;
  out.entries(1, 1) = inv_det * (e * t.quadratic + t.first - t.second - std::conj(e));
  return out;
}

// Sigma = Omega_+^* Omega_-, assembled from the wave-operator factors.
template <std::floating_point Real>
Matrix2c<Real> sigma_from_wave_operators(const Flux<Real>& flux, const LambdaParams<Real>& lam, Real k) {
  return omega_plus(flux, lam, k).adjoint() * omega_minus(flux);
}

// Conserved angular momentum (w = 0): Sigma is diagonal.
template <std::floating_point Real>
Matrix2c<Real> sigma_conserved(const Flux<Real>& flux, Real u, Real v, Real k) {
  detail::require_positive_k(k);
  const Real a = flux.alpha();
  const Complex<Real> e = std::polar(Real(1), kPi<Real> * a);
  const Real s = k / 2;
  const Real x = u * gamma_real(a) * std::pow(s, 2 - 2 * a);
  const Real y = v * gamma_real(1 - a) * std::pow(s, 2 * a);
  const Real g2 = gamma_real(2 - a), g1 = gamma_real(1 + a);
  Matrix2c<Real> m = Matrix2c<Real>::Zero();
  m(0, 0) = (x - e * g2) / (e * x - g2);
  m(1, 1) = (y + std::conj(e) * g1) / (std::conj(e) * y + g1);
  return m;
}

// Maximal non-conservation (u = v = 0).
template <std::floating_point Real>
Matrix2c<Real> sigma_pure_coupling(const Flux<Real>& flux, Complex<Real> w, Real k) {
  detail::require_positive_k(k);
  const Real a = flux.alpha();
  const Complex<Real> e = std::polar(Real(1), kPi<Real> * a);
  const Real q = std::norm(w) * k * k / 4;
  const Complex<Real> off = kI<Real> * std::sin(kPi<Real> * a) * k;
  Matrix2c<Real> m;
  m << std::conj(e) * q + e, off * std::conj(w),
       off * w, e * q + std::conj(e);
  return m / (q + 1);
}

// Half flux (alpha = 1/2).
template <std::floating_point Real>
Matrix2c<Real> sigma_half_flux(const LambdaParams<Real>& lam, Real k) {
  detail::require_positive_k(k);
  const Complex<Real> i = kI<Real>;
  const Real c = lam.u * lam.v - std::norm(lam.w) / 4;
  const Complex<Real> q = Real(-1) + c * k * k + i * (lam.u + lam.v) * k;
  Matrix2c<Real> m;
  m << -i - i * c * k * k + (lam.u - lam.v) * k, -i * std::conj(lam.w) * k,
       -i * lam.w * k, i + i * c * k * k + (lam.u - lam.v) * k;
  return m / q;
}

// Pure A-B phase shift of channel m: (|m| - |m + a|) pi / 2.
template <std::floating_point Real>
Real pure_ab_phase_shift(int m, const Flux<Real>& flux) {
  return (std::fabs(Real(m)) - std::fabs(Real(m) + flux.alpha())) * kPi<Real> / 2;
}

/// Angular scattering kernel S(k; theta, theta0), smooth part plus the separate delta weight.
///
/// Throws ForwardDirection when |sin((theta - theta0) / 2)| <= 1e-8.
template <std::floating_point Real>
KernelSample<Real> kernel(const Flux<Real>& flux, const LambdaParams<Real>& lam, Real k, Real theta, Real theta0) {
  const Real half = (theta - theta0) / 2;
  const Real sin_half = std::sin(half);
  if (!(std::fabs(sin_half) > Real(kForwardCone))) {
    throw ForwardDirection("kernel: theta is inside the forward cone around theta0");
  }
  const Real a = flux.alpha();
  const Real pa = kPi<Real> * a;
  const Real inv2pi = 1 / (2 * kPi<Real>);
  const Matrix2c<Real> s = sigma(flux, lam, k).entries;

  Complex<Real> value = inv2pi * std::sin(pa) * std::polar(Real(1), -half) / sin_half;
  for (int m = -1; m <= 0; ++m) {
    for (int n = -1; n <= 0; ++n) {
      Complex<Real> entry = s(m + 1, n + 1);
      if (m == n) entry -= std::polar(Real(1), -(2 * m + 1) * pa);
      value += inv2pi * entry * std::polar(Real(1), m * theta - n * theta0);
    }
  }
  return {k, theta, theta0, value, std::cos(pa)};
}

/// d sigma / d theta = (2 pi / k) |S(k; theta, theta0)|^2 (smooth part only).
template <std::floating_point Real>
Real cross_section(const Flux<Real>& flux, const LambdaParams<Real>& lam, Real k, Real theta, Real theta0) {
  const KernelSample<Real> sample = kernel(flux, lam, k, theta, theta0);
  return 2 * kPi<Real> / k * std::norm(sample.value);
}

}  // namespace abpoint
