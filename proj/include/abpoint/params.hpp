#pragma once

// Parameter space of the point-interaction family: the flux, the Lambda chart
// (u, v, w) and the unitary chart (omega, a, b, q) of the boundary condition.

#include <cmath>
#include <concepts>
#include <string>

#include "abpoint/errors.hpp"
#include "abpoint/specfun.hpp"
#include "abpoint/types.hpp"

namespace abpoint {

inline constexpr double kFluxMargin = 1e-6;
inline constexpr double kChartTolerance = 1e-10;

/// Flux alpha in [eps, 1 - eps], together with D = diag(1 - alpha, alpha).
template <std::floating_point Real>
class Flux {
 public:
  explicit Flux(Real alpha) : alpha_(alpha) {
    if (!(alpha >= Real(kFluxMargin) && alpha <= Real(1) - Real(kFluxMargin))) {
      throw ParameterError("flux alpha must lie in [1e-6, 1 - 1e-6], got " + std::to_string(double(alpha)));
    }
  }

  Real alpha() const { return alpha_; }

  // Diagonal of D; entry 0 belongs to the m = -1 channel.
  Vector2r<Real> d() const { return {Real(1) - alpha_, alpha_}; }

 private:
  Real alpha_;
};

template <std::floating_point Real>
Flux(Real) -> Flux<Real>;

template <std::floating_point Real>
struct LambdaParams {
  Real u{0};
  Real v{0};
  Complex<Real> w{0, 0};
};

// Unitary chart. Angles are reduced into [0, 2 pi) on construction.
template <std::floating_point Real>
class UParams {
 public:
  UParams(Real omega, Real a, Real b, Real q)
      : omega_(wrap(omega)), a_(wrap(a)), b_(wrap(b)), q_(q) {
    if (!(q >= Real(0) && q <= Real(1))) {
      throw ParameterError("q must lie in [0, 1], got " + std::to_string(double(q)));
    }
    if (!std::isfinite(omega) || !std::isfinite(a) || !std::isfinite(b)) {
      throw ParameterError("U-chart angles must be finite");
    }
  }

  Real omega() const { return omega_; }
  Real a() const { return a_; }
  Real b() const { return b_; }
  Real q() const { return q_; }

 private:
  static Real wrap(Real angle) {
    Real r = std::fmod(angle, 2 * kPi<Real>);
    if (r < 0) r += 2 * kPi<Real>;
    if (r >= 2 * kPi<Real>) r = 0;
    return r;
  }

  Real omega_, a_, b_, q_;
};

/// Lambda = [[u, alpha conj(w)], [(1 - alpha) w, v]]; satisfies D Lambda = Lambda^* D.
template <std::floating_point Real>
Matrix2c<Real> lambda_matrix(const Flux<Real>& flux, const LambdaParams<Real>& lam) {
  const Real alpha = flux.alpha();
  Matrix2c<Real> m;
  m << Complex<Real>(lam.u), alpha * std::conj(lam.w),
       (1 - alpha) * lam.w, Complex<Real>(lam.v);
  return m;
}

// det Lambda = uv - alpha (1 - alpha) |w|^2.
template <std::floating_point Real>
Real lambda_determinant(const Flux<Real>& flux, const LambdaParams<Real>& lam) {
  const Real alpha = flux.alpha();
  return lam.u * lam.v - alpha * (1 - alpha) * std::norm(lam.w);
}

template <std::floating_point Real>
Matrix2c<Real> u_matrix(const UParams<Real>& up) {
  const Real q = up.q();
  const Real s = std::sqrt(std::max(Real(0), 1 - q * q));
  Matrix2c<Real> m;
  m << q * std::polar(Real(1), up.a()), -s * std::polar(Real(1), -up.b()),
       s * std::polar(Real(1), up.b()), q * std::polar(Real(1), -up.a());
  return std::polar(Real(1), up.omega()) * m;
}

/// d = sin(omega) + q sin(a - pi alpha); the Lambda chart covers U exactly when d != 0.
template <std::floating_point Real>
Real d_invariant(const Flux<Real>& flux, const UParams<Real>& up) {
  return std::sin(up.omega()) + up.q() * std::sin(up.a() - kPi<Real> * flux.alpha());
}

/// Closed-form map from the unitary chart to (u, v, w).
///
/// Throws NotInvertible when |d| <= 1e-10.
template <std::floating_point Real>
LambdaParams<Real> u_to_lambda(const Flux<Real>& flux, const UParams<Real>& up) {
  const Real d = d_invariant(flux, up);
  if (!(std::fabs(d) > Real(kChartTolerance))) {
    throw NotInvertible("boundary condition is outside the Lambda chart (|d| = " +
                        std::to_string(double(std::fabs(d))) + ")");
  }
  const Real alpha = flux.alpha();
  const Real pi = kPi<Real>;
  const Real q = up.q();
  const Real half = pi * alpha / 2;

  LambdaParams<Real> lam;
  lam.u = std::pow(Real(2), 2 - 2 * alpha) * gamma_real(2 - alpha) / gamma_real(alpha) *
          (std::cos(up.omega() + half) + q * std::cos(up.a() - half)) / d;
  lam.v = -std::pow(Real(2), 2 * alpha) * gamma_real(1 + alpha) / gamma_real(1 - alpha) *
          (std::sin(up.omega() - half) + q * std::sin(up.a() - half)) / d;
  const Real modulus = std::sqrt(std::max(Real(0), 2 * (1 - q * q) * std::sin(pi * alpha)));
  lam.w = (modulus / d) * std::polar(Real(1), up.b() - half - pi / 4);
  return lam;
}

}  // namespace abpoint
