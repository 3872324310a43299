#pragma once

// Real-order Gamma and Bessel kernels.
//
// All routines evaluate internally in long double (64-bit mantissa on x86-64)
// and round once to the caller's Real. Orders are restricted to (-1, 2), which
// covers every order the Aharonov-Bohm channels produce (-1+a, -a, a, 1-a)
// plus one step of recurrence in either direction.

#include <algorithm>
#include <cmath>
#include <concepts>
#include <limits>
#include <string>

#include "abpoint/errors.hpp"
#include "abpoint/types.hpp"

namespace abpoint {

template <std::floating_point Real>
struct Order {
  Real nu;

  explicit Order(Real value) : nu(value) {
    if (!(value > Real(-1) && value < Real(2))) {
      throw DomainError("Bessel order must lie in (-1, 2), got " + std::to_string(double(value)));
    }
  }
};

template <std::floating_point Real>
Order(Real) -> Order<Real>;

namespace detail {

using Wide = long double;

inline constexpr Wide kWidePi = 3.141592653589793238462643383279502884L;

// Accumulator for the alternating J series. Its terms grow to ~e^x / x before
// they decay, so the sum is carried in binary128 where the compiler has it.
#if defined(__SIZEOF_FLOAT128__)
using SeriesSum = __float128;
inline constexpr Wide kSeriesEpsilon = 1e-33L;
#else
using SeriesSum = Wide;
inline constexpr Wide kSeriesEpsilon = std::numeric_limits<Wide>::epsilon();
#endif

// J_nu switches from the ascending series to the Hankel expansion here. At
// x = 25 the smallest asymptotic term is ~1e-21, and the series loses ~9
// digits to cancellation, which binary128 absorbs. Without binary128 the
// series stays usable only to x ~ 17, which is where the asymptotic branch
// still reaches ~1e-14.
#if defined(__SIZEOF_FLOAT128__)
inline constexpr Wide kBesselJCrossover = 25.0L;
#else
inline constexpr Wide kBesselJCrossover = 17.0L;
#endif

inline Wide bessel_j_series(Wide nu, Wide x) {
  const Wide half = x / 2;
  const SeriesSum y = SeriesSum(half) * SeriesSum(half);
  const SeriesSum order = nu;
  SeriesSum term = 1;
  SeriesSum sum = 1;
  for (int k = 1; k < 1000; ++k) {
    term *= -y / (SeriesSum(k) * (order + SeriesSum(k)));
    sum += term;
    const SeriesSum mag = term < 0 ? -term : term;
    const SeriesSum total = sum < 0 ? -sum : sum;
    if (Wide(k) > half && mag <= SeriesSum(kSeriesEpsilon) * total) {
      break;
    }
  }
  return std::pow(half, nu) / std::tgamma(nu + 1) * Wide(sum);
}

inline Wide bessel_j_asymptotic(Wide nu, Wide x) {
  const Wide mu = 4 * nu * nu;
  Wide p = 1, q = 0;
  Wide term = 1;
  for (int k = 1; k < 200; ++k) {
    const Wide odd = Wide(2 * k - 1);
    const Wide next = term * (mu - odd * odd) / (Wide(k) * 8 * x);
    if (next == 0) {
      break;  // half-integer order: the expansion terminates
    }
    if (std::fabs(next) >= std::fabs(term)) {
      break;  // past the smallest term of the divergent series
    }
    term = next;
    const int quarter = k / 2;
    const Wide sign = (quarter % 2 == 0) ? 1 : -1;
    if (k % 2 == 0) {
      p += sign * term;
    } else {
      q += sign * term;
    }
    if (std::fabs(term) < std::numeric_limits<Wide>::epsilon()) {
      break;
    }
  }
  const Wide chi = x - (nu / 2 + 0.25L) * kWidePi;
  return std::sqrt(2 / (kWidePi * x)) * (p * std::cos(chi) - q * std::sin(chi));
}

// Trapezoidal rule on K_nu(x) = int_0^inf exp(-x cosh t) cosh(nu t) dt. The
// integrand is entire and decays doubly exponentially, so the rule converges
// geometrically in 1/h and every term is positive (no cancellation at any x).
// The discretization error behaves like exp(-2 pi^2 / (h^2 x)) once the peak
// narrows, so the step shrinks as 1/sqrt(x) for large x.
inline Wide bessel_k_integral(Wide nu, Wide x) {
  const Wide h = std::min(1.0L / 8, 0.6L / std::sqrt(x));
  const Wide peak = std::asinh(std::fabs(nu) / x);
  Wide sum = std::exp(-x) / 2;
  for (int n = 1; n < 100000; ++n) {
    const Wide t = n * h;
    const Wide f = std::exp(-x * std::cosh(t)) * std::cosh(nu * t);
    sum += f;
    if (t > peak && f <= std::numeric_limits<Wide>::epsilon() * sum * 1e-2L) {
      break;
    }
  }
  return h * sum;
}

}  // namespace detail

// Gamma on (0, 3), the only range the flux-dependent prefactors need.
template <std::floating_point Real>
Real gamma_real(Real x) {
  if (!(x > Real(0) && x < Real(3))) {
    throw DomainError("gamma_real: argument must lie in (0, 3), got " + std::to_string(double(x)));
  }
  return Real(std::tgamma(detail::Wide(x)));
}

/// Bessel function of the first kind J_nu(x) for real order nu in (-1, 2) and x > 0.
///
/// Ascending power series below the crossover (x = 25), Hankel asymptotic expansion above.
template <std::floating_point Real>
Real bessel_j(Order<Real> order, Real x) {
  if (!(x > Real(0))) {
    throw DomainError("bessel_j: argument must be positive");
  }
  const detail::Wide nu = order.nu;
  const detail::Wide xw = x;
  if (xw < detail::kBesselJCrossover) {
    return Real(detail::bessel_j_series(nu, xw));
  }
  return Real(detail::bessel_j_asymptotic(nu, xw));
}

/// Modified Bessel function of the second kind K_nu(x), x > 0.
template <std::floating_point Real>
Real bessel_k(Order<Real> order, Real x) {
  if (!(x > Real(0))) {
    throw DomainError("bessel_k: argument must be positive");
  }
  return Real(detail::bessel_k_integral(order.nu, x));
}

// H^(1)_nu(i y) for y > 0, via H^(1)_nu(z) = (2 / (pi i)) e^{-i pi nu / 2} K_nu(-i z).
template <std::floating_point Real>
Complex<Real> hankel1_imaginary_axis(Order<Real> order, Real y) {
  const Real k = bessel_k(order, y);
  const Complex<Real> phase = std::polar(Real(1), -kPi<Real> * order.nu / 2);
  return Complex<Real>(0, -2 / kPi<Real>) * phase * k;
}

}  // namespace abpoint
