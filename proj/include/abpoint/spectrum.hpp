#pragma once

// Discrete spectrum of the point-interaction family: counting rules, root
// search on the spectral condition, eigenvector coefficients, radial profiles
// and the Krein determinant in the unitary chart.
//
// Energies are E = -p^2 (hbar = 2m = 1). The spectral condition
//
//   F(p) = ((p/2)^{2a-2} + G(a)/G(2-a) u) ((p/2)^{-2a} + G(1-a)/G(1+a) v) = |w|^2
//
// is solved in the rescaled form (p/2)^2 (F(p) - |w|^2) = 0, which expands to
//
//   1 + c1 s^{2-2a} + c2 s^{2a} + c3 s^2,   s = p/2,
//
// with c3 = det(Lambda) / (a (1 - a)). Working with the expanded form keeps the
// sign at large p exact on the det(Lambda) = 0 boundary.

#include <algorithm>
#include <cmath>
#include <concepts>
#include <optional>
#include <utility>
#include <vector>

#include <Eigen/SVD>

#include "abpoint/errors.hpp"
#include "abpoint/params.hpp"
#include "abpoint/specfun.hpp"
#include "abpoint/types.hpp"

namespace abpoint {

inline constexpr double kDoubleRootTolerance = 1e-10;
inline constexpr double kNullSpaceRatio = 1e-6;
// det(Lambda) is treated as zero below this fraction of |uv| + a(1-a)|w|^2.
inline constexpr double kDeterminantTolerance = 1e-12;

template <std::floating_point Real>
struct BoundState {
  Real p{};
  Real energy{};
  Complex<Real> xi{};
  Complex<Real> eta{};
  int multiplicity{1};
};

template <std::floating_point Real>
struct SpectrumReport {
  // Number of eigenvalues counted with multiplicity.
  int count{0};
  std::vector<BoundState<Real>> states;
};

namespace detail {

// det(Lambda) with cancellation noise between uv and a(1-a)|w|^2 snapped to zero,
// so that counting and root search agree on the det(Lambda) = 0 boundary.
template <std::floating_point Real>
Real effective_determinant(const Flux<Real>& flux, const LambdaParams<Real>& lam) {
  const Real a = flux.alpha();
  const Real det = lambda_determinant(flux, lam);
  const Real magnitude = std::fabs(lam.u * lam.v) + a * (1 - a) * std::norm(lam.w);
  return std::fabs(det) <= Real(kDeterminantTolerance) * magnitude ? Real(0) : det;
}

template <std::floating_point Real>
struct SpectralPolynomial {
  Real c1, c2, c3;      // coefficients of s^{2-2a}, s^{2a}, s^2
  Real e1, e2;          // 2 - 2a, 2a
  Real c3_magnitude;    // |c3| before cancellation between uv and |w|^2

  SpectralPolynomial(const Flux<Real>& flux, const LambdaParams<Real>& lam) {
    const Real a = flux.alpha();
    const Real weight = a * (1 - a);
    c1 = gamma_real(a) / gamma_real(2 - a) * lam.u;
    c2 = gamma_real(1 - a) / gamma_real(1 + a) * lam.v;
    c3 = effective_determinant(flux, lam) / weight;
    c3_magnitude = (std::fabs(lam.u * lam.v) + weight * std::norm(lam.w)) / weight;
    e1 = 2 - 2 * a;
    e2 = 2 * a;
  }

  // Value at t = ln p.
  Real value(Real t) const {
    const Real tau = t - std::log(Real(2));
    return 1 + c1 * std::exp(e1 * tau) + c2 * std::exp(e2 * tau) + c3 * std::exp(2 * tau);
  }

  Real slope(Real t) const {
    const Real tau = t - std::log(Real(2));
    return c1 * e1 * std::exp(e1 * tau) + c2 * e2 * std::exp(e2 * tau) + 2 * c3 * std::exp(2 * tau);
  }

  Real scale(Real t) const {
    const Real tau = t - std::log(Real(2));
    return 1 + std::fabs(c1) * std::exp(e1 * tau) + std::fabs(c2) * std::exp(e2 * tau) +
           c3_magnitude * std::exp(2 * tau);
  }

  // Search interval in ln p: every root sits near a point where two monomials
  // balance, so the window covers all pairwise balance points with margin.
  std::pair<Real, Real> search_window() const {
    Real lo = -30, hi = 30;
    const Real ln2 = std::log(Real(2));
    const std::pair<Real, Real> terms[] = {{Real(0), Real(1)}, {e1, c1}, {e2, c2}, {Real(2), c3}};
    for (int i = 0; i < 4; ++i) {
      for (int j = i + 1; j < 4; ++j) {
        const auto [ei, ci] = terms[i];
        const auto [ej, cj] = terms[j];
        if (ci == 0 || cj == 0 || std::fabs(ei - ej) < Real(1e-3)) continue;
        const Real tau = (std::log(std::fabs(ci)) - std::log(std::fabs(cj))) / (ej - ei);
        lo = std::min(lo, tau + ln2 - 8);
        hi = std::max(hi, tau + ln2 + 8);
      }
    }
    return {std::max(lo, Real(-300)), std::min(hi, Real(300))};
  }
};

template <std::floating_point Real, typename F>
Real bisect_sign_change(F&& f, Real lo, Real hi) {
  Real flo = f(lo);
  for (int it = 0; it < 200; ++it) {
    const Real mid = (lo + hi) / 2;
    if (mid <= lo || mid >= hi) break;
    const Real fm = f(mid);
    if (fm == 0) return mid;
    if ((fm > 0) == (flo > 0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  return (lo + hi) / 2;
}

// Branch (e^{i phi})^nu = e^{i phi nu}, 0 <= phi < 2 pi: (i x)^nu = x^nu e^{i pi nu / 2} for x > 0.
template <std::floating_point Real>
Complex<Real> imaginary_power(Real x, Real nu) {
  return std::pow(x, nu) * std::polar(Real(1), kPi<Real> * nu / 2);
}

}  // namespace detail

/// Left-hand side F(p) of the spectral condition F(p) = |w|^2.
template <std::floating_point Real>
Real spectral_function(const Flux<Real>& flux, const LambdaParams<Real>& lam, Real p) {
  if (!(p > 0)) throw DomainError("spectral_function: p must be positive");
  const Real a = flux.alpha();
  const Real s = p / 2;
  return (std::pow(s, 2 * a - 2) + gamma_real(a) / gamma_real(2 - a) * lam.u) *
         (std::pow(s, -2 * a) + gamma_real(1 - a) / gamma_real(1 + a) * lam.v);
}

// |F(p) - |w|^2| measured against the magnitude of the individual terms.
template <std::floating_point Real>
Real spectral_residual(const Flux<Real>& flux, const LambdaParams<Real>& lam, Real p) {
  if (!(p > 0)) throw DomainError("spectral_residual: p must be positive");
  const detail::SpectralPolynomial<Real> poly(flux, lam);
  const Real t = std::log(p);
  return std::fabs(poly.value(t)) / poly.scale(t);
}

/// Number of negative eigenvalues (with multiplicity): two when u, v < 0 and
/// det Lambda > 0, none when u, v >= 0 and det Lambda >= 0, one otherwise.
/// A det Lambda within rounding of zero (see kDeterminantTolerance) counts as zero.
template <std::floating_point Real>
int count_bound_states(const LambdaParams<Real>& lam, const Flux<Real>& flux) {
  const Real det = detail::effective_determinant(flux, lam);
  if (lam.u < 0 && lam.v < 0 && det > 0) return 2;
  if (lam.u >= 0 && lam.v >= 0 && det >= 0) return 0;
  return 1;
}

/// Roots for alpha = 1/2: p = (u + v +- sqrt(|w|^2 + (u - v)^2)) / (2 (|w|^2/4 - uv)),
/// keeping positive values in ascending order. A double root appears twice.
template <std::floating_point Real>
std::vector<Real> closed_form_half_flux(const LambdaParams<Real>& lam) {
  const Real w2 = std::norm(lam.w);
  const Real den = w2 / 4 - lam.u * lam.v;
  if (std::fabs(den) < Real(1e-12)) {
    throw DegenerateDenominator("closed_form_half_flux: |w|^2/4 - uv vanishes");
  }
  const Real disc = std::sqrt(w2 + (lam.u - lam.v) * (lam.u - lam.v));
  std::vector<Real> roots;
  for (const Real num : {lam.u + lam.v - disc, lam.u + lam.v + disc}) {
    const Real p = num / (2 * den);
    if (p > 0) roots.push_back(p);
  }
  std::sort(roots.begin(), roots.end());
  return roots;
}

/// The boundary-condition matrix I + (ip/2)^D G(1-D) Lambda G(1+D)^{-1} e^{-i pi D} (ip/2)^D
/// acting on the channel coefficients (xi, eta) of a decaying solution.
template <std::floating_point Real>
Matrix2c<Real> bound_state_matrix(const Flux<Real>& flux, const LambdaParams<Real>& lam, Real p) {
  const Vector2r<Real> d = flux.d();
  const Matrix2c<Real> lambda = lambda_matrix(flux, lam);
  Matrix2c<Real> m = Matrix2c<Real>::Identity();
  for (int j = 0; j < 2; ++j) {
    for (int k = 0; k < 2; ++k) {
      const Complex<Real> left = detail::imaginary_power(p / 2, d(j)) * gamma_real(1 - d(j));
      const Complex<Real> right =
          std::polar(Real(1), -kPi<Real> * d(k)) * detail::imaginary_power(p / 2, d(k)) / gamma_real(1 + d(k));
      m(j, k) += left * lambda(j, k) * right;
    }
  }
  return m;
}

/// Null vector (xi, eta) of bound_state_matrix at a root p.
///
/// When the null space is two-dimensional (coinciding roots at w = 0) the unit
/// vector of `channel` is returned. Throws NotAnEigenvalue when the matrix is
/// not singular to within a ratio of 1e-6 between its singular values.
template <std::floating_point Real>
Vector2c<Real> eigen_coefficients(const Flux<Real>& flux, const LambdaParams<Real>& lam, Real p, int channel = 0) {
  if (!(p > 0)) throw DomainError("eigen_coefficients: p must be positive");
  const Matrix2c<Real> m = bound_state_matrix(flux, lam, p);
  const Real scale = 1 + max_abs(m - Matrix2c<Real>::Identity());
  Eigen::JacobiSVD<Matrix2c<Real>> svd(m, Eigen::ComputeFullV);
  const auto sigma = svd.singularValues();
  if (sigma(0) <= Real(kDoubleRootTolerance) * scale) {
    Vector2c<Real> e = Vector2c<Real>::Zero();
    e(channel == 0 ? 0 : 1) = 1;
    return e;
  }
  if (sigma(1) > Real(kNullSpaceRatio) * sigma(0)) {
    throw NotAnEigenvalue("eigen_coefficients: p is not a root of the spectral condition");
  }
  Vector2c<Real> v = svd.matrixV().col(1);
  const int big = std::abs(v(0)) >= std::abs(v(1)) ? 0 : 1;
  v *= std::conj(v(big)) / std::abs(v(big));
  return v;
}

// Squared L^2 norm of xi H_{1-a}(ipr) e^{-i theta} + eta H_a(ipr), from
// int_0^inf K_nu(x)^2 x dx = pi nu / (2 sin pi nu).
template <std::floating_point Real>
Real bound_state_norm2(const Flux<Real>& flux, Real p, Complex<Real> xi, Complex<Real> eta) {
  const Real a = flux.alpha();
  return 4 * ((1 - a) * std::norm(xi) + a * std::norm(eta)) / (p * p * std::sin(kPi<Real> * a));
}

namespace detail {

template <std::floating_point Real>
BoundState<Real> make_state(const Flux<Real>& flux, const LambdaParams<Real>& lam, Real p, int multiplicity) {
  BoundState<Real> st;
  st.p = p;
  st.energy = -p * p;
  st.multiplicity = multiplicity;
  const Vector2c<Real> c = eigen_coefficients(flux, lam, p);
  const Real norm = std::sqrt(bound_state_norm2(flux, p, c(0), c(1)));
  st.xi = c(0) / norm;
  st.eta = c(1) / norm;
  return st;
}

}  // namespace detail

/// All bound states, ascending in p.
///
/// Scans ln p on a uniform grid (at least 600 panels over [-30, 30], widened
/// to cover the scales set by u, v and w), refines sign changes by bisection
/// and, when two roots are expected but no sign change is seen, resolves the
/// tangency by locating the minimum of the spectral polynomial.
template <std::floating_point Real>
SpectrumReport<Real> find_bound_states(const Flux<Real>& flux, const LambdaParams<Real>& lam) {
  SpectrumReport<Real> report;
  const int expected = count_bound_states(lam, flux);
  if (expected == 0) return report;

  const detail::SpectralPolynomial<Real> poly(flux, lam);
  const auto [lo, hi] = poly.search_window();
  const int panels = std::max(600, int(std::ceil(10 * (hi - lo))));
  const Real step = (hi - lo) / panels;
  const auto g = [&](Real t) { return poly.value(t); };

  std::vector<Real> ts(panels + 1), gs(panels + 1);
  for (int i = 0; i <= panels; ++i) {
    ts[i] = lo + i * step;
    gs[i] = g(ts[i]);
  }

  std::vector<Real> roots;
  for (int i = 0; i < panels; ++i) {
    if (gs[i] == 0) {
      // A node landing exactly on a tangency is a double root, not a crossing.
      if (expected == 2 && i > 0 && (gs[i - 1] > 0) == (gs[i + 1] > 0)) {
        report.states.push_back(detail::make_state(flux, lam, std::exp(ts[i]), 2));
        report.count = 2;
        return report;
      }
      roots.push_back(ts[i]);
    } else if (gs[i + 1] != 0 && (gs[i] > 0) != (gs[i + 1] > 0)) {
      roots.push_back(detail::bisect_sign_change(g, ts[i], ts[i + 1]));
    }
  }

  if (expected == 2 && roots.empty()) {
    const int imin = int(std::min_element(gs.begin() + 1, gs.end() - 1) - gs.begin());
    const Real a = ts[imin - 1], b = ts[imin + 1];
    const auto slope = [&](Real t) { return poly.slope(t); };
    const Real tmin = (slope(a) < 0 && slope(b) > 0) ? detail::bisect_sign_change(slope, a, b) : ts[imin];
    const Real gmin = g(tmin);
    if (std::fabs(gmin) / poly.scale(tmin) <= Real(kDoubleRootTolerance)) {
      report.states.push_back(detail::make_state(flux, lam, std::exp(tmin), 2));
      report.count = 2;
      return report;
    }
    if (gmin < 0) {
      roots.push_back(detail::bisect_sign_change(g, a, tmin));
      roots.push_back(detail::bisect_sign_change(g, tmin, b));
    }
  }

  for (const Real t : roots) {
    report.states.push_back(detail::make_state(flux, lam, std::exp(t), 1));
  }
  report.count = int(report.states.size());
  return report;
}

/// Channel amplitudes (xi H_{1-a}(ipr), eta H_a(ipr)) of a bound state at radius r.
template <std::floating_point Real>
Vector2c<Real> eigenfunction_radial(const Flux<Real>& flux, const BoundState<Real>& state, Real r) {
  if (!(r > 0)) throw DomainError("eigenfunction_radial: r must be positive");
  const Real a = flux.alpha();
  const Real x = state.p * r;
  return {state.xi * hankel1_imaginary_axis(Order<Real>(1 - a), x),
          state.eta * hankel1_imaginary_axis(Order<Real>(a), x)};
}

template <std::floating_point Real>
Complex<Real> bound_wavefunction(const Flux<Real>& flux, const BoundState<Real>& state, Real r, Real theta) {
  const Vector2c<Real> c = eigenfunction_radial(flux, state, r);
  return c(0) * std::polar(Real(1), -theta) + c(1);
}

/// p^{2D} (U + 1) - e^{i pi D / 2} U - e^{-i pi D / 2}; its determinant vanishes at bound states of H^U.
template <std::floating_point Real>
Matrix2c<Real> krein_matrix(const Flux<Real>& flux, const UParams<Real>& up, Real p) {
  if (!(p > 0)) throw DomainError("krein_matrix: p must be positive");
  const Vector2r<Real> d = flux.d();
  const Matrix2c<Real> u = u_matrix(up);
  const Matrix2c<Real> id = Matrix2c<Real>::Identity();
  Matrix2c<Real> m;
  for (int j = 0; j < 2; ++j) {
    const Real power = std::pow(p, 2 * d(j));
    const Complex<Real> plus = std::polar(Real(1), kPi<Real> * d(j) / 2);
    const Complex<Real> minus = std::conj(plus);
    for (int k = 0; k < 2; ++k) {
      m(j, k) = power * (u(j, k) + id(j, k)) - plus * u(j, k) - minus * id(j, k);
    }
  }
  return m;
}

template <std::floating_point Real>
Complex<Real> krein_det(const Flux<Real>& flux, const UParams<Real>& up, Real p) {
  return krein_matrix(flux, up, p).determinant();
}

// |det| divided by the product of row norms (Hadamard bound), in [0, 1].
template <std::floating_point Real>
Real krein_det_scaled(const Flux<Real>& flux, const UParams<Real>& up, Real p) {
  const Matrix2c<Real> m = krein_matrix(flux, up, p);
  const Real bound = m.row(0).norm() * m.row(1).norm();
  return bound > 0 ? std::abs(m.determinant()) / bound : Real(0);
}

}  // namespace abpoint
