#pragma once

// Generalized eigenfunctions of the two critical channels and numerical
// extraction of the boundary functionals Phi_1, Phi_2 from small-r samples.
//
// A wavefunction in the domain behaves near the origin as
//
//   (Phi_1^1 r^{-1+a} + Phi_2^1 r^{1-a}) e^{-i theta} + Phi_1^2 r^{-a} + Phi_2^2 r^{a},
//
// and the extension is selected by Phi_1 = Lambda Phi_2.

#include <cmath>
#include <concepts>
#include <limits>
#include <span>
#include <tuple>
#include <vector>

#include <Eigen/QR>

#include "abpoint/errors.hpp"
#include "abpoint/params.hpp"
#include "abpoint/scattering.hpp"
#include "abpoint/specfun.hpp"
#include "abpoint/types.hpp"

namespace abpoint {

inline constexpr double kFitTolerance = 1e-6;

enum class Solution { first = 1, second = 2 };

// Bessel values J_{-1+a}, J_{1-a}, J_{-a}, J_a at kr.
template <std::floating_point Real>
struct ChannelBessel {
  Real minus_one_plus_a, one_minus_a, minus_a, a;

  ChannelBessel(const Flux<Real>& flux, Real x) {
    const Real al = flux.alpha();
    minus_one_plus_a = bessel_j(Order<Real>(al - 1), x);
    one_minus_a = bessel_j(Order<Real>(1 - al), x);
    minus_a = bessel_j(Order<Real>(-al), x);
    a = bessel_j(Order<Real>(al), x);
  }
};

/// b_1 = (xi1 J_{-1+a} + J_{1-a}) e^{-i theta} + eta1 J_{-a},
/// b_2 = xi2 J_{-1+a} e^{-i theta} + eta2 J_{-a} + J_a, all at kr.
template <std::floating_point Real>
Complex<Real> b_solution(const Flux<Real>& flux, const LambdaParams<Real>& lam, Solution which, Real k, Real r,
                         Real theta) {
  if (!(r > 0)) throw DomainError("b_solution: r must be positive");
  const Matrix2c<Real> c = coefficient_matrix(flux, lam, k);
  const ChannelBessel<Real> j(flux, k * r);
  const Complex<Real> rot = std::polar(Real(1), -theta);
  if (which == Solution::first) {
    return (c(0, 0) * j.minus_one_plus_a + j.one_minus_a) * rot + c(1, 0) * j.minus_a;
  }
  return c(0, 1) * j.minus_one_plus_a * rot + c(1, 1) * j.minus_a + j.a;
}

/// Orthonormal generalized eigenfunctions (g_1, g_2) = (b_1, b_2) N(k)^{-1}, expanded entrywise.
template <std::floating_point Real>
Complex<Real> g_solution(const Flux<Real>& flux, const LambdaParams<Real>& lam, Solution which, Real k, Real r,
                         Real theta) {
  if (!(r > 0)) throw DomainError("g_solution: r must be positive");
  const Matrix2c<Real> c = coefficient_matrix(flux, lam, k);
  const Complex<Real> xi1 = c(0, 0), xi2 = c(0, 1), eta1 = c(1, 0), eta2 = c(1, 1);
  const Complex<Real> minor = xi1 * eta2 - xi2 * eta1;
  const Complex<Real> e = std::polar(Real(1), kPi<Real> * flux.alpha());
  const Complex<Real> ec = std::conj(e);
  const Complex<Real> inv_det = Real(1) / det_n(flux, lam, k);
  const ChannelBessel<Real> j(flux, k * r);
  const Complex<Real> rot = std::polar(Real(1), -theta);

  if (which == Solution::first) {
    return inv_det * ((minor + xi1 * e) * j.minus_one_plus_a * rot + (eta2 + e) * j.one_minus_a * rot -
                      eta1 * j.a + eta1 * e * j.minus_a);
  }
  return inv_det * (-xi2 * ec * j.minus_one_plus_a * rot - xi2 * j.one_minus_a * rot + (xi1 - ec) * j.a +
                    (minor - eta2 * ec) * j.minus_a);
}

// Same functions via an explicit 2x2 inverse of N(k).
template <std::floating_point Real>
Complex<Real> g_solution_via_inverse(const Flux<Real>& flux, const LambdaParams<Real>& lam, Solution which, Real k,
                                     Real r, Real theta) {
  const Matrix2c<Real> ninv = n_matrix(flux, lam, k).inverse();
  const Complex<Real> b1 = b_solution(flux, lam, Solution::first, k, r, theta);
  const Complex<Real> b2 = b_solution(flux, lam, Solution::second, k, r, theta);
  const int col = which == Solution::first ? 0 : 1;
  return b1 * ninv(0, col) + b2 * ninv(1, col);
}

// Wavefunction sampled on a polar grid: values(i, j) = psi(radii[i], 2 pi j / theta_count).
template <std::floating_point Real>
struct PolarSamples {
  std::vector<Real> radii;
  int theta_count{0};
  Eigen::Matrix<Complex<Real>, Eigen::Dynamic, Eigen::Dynamic> values;
};

template <std::floating_point Real>
std::vector<Real> log_spaced_radii(Real r_min, Real r_max, int count) {
  std::vector<Real> radii(count);
  const Real step = count > 1 ? std::log(r_max / r_min) / (count - 1) : Real(0);
  for (int i = 0; i < count; ++i) radii[i] = r_min * std::exp(step * i);
  return radii;
}

template <std::floating_point Real, typename Fn>
PolarSamples<Real> sample_polar(Fn&& psi, std::span<const Real> radii, int theta_count) {
  PolarSamples<Real> out;
  out.radii.assign(radii.begin(), radii.end());
  out.theta_count = theta_count;
  out.values.resize(Eigen::Index(radii.size()), theta_count);
  for (std::size_t i = 0; i < radii.size(); ++i) {
    for (int j = 0; j < theta_count; ++j) {
      out.values(Eigen::Index(i), j) = psi(radii[i], 2 * kPi<Real> * j / theta_count);
    }
  }
  return out;
}

template <std::floating_point Real>
struct BoundaryData {
  Vector2c<Real> phi1 = Vector2c<Real>::Zero();  // coefficients of r^{-1+a}, r^{-a}
  Vector2c<Real> phi2 = Vector2c<Real>::Zero();  // coefficients of r^{1-a}, r^{a}
  Real fit_residual{0};
};

namespace detail {

// Frobenius solution r^mu sum_j (-E r^2 / 4)^j / (j! (1 + mu)_j) of the radial
// equation at energy E, normalized to r^mu at the origin.
template <std::floating_point Real>
Real frobenius(Real mu, Real energy, Real r) {
  using Wide = long double;
  const Wide z = -Wide(energy) * Wide(r) * Wide(r) / 4;
  Wide term = 1, sum = 1;
  for (int j = 1; j < 500; ++j) {
    term *= z / (Wide(j) * (Wide(mu) + j));
    sum += term;
    if (std::fabs(term) <= std::numeric_limits<Wide>::epsilon() * std::fabs(sum)) break;
  }
  return Real(std::pow(Wide(r), Wide(mu)) * sum);
}

// Least-squares fit of f(r) = c_minus phi_{-nu}(r) + c_plus phi_{nu}(r) with the
// exact Frobenius solutions at the sample energy; rows are weighted by r^nu so
// both columns stay O(1) as r -> 0. Returns (c_minus, c_plus), the residual
// norm and the norm of the weighted data.
template <std::floating_point Real>
std::tuple<Vector2c<Real>, Real, Real> fit_channel(std::span<const Real> radii,
                                            const Eigen::Matrix<Complex<Real>, Eigen::Dynamic, 1>& f, Real nu,
                                            Real energy) {
  using VectorX = Eigen::Matrix<Complex<Real>, Eigen::Dynamic, 1>;
  using MatrixX = Eigen::Matrix<Complex<Real>, Eigen::Dynamic, Eigen::Dynamic>;
  const Eigen::Index n = Eigen::Index(radii.size());
  MatrixX basis(n, 2);
  VectorX y(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const Real r = radii[std::size_t(i)];
    const Real weight = std::pow(r, nu);
    y(i) = f(i) * weight;
    basis(i, 0) = frobenius(-nu, energy, r) * weight;
    basis(i, 1) = frobenius(nu, energy, r) * weight;
  }
  const VectorX beta = basis.colPivHouseholderQr().solve(y);
  return {Vector2c<Real>(beta(0), beta(1)), (basis * beta - y).norm(), y.norm()};
}

}  // namespace detail

/// Boundary functionals (Phi_1, Phi_2) of a sampled solution at energy E.
///
/// Projects onto the e^{-i theta} and constant angular modes with the
/// trapezoidal rule, then fits each projection against the two Frobenius
/// solutions r^{-nu}(1 + O(r^2)), r^{nu}(1 + O(r^2)) of the radial equation
/// (nu = 1 - a and a respectively). Use E = k^2 for scattering states and
/// E = -p^2 for bound states. Needs at least 8 radii and 64 angles; throws
/// FitFailure when the relative fit residual exceeds 1e-6.
template <std::floating_point Real>
BoundaryData<Real> extract_boundary_data(const Flux<Real>& flux, const PolarSamples<Real>& samples, Real energy) {
  const Eigen::Index nr = Eigen::Index(samples.radii.size());
  if (nr < 8 || samples.theta_count < 64) {
    throw DomainError("extract_boundary_data: need >= 8 radii and >= 64 angles");
  }
  if (samples.values.rows() != nr || samples.values.cols() != samples.theta_count) {
    throw DomainError("extract_boundary_data: sample matrix shape does not match the grid");
  }
  for (const Real r : samples.radii) {
    if (!(r > 0)) throw DomainError("extract_boundary_data: radii must be positive");
  }

  Eigen::Matrix<Complex<Real>, Eigen::Dynamic, 1> rotating(nr), constant(nr);
  for (Eigen::Index i = 0; i < nr; ++i) {
    Complex<Real> acc_rot = 0, acc_const = 0;
    for (int j = 0; j < samples.theta_count; ++j) {
      const Real theta = 2 * kPi<Real> * j / samples.theta_count;
      acc_rot += samples.values(i, j) * std::polar(Real(1), theta);
      acc_const += samples.values(i, j);
    }
    rotating(i) = acc_rot / Real(samples.theta_count);
    constant(i) = acc_const / Real(samples.theta_count);
  }

  const Real a = flux.alpha();
  const std::span<const Real> radii(samples.radii);
  const auto [c1, res1, norm1] = detail::fit_channel<Real>(radii, rotating, 1 - a, energy);
  const auto [c2, res2, norm2] = detail::fit_channel<Real>(radii, constant, a, energy);

  BoundaryData<Real> out;
  out.phi1 = {c1(0), c2(0)};
  out.phi2 = {c1(1), c2(1)};
  // Measured against the larger channel, so a channel that is absent up to
  // rounding does not count as a failed fit.
  const Real scale = std::max(norm1, norm2);
  out.fit_residual = scale > 0 ? std::max(res1, res2) / scale : Real(0);
  if (out.fit_residual > Real(kFitTolerance)) {
    throw FitFailure("extract_boundary_data: small-r fit residual " + std::to_string(double(out.fit_residual)));
  }
  return out;
}

// ||Phi_1 - Lambda Phi_2|| relative to ||Phi_1|| + ||Lambda Phi_2||.
template <std::floating_point Real>
Real boundary_condition_residual(const Flux<Real>& flux, const LambdaParams<Real>& lam,
                                 const BoundaryData<Real>& data) {
  const Vector2c<Real> rhs = lambda_matrix(flux, lam) * data.phi2;
  const Real scale = data.phi1.norm() + rhs.norm();
  return scale > 0 ? (data.phi1 - rhs).norm() / scale : Real(0);
}

}  // namespace abpoint
