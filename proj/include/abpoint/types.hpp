#pragma once

#include <complex>
#include <concepts>

#include <Eigen/Dense>

namespace abpoint {

template <std::floating_point Real>
using Complex = std::complex<Real>;

// Channel-space types: index 0 is the m = -1 sector, index 1 the m = 0 sector.
template <std::floating_point Real>
using Matrix2c = Eigen::Matrix<Complex<Real>, 2, 2>;

template <std::floating_point Real>
using Vector2c = Eigen::Matrix<Complex<Real>, 2, 1>;

template <std::floating_point Real>
using Vector2r = Eigen::Matrix<Real, 2, 1>;

template <std::floating_point Real>
inline constexpr Real kPi = Real(3.141592653589793238462643383279502884L);

template <std::floating_point Real>
inline constexpr Complex<Real> kI{Real(0), Real(1)};

// Largest absolute entry; the infinity norm used for all matrix comparisons.
template <typename Derived>
auto max_abs(const Eigen::MatrixBase<Derived>& m) {
  return m.cwiseAbs().maxCoeff();
}

// max |A* A - I|.
template <typename Derived>
auto unitarity_deficit(const Eigen::MatrixBase<Derived>& m) {
  using Plain = typename Derived::PlainObject;
  return max_abs(m.adjoint() * m - Plain::Identity(m.rows(), m.cols()));
}

}  // namespace abpoint
