#pragma once

#include <stdexcept>
#include <string>

namespace abpoint {

// Argument outside the domain of a special function or geometric routine.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// Invalid flux or coupling parameters.
class ParameterError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// The boundary condition U has no representative in the Lambda chart (|d| too small).
class NotInvertible : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// The closed-form half-flux roots have a vanishing denominator.
class DegenerateDenominator : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// The boundary-condition matrix is not singular at the requested momentum.
class NotAnEigenvalue : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// The kernel was requested inside the forward cone where only its distributional part lives.
class ForwardDirection : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// Small-r fit did not reach the requested residual.
class FitFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace abpoint
