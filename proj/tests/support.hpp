#pragma once

// Shared random parameter generators for the unit and acceptance suites.

#include <cmath>
#include <random>

#include "abpoint/params.hpp"
#include "abpoint/types.hpp"

namespace abpoint::testing {

class Sampler {
 public:
  explicit Sampler(std::uint64_t seed) : rng_(seed) {}

  double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng_); }

  double log_uniform(double lo, double hi) { return std::exp(uniform(std::log(lo), std::log(hi))); }

  double alpha() { return uniform(0.05, 0.95); }

  // u, v in [-5, 5], |w| <= 5 with uniform phase.
  LambdaParams<double> lambda(double range = 5) {
    LambdaParams<double> lam;
    lam.u = uniform(-range, range);
    lam.v = uniform(-range, range);
    lam.w = std::polar(uniform(0, range), uniform(0, 2 * kPi<double>));
    return lam;
  }

  UParams<double> unitary() {
    return UParams<double>(uniform(0, 2 * kPi<double>), uniform(0, 2 * kPi<double>), uniform(0, 2 * kPi<double>),
                           uniform(0, 1));
  }

  std::mt19937_64& engine() { return rng_; }

 private:
  std::mt19937_64 rng_;
};

inline double relative_error(double got, double want) {
  return std::fabs(got - want) / std::max(std::fabs(want), 1e-300);
}

}  // namespace abpoint::testing
