#include "mixlap/operator_params.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "mixlap/errors.hpp"
#include "mixlap/special_functions.hpp"

namespace mixlap {

double fraclap_normalization(int N, double s) {
  const double n = N;
  return std::pow(2.0, 2.0 * s - 1.0) * 2.0 * s * gamma(0.5 * (n + 2.0 * s)) /
         (std::pow(std::numbers::pi, 0.5 * n) * gamma(1.0 - s));
}

double sphere_area(int N) {
  const double n = N;
  return 2.0 * std::pow(std::numbers::pi, 0.5 * n) / gamma(0.5 * n);
}

OperatorParams OperatorParams::make(int N, double s) {
  if (N < 1) throw DomainError("dimension N must be >= 1, got " + std::to_string(N));
  if (!(s > 0.0 && s < 1.0))
    throw DomainError("fractional order s must lie in (0,1), got " + std::to_string(s));
  return OperatorParams{N, s, fraclap_normalization(N, s)};
}

}  // namespace mixlap
