#pragma once

namespace mixlap {

// Dimension, fractional order and the normalising constant of (-Delta)^s.
struct OperatorParams {
  int N = 3;
  double s = 0.25;
  double C_Ns = 0.0;

  // Validates N >= 1, 0 < s < 1 and fills C_Ns from the closed formula.
  static OperatorParams make(int N, double s);
};

// C_{N,s} = 2^(2s-1) 2s Gamma((N+2s)/2) / (pi^(N/2) Gamma(1-s))
double fraclap_normalization(int N, double s);

// Surface measure of the unit sphere S^(N-1); equals 2 for N = 1.
double sphere_area(int N);

}  // namespace mixlap
