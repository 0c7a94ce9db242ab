#pragma once

// Gamma family and the Gauss hypergeometric function on the real line.

namespace mixlap {

double gamma(double t);
double log_abs_gamma(double t);
// 1/Gamma(t); exactly zero at the poles, so ratios containing it stay finite.
double rgamma(double t);
double digamma(double t);

// Arguments of 2F1(a, b; c; z). Constructed values always have c > 0 and z <= 1.
class HypergeometricArgs {
 public:
  HypergeometricArgs(double a, double b, double c, double z);
  double a() const noexcept { return a_; }
  double b() const noexcept { return b_; }
  double c() const noexcept { return c_; }
  double z() const noexcept { return z_; }

 private:
  double a_, b_, c_, z_;
};

double gauss_2f1(const HypergeometricArgs& args);
inline double gauss_2f1(double a, double b, double c, double z) {
  return gauss_2f1(HypergeometricArgs(a, b, c, z));
}

// 2F1(a, b; c; 1 - w) for w in (0, 1]. Passing w instead of z keeps full
// relative accuracy when z is within rounding distance of 1.
double gauss_2f1_complement(double a, double b, double c, double w);

// Behaviour of 2F1 as z -> 1-, keyed by the sign of c - a - b.
enum class LimitRegime {
  kFinite,       // c > a + b: F(1) itself
  kLogarithmic,  // c = a + b: F / (-log(1 - z))
  kAlgebraic,    // c < a + b: F / (1 - z)^(c - a - b)
};

LimitRegime limit_regime(double a, double b, double c);
double limit_constant(LimitRegime regime, double a, double b, double c);

struct OperatorParams;

// Large-r behaviour of -(-Delta)^s psi_beta, in units of the closed-form
// prefactor. Which constant applies depends on beta relative to N.
enum class FarFieldRegime {
  kSubcritical,    // N - 2s < beta < N, decay (1+r^2)^(-s-beta/2)
  kCritical,       // beta = N, extra log(1+r^2)
  kSupercritical,  // beta > N, decay (1+r^2)^(-s-N/2)
};

struct FarFieldConstant {
  FarFieldRegime regime;
  double value;
};

FarFieldRegime far_field_regime(const OperatorParams& params, double beta);
// Throws RegimeError for beta <= N - 2s.
FarFieldConstant far_field_constant(const OperatorParams& params, double beta);

const char* to_string(LimitRegime r);
const char* to_string(FarFieldRegime r);

}  // namespace mixlap
