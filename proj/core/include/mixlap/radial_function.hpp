#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <string>

namespace mixlap {

struct OperatorParams;

using RadialCallable = std::function<double(double)>;

// A radial profile f(|x|) together with its first two radial derivatives
// and a growth exponent theta with |f(r)| <= K (1+r^2)^(theta/2).
//
// Callables must be pure: evaluators call them concurrently.
class RadialFunction {
 public:
  RadialFunction(RadialCallable value, RadialCallable d1, RadialCallable d2, double tail_exponent,
                 std::string name = {});

  // Derivatives by centred differences with a step scaled to (1 + r).
  static RadialFunction from_profile(RadialCallable value, double tail_exponent, std::string name = {});

  static RadialFunction constant(double c);
  // (1+r^2)^(-beta/2) with exact derivatives.
  static RadialFunction weight(double beta);
  // scale * r^(-beta); undefined at the origin.
  static RadialFunction power(double beta, double scale = 1.0);

  double operator()(double r) const { return value_(r); }
  double d1(double r) const { return d1_(r); }
  double d2(double r) const { return d2_(r); }
  // f'' + (N-1)/r f', with the limit N f''(0) at the origin.
  double laplacian(int N, double r) const;

  double tail_exponent() const noexcept { return tail_exponent_; }
  // Membership in the class where (-Delta)^s f is defined: tail_exponent < 2s.
  bool in_fractional_class(double s) const noexcept { return tail_exponent_ < 2.0 * s; }
  void require_fractional_class(const OperatorParams& params) const;

  // Exact K in f(r) ~ K r^theta, when known. Otherwise quadrature estimates
  // it from the value at the truncation radius.
  std::optional<double> tail_coefficient() const noexcept { return tail_coefficient_; }
  RadialFunction& with_tail_coefficient(double K) {
    tail_coefficient_ = K;
    return *this;
  }

  bool singular_at_origin() const noexcept { return singular_at_origin_; }
  RadialFunction& mark_singular_at_origin() {
    singular_at_origin_ = true;
    return *this;
  }

  const std::string& name() const noexcept { return name_; }

 private:
  RadialCallable value_, d1_, d2_;
  double tail_exponent_;
  std::optional<double> tail_coefficient_;
  bool singular_at_origin_ = false;
  std::string name_;
};

RadialFunction operator*(const RadialFunction& f, const RadialFunction& g);
RadialFunction operator+(const RadialFunction& f, const RadialFunction& g);
RadialFunction operator*(double a, const RadialFunction& f);

// The weight psi_beta(r) = (1+r^2)^(-beta/2).
struct WeightSpec {
  double beta;

  explicit WeightSpec(double beta);
  double value(double r) const;
  double d1(double r) const;  // -beta r (1+r^2)^(-beta/2-1)
  double d2(double r) const;  // beta (1+r^2)^(-beta/2-2) ((beta+1) r^2 - 1)
  double laplacian(int N, double r) const;
  RadialFunction function() const { return RadialFunction::weight(beta); }
};

}  // namespace mixlap
