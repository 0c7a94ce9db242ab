#include "mixlap/radial_function.hpp"

#include <cmath>
#include <string>
#include <utility>

#include "mixlap/errors.hpp"
#include "mixlap/operator_params.hpp"

namespace mixlap {

RadialFunction::RadialFunction(RadialCallable value, RadialCallable d1, RadialCallable d2, double tail_exponent,
                               std::string name)
    : value_(std::move(value)),
      d1_(std::move(d1)),
      d2_(std::move(d2)),
      tail_exponent_(tail_exponent),
      name_(std::move(name)) {
  if (!value_ || !d1_ || !d2_) throw DomainError("radial function needs value and two derivatives");
  if (!std::isfinite(tail_exponent_)) throw DomainError("tail exponent must be finite");
}

RadialFunction RadialFunction::from_profile(RadialCallable value, double tail_exponent, std::string name) {
  auto v = std::make_shared<RadialCallable>(std::move(value));
  // one-sided at the origin would break the even extension; mirror instead
  auto at = [v](double r) { return (*v)(std::abs(r)); };
  auto d1 = [at](double r) {
    const double h = 1e-5 * (1.0 + r);
    return (at(r + h) - at(r - h)) / (2.0 * h);
  };
  auto d2 = [at](double r) {
    const double h = 1e-3 * (1.0 + r);
    return (at(r + h) - 2.0 * at(r) + at(r - h)) / (h * h);
  };
  return RadialFunction(at, d1, d2, tail_exponent, std::move(name));
}

RadialFunction RadialFunction::constant(double c) {
  RadialFunction f([c](double) { return c; }, [](double) { return 0.0; }, [](double) { return 0.0; }, 0.0,
                   "constant");
  f.with_tail_coefficient(c);
  return f;
}

RadialFunction RadialFunction::weight(double beta) {
  const WeightSpec w(beta);
  RadialFunction f([w](double r) { return w.value(r); }, [w](double r) { return w.d1(r); },
                   [w](double r) { return w.d2(r); }, -beta, "psi_" + std::to_string(beta));
  return f;
}

RadialFunction RadialFunction::power(double beta, double scale) {
  RadialFunction f([beta, scale](double r) { return scale * std::pow(r, -beta); },
                   [beta, scale](double r) { return -beta * scale * std::pow(r, -beta - 1.0); },
                   [beta, scale](double r) { return beta * (beta + 1.0) * scale * std::pow(r, -beta - 2.0); },
                   -beta, "power_" + std::to_string(beta));
  f.with_tail_coefficient(scale);
  f.mark_singular_at_origin();
  return f;
}

double RadialFunction::laplacian(int N, double r) const {
  if (r == 0.0) return N * d2(0.0);
  return d2(r) + (N - 1.0) / r * d1(r);
}

void RadialFunction::require_fractional_class(const OperatorParams& params) const {
  if (!in_fractional_class(params.s))
    throw MembershipError("profile '" + name_ + "' grows like r^" + std::to_string(tail_exponent_) +
                          "; the fractional Laplacian of order s=" + std::to_string(params.s) +
                          " needs tail exponent < 2s");
}

RadialFunction operator*(const RadialFunction& f, const RadialFunction& g) {
  RadialFunction h([f, g](double r) { return f(r) * g(r); },
                   [f, g](double r) { return f.d1(r) * g(r) + f(r) * g.d1(r); },
                   [f, g](double r) { return f.d2(r) * g(r) + 2.0 * f.d1(r) * g.d1(r) + f(r) * g.d2(r); },
                   f.tail_exponent() + g.tail_exponent(), f.name() + "*" + g.name());
  if (f.tail_coefficient() && g.tail_coefficient()) h.with_tail_coefficient(*f.tail_coefficient() * *g.tail_coefficient());
  if (f.singular_at_origin() || g.singular_at_origin()) h.mark_singular_at_origin();
  return h;
}

RadialFunction operator+(const RadialFunction& f, const RadialFunction& g) {
  RadialFunction h([f, g](double r) { return f(r) + g(r); }, [f, g](double r) { return f.d1(r) + g.d1(r); },
                   [f, g](double r) { return f.d2(r) + g.d2(r); },
                   std::max(f.tail_exponent(), g.tail_exponent()), f.name() + "+" + g.name());
  if (f.singular_at_origin() || g.singular_at_origin()) h.mark_singular_at_origin();
  return h;
}

RadialFunction operator*(double a, const RadialFunction& f) {
  RadialFunction h([a, f](double r) { return a * f(r); }, [a, f](double r) { return a * f.d1(r); },
                   [a, f](double r) { return a * f.d2(r); }, f.tail_exponent(), f.name());
  if (f.tail_coefficient()) h.with_tail_coefficient(a * *f.tail_coefficient());
  if (f.singular_at_origin()) h.mark_singular_at_origin();
  return h;
}

WeightSpec::WeightSpec(double b) : beta(b) {
  if (!(b > 0.0) || !std::isfinite(b)) throw DomainError("weight exponent beta must be positive");
}

double WeightSpec::value(double r) const { return std::pow(1.0 + r * r, -0.5 * beta); }

double WeightSpec::d1(double r) const { return -beta * r * std::pow(1.0 + r * r, -0.5 * beta - 1.0); }

double WeightSpec::d2(double r) const {
  const double q = 1.0 + r * r;
  return beta * std::pow(q, -0.5 * beta - 2.0) * ((beta + 1.0) * r * r - 1.0);
}

double WeightSpec::laplacian(int N, double r) const {
  const double q = 1.0 + r * r;
  return beta * std::pow(q, -0.5 * beta - 2.0) * ((beta - N + 2.0) * r * r - N);
}

}  // namespace mixlap
