#include "mixlap/radial_kernel.hpp"

#include <algorithm>
#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <numbers>

#include "mixlap/errors.hpp"
#include "mixlap/operator_params.hpp"
#include "mixlap/special_functions.hpp"

namespace mixlap {
namespace {

using boost::math::quadrature::gauss;
using boost::math::quadrature::gauss_kronrod;

double sphere_ratio(int N) { return sphere_area(N - 1) / sphere_area(N); }

}  // namespace

double power_gap(double b, double m, double q) {
  // (b - 2m)^q - b^q = b^q expm1(q log1p(-2m/b))
  return std::pow(b, q) * std::expm1(q * std::log1p(-2.0 * m / b));
}

double far_curvature(int N, double s) {
  const double nu = 0.5 * (N + 2.0 * s);
  return nu * (2.0 * nu - N + 2.0) / N;
}

double shell_average_kernel_angular(int N, double s, double r, double rho, double delta) {
  if (N < 2) throw DomainError("angular kernel needs N >= 2");
  const double p = N + 2.0 * s;
  if (r == 0.0 || rho == 0.0) {
    const double d = std::max(r, rho);
    return d > delta ? std::pow(d, -p) : 0.0;
  }
  if (r + rho <= delta) return 0.0;
  const double gap = std::abs(r - rho);
  double theta_lo = 0.0;
  if (gap < delta) {
    const double c = std::clamp((r * r + rho * rho - delta * delta) / (2.0 * r * rho), -1.0, 1.0);
    theta_lo = std::acos(c);
  }
  if (delta == 0.0 && gap == 0.0) throw DomainError("untruncated shell kernel is singular at r = rho");
  const double pi = std::numbers::pi;
  const double width0 = std::min(pi, 0.5 * std::max(gap, delta) / std::sqrt(r * rho));
  auto integrand = [&](double theta) {
    const double d2 = (r - rho) * (r - rho) + 4.0 * r * rho * std::pow(std::sin(0.5 * theta), 2);
    return std::pow(d2, -0.5 * p) * std::pow(std::sin(theta), N - 2);
  };
  double total = 0.0;
  double a = theta_lo;
  double w = width0;
  while (a < pi) {
    const double b = std::min(pi, a + w);
    total += gauss<double, 16>::integrate(integrand, a, b);
    a = b;
    w *= 2.0;
  }
  return sphere_ratio(N) * total;
}

double shell_average_kernel(int N, double s, double r, double rho, double delta) {
  const double p = N + 2.0 * s;
  if (r == 0.0 || rho == 0.0) {
    const double d = std::max(r, rho);
    return d > delta ? std::pow(d, -p) : 0.0;
  }
  if (N == 1) {
    const double gap = std::abs(r - rho);
    double v = 0.0;
    if (gap > delta) v += std::pow(gap, -p);
    if (r + rho > delta) v += std::pow(r + rho, -p);
    return 0.5 * v;
  }
  if (N != 3) return shell_average_kernel_angular(N, s, r, rho, delta);

  const double q = -(1.0 + 2.0 * s);
  const double hi = r + rho;
  if (hi <= delta) return 0.0;
  const double gap = std::abs(r - rho);
  double diff;
  if (gap > delta) {
    diff = power_gap(hi, std::min(r, rho), q);
  } else {
    if (delta == 0.0) throw DomainError("untruncated shell kernel is singular at r = rho");
    diff = std::pow(delta, q) * -std::expm1(q * std::log(hi / delta));
  }
  return diff / (2.0 * r * rho * (1.0 + 2.0 * s));
}

double exterior_integral(int N, double s, double r, double R) {
  if (!(R > r)) throw DomainError("exterior integral needs r < R");
  const double area = sphere_area(N);
  if (r == 0.0) return area * std::pow(R, -2.0 * s) / (2.0 * s);
  if (N == 3) {
    const double q = 1.0 - 2.0 * s;
    const double first = std::abs(q) < 1e-12 ? std::log1p(-2.0 * r / (R + r))
                                             : std::pow(R + r, q) * std::expm1(q * std::log1p(-2.0 * r / (R + r))) / q;
    const double second = r * (std::pow(R - r, -2.0 * s) + std::pow(R + r, -2.0 * s)) / (2.0 * s);
    return -2.0 * std::numbers::pi / (r * (1.0 + 2.0 * s)) * (first - second);
  }
  // numeric for other dimensions: geometric panels from R, analytic tail
  auto integrand = [&](double rho) { return shell_average_kernel(N, s, r, rho) * std::pow(rho, N - 1.0); };
  const double far = 1e3 * (R + r);
  double total = 0.0;
  double a = R;
  double w = R - r;
  while (a < far) {
    const double b = std::min(far, a + w);
    total += gauss_kronrod<double, 15>::integrate(integrand, a, b, 8, 1e-12);
    a = b;
    w *= 2.0;
  }
  const double tail = std::pow(far, -2.0 * s) / (2.0 * s) +
                      far_curvature(N, s) * r * r * std::pow(far, -2.0 - 2.0 * s) / (2.0 + 2.0 * s);
  return area * (total + tail);
}

}  // namespace mixlap
