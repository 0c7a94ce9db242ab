#include "mixlap/special_functions.hpp"

#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "mixlap/errors.hpp"
#include "mixlap/operator_params.hpp"

namespace mixlap {
namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kEulerGamma = 0.57721566490153286061;

// Lanczos coefficients, g = 7, nine terms. Relative error ~1e-15 on the
// right half-plane; the left half goes through reflection.
constexpr double kLanczosG = 7.0;
constexpr std::array<double, 9> kLanczos = {
    0.99999999999980993,     676.5203681218851,     -1259.1392167224028,
    771.32342877765313,      -176.61502916214059,   12.507343278686905,
    -0.13857109526572012,    9.9843695780195716e-6, 1.5056327351493116e-7};

bool is_nonpositive_integer(double t) { return t <= 0.0 && t == std::nearbyint(t); }

// sin(pi x) and cos(pi x) with the argument reduced first, so large |x|
// does not lose the fractional part to rounding of pi*x.
double sin_pi(double x) {
  double r = std::fmod(x, 2.0);
  if (r > 1.0) r -= 2.0;
  if (r < -1.0) r += 2.0;
  if (r == 0.0 || r == 1.0 || r == -1.0) return 0.0;
  if (r > 0.5) r = 1.0 - r;
  if (r < -0.5) r = -1.0 - r;
  return std::sin(kPi * r);
}

double cos_pi(double x) { return sin_pi(x + 0.5); }

double lanczos_sum(double x) {
  double a = kLanczos[0];
  for (std::size_t i = 1; i < kLanczos.size(); ++i) a += kLanczos[i] / (x + static_cast<double>(i));
  return a;
}

void require_finite(double v, const char* name) {
  if (!std::isfinite(v)) throw DomainError(std::string(name) + " must be finite");
}

// ---------------------------------------------------------------- 2F1 ----

constexpr double kSeriesTol = 1e-14;
constexpr int kSeriesCap = 100000;

// Stops once two consecutive terms are below tol relative to the partial
// sum, with an absolute floor tied to the largest term seen (that floor is
// the accuracy cancellation already cost us).
struct SeriesStop {
  double largest = 0.0;
  int quiet = 0;
  bool done(double term, double sum) {
    largest = std::max(largest, std::abs(term));
    if (std::abs(term) <= kSeriesTol * (std::abs(sum) + largest)) {
      return ++quiet >= 2;
    }
    quiet = 0;
    return false;
  }
};

[[noreturn]] void series_failed(double a, double b, double c, double z) {
  throw ConvergenceError("2F1 series did not converge within " + std::to_string(kSeriesCap) +
                         " terms (a=" + std::to_string(a) + ", b=" + std::to_string(b) +
                         ", c=" + std::to_string(c) + ", z=" + std::to_string(z) + ")");
}

// Plain Gauss series; exact (finite) when a or b is a nonpositive integer.
double series(double a, double b, double c, double z) {
  if (is_nonpositive_integer(c)) throw PoleError("2F1 series with c a nonpositive integer");
  double term = 1.0, sum = 1.0;
  SeriesStop stop;
  stop.largest = 1.0;
  for (int k = 0; k < kSeriesCap; ++k) {
    const double kk = k;
    term *= (a + kk) * (b + kk) / ((c + kk) * (kk + 1.0)) * z;
    sum += term;
    if (term == 0.0) return sum;
    if (stop.done(term, sum)) return sum;
  }
  series_failed(a, b, c, z);
}

bool is_polynomial(double a, double b) { return is_nonpositive_integer(a) || is_nonpositive_integer(b); }

// 2F1(a, b; a+b-m; 1-w), m >= 0 integer, by the logarithmic connection
// formula (Abramowitz & Stegun 15.3.11-12).
double log_case(double a, double b, int m, double w) {
  const double c = a + b - m;
  const double md = m;
  double finite_part = 0.0;
  if (m > 0) {
    double term = 1.0, sum = 1.0;
    for (int k = 0; k + 1 < m; ++k) {
      const double kk = k;
      term *= (a - md + kk) * (b - md + kk) / ((kk + 1.0) * (1.0 - md + kk)) * w;
      sum += term;
    }
    finite_part = gamma(md) * rgamma(a) * rgamma(b) * std::pow(w, -md) * sum;
  }

  const double pref = ((m % 2 == 0) ? 1.0 : -1.0) * rgamma(a - md) * rgamma(b - md);
  double log_part = 0.0;
  if (pref != 0.0) {
    const double lw = std::log(w);
    double psi_k1 = -kEulerGamma;         // psi(k+1)
    double psi_km1 = digamma(md + 1.0);   // psi(k+m+1)
    double psi_a = digamma(a), psi_b = digamma(b);
    double coef = 1.0 / gamma(md + 1.0);  // (a)_k (b)_k / (k! (k+m)!) w^k
    double sum = 0.0;
    SeriesStop stop;
    int k = 0;
    for (; k < kSeriesCap; ++k) {
      const double term = coef * (lw - psi_k1 - psi_km1 + psi_a + psi_b);
      sum += term;
      if (coef == 0.0 || stop.done(term, sum)) break;
      const double kk = k;
      coef *= (a + kk) * (b + kk) / ((kk + 1.0) * (kk + md + 1.0)) * w;
      psi_k1 += 1.0 / (kk + 1.0);
      psi_km1 += 1.0 / (kk + md + 1.0);
      psi_a += 1.0 / (a + kk);
      psi_b += 1.0 / (b + kk);
    }
    if (k == kSeriesCap) series_failed(a, b, c, 1.0 - w);
    log_part = pref * sum;
  }
  return gamma(c) * (finite_part - log_part);
}

// 2F1(a, b; c; 1-w) for small w via the 1-z connection formulas.
double near_one(double a, double b, double c, double w) {
  const double d = c - a - b;
  const double m = std::nearbyint(d);
  if (std::abs(d - m) > 1e-9) {
    double t1 = 0.0, t2 = 0.0;
    const double r1 = rgamma(c - a) * rgamma(c - b);
    if (r1 != 0.0) t1 = gamma(c) * gamma(d) * r1 * series(a, b, 1.0 - d, w);
    const double r2 = rgamma(a) * rgamma(b);
    if (r2 != 0.0) t2 = gamma(c) * gamma(-d) * r2 * std::pow(w, d) * series(c - a, c - b, 1.0 + d, w);
    return t1 + t2;
  }
  const int mi = static_cast<int>(m);
  if (mi <= 0) return log_case(a, b, -mi, w);
  // Euler's transformation turns c - a - b = m > 0 into -m.
  const double ap = c - a, bp = c - b;
  if (is_polynomial(ap, bp)) return std::pow(w, m) * series(ap, bp, c, 1.0 - w);
  return std::pow(w, m) * log_case(ap, bp, mi, w);
}

// z in [0, 1) with w = 1 - z supplied separately.
double unit_interval(double a, double b, double c, double z, double w) {
  if (z == 0.0) return 1.0;
  if (z <= 0.75 || is_polynomial(a, b)) return series(a, b, c, z);
  return near_one(a, b, c, w);
}

double gauss_sum(double a, double b, double c) {
  if (!(c - a - b > 0.0))
    throw DivergenceError("2F1 at z = 1 requires c > a + b (got c - a - b = " +
                          std::to_string(c - a - b) + ")");
  return gamma(c) * gamma(c - a - b) * rgamma(c - a) * rgamma(c - b);
}

}  // namespace

// ----------------------------------------------------------- gamma family

double gamma(double t) {
  if (std::isnan(t)) throw DomainError("gamma of NaN");
  if (is_nonpositive_integer(t)) throw PoleError("gamma has a pole at " + std::to_string(t));
  if (t < 0.5) return kPi / (sin_pi(t) * gamma(1.0 - t));
  if (t > 171.7) return std::numeric_limits<double>::infinity();
  const double x = t - 1.0;
  const double tt = x + kLanczosG + 0.5;
  // split the power so it cannot overflow before the exponential damps it
  const double half = std::pow(tt, 0.5 * (x + 0.5));
  return std::sqrt(2.0 * kPi) * half * (half * std::exp(-tt)) * lanczos_sum(x);
}

double log_abs_gamma(double t) {
  if (is_nonpositive_integer(t)) throw PoleError("log-gamma has a pole at " + std::to_string(t));
  if (t < 0.5) return std::log(kPi / std::abs(sin_pi(t))) - log_abs_gamma(1.0 - t);
  const double x = t - 1.0;
  const double tt = x + kLanczosG + 0.5;
  return 0.5 * std::log(2.0 * kPi) + (x + 0.5) * std::log(tt) - tt + std::log(lanczos_sum(x));
}

double rgamma(double t) {
  if (is_nonpositive_integer(t)) return 0.0;
  if (t > 171.0) return std::exp(-log_abs_gamma(t));
  return 1.0 / gamma(t);
}

double digamma(double t) {
  if (is_nonpositive_integer(t)) throw PoleError("digamma has a pole at " + std::to_string(t));
  if (t < 0.0) return digamma(1.0 - t) - kPi * cos_pi(t) / sin_pi(t);
  double acc = 0.0;
  double x = t;
  while (x < 10.0) {
    acc -= 1.0 / x;
    x += 1.0;
  }
  const double x2 = 1.0 / (x * x);
  // Bernoulli tail; at x >= 10 the next omitted term is below 1e-17
  const double series = x2 * (1.0 / 12 - x2 * (1.0 / 120 - x2 * (1.0 / 252 - x2 * (1.0 / 240 - x2 * (1.0 / 132)))));
  return acc + std::log(x) - 0.5 / x - series;
}

// ------------------------------------------------------------------- 2F1

HypergeometricArgs::HypergeometricArgs(double a, double b, double c, double z) : a_(a), b_(b), c_(c), z_(z) {
  require_finite(a, "2F1 parameter a");
  require_finite(b, "2F1 parameter b");
  require_finite(c, "2F1 parameter c");
  require_finite(z, "2F1 argument z");
  if (!(c > 0.0)) throw DomainError("2F1 parameter c must be positive, got " + std::to_string(c));
  if (z > 1.0) throw DomainError("2F1 argument z must be <= 1, got " + std::to_string(z));
}

double gauss_2f1(const HypergeometricArgs& p) {
  const double a = p.a(), b = p.b(), c = p.c(), z = p.z();
  if (z == 1.0) return gauss_sum(a, b, c);
  if (z < 0.0) {
    // Pfaff: F(a,b;c;z) = (1-z)^(-b) F(c-a, b; c; z/(z-1))
    const double one_minus_z = 1.0 - z;
    return std::pow(one_minus_z, -b) * unit_interval(c - a, b, c, -z / one_minus_z, 1.0 / one_minus_z);
  }
  return unit_interval(a, b, c, z, 1.0 - z);
}

double gauss_2f1_complement(double a, double b, double c, double w) {
  if (!(w >= 0.0 && w <= 1.0)) throw DomainError("complement argument w must lie in [0,1]");
  const HypergeometricArgs p(a, b, c, 1.0 - w);
  if (w == 0.0) return gauss_sum(a, b, c);
  return unit_interval(a, b, c, 1.0 - w, w);
}

LimitRegime limit_regime(double a, double b, double c) {
  const double d = c - a - b;
  if (std::abs(d) <= 1e-12 * std::max(1.0, std::abs(c))) return LimitRegime::kLogarithmic;
  return d > 0.0 ? LimitRegime::kFinite : LimitRegime::kAlgebraic;
}

double limit_constant(LimitRegime regime, double a, double b, double c) {
  const LimitRegime actual = limit_regime(a, b, c);
  if (actual != regime)
    throw RegimeError(std::string("limit regime '") + to_string(regime) + "' requested but c - a - b selects '" +
                      to_string(actual) + "'");
  switch (regime) {
    case LimitRegime::kFinite:
      return gamma(c) * gamma(c - a - b) * rgamma(c - a) * rgamma(c - b);
    case LimitRegime::kLogarithmic:
      return gamma(c) * rgamma(a) * rgamma(b);
    case LimitRegime::kAlgebraic:
      return gamma(c) * gamma(a + b - c) * rgamma(a) * rgamma(b);
  }
  throw DomainError("unknown limit regime");
}

FarFieldRegime far_field_regime(const OperatorParams& params, double beta) {
  const double n = params.N;
  if (!(beta > n - 2.0 * params.s))
    throw RegimeError("far-field constants need beta > N - 2s (beta=" + std::to_string(beta) + ")");
  if (std::abs(beta - n) <= 1e-12 * n) return FarFieldRegime::kCritical;
  return beta < n ? FarFieldRegime::kSubcritical : FarFieldRegime::kSupercritical;
}

FarFieldConstant far_field_constant(const OperatorParams& params, double beta) {
  const FarFieldRegime regime = far_field_regime(params, beta);
  // -(-Delta)^s psi carries F(-s, beta/2 + s; N/2; .) after Pfaff; the
  // constants are minus its z -> 1 limits.
  const double a = -params.s, b = 0.5 * beta + params.s, c = 0.5 * params.N;
  double value = 0.0;
  switch (regime) {
    case FarFieldRegime::kSubcritical:
      value = -gamma(c) * gamma(c - a - b) * rgamma(c - a) * rgamma(c - b);
      break;
    case FarFieldRegime::kCritical:
      value = -gamma(c) * rgamma(a) * rgamma(b);
      break;
    case FarFieldRegime::kSupercritical:
      value = -gamma(c) * gamma(a + b - c) * rgamma(a) * rgamma(b);
      break;
  }
  return {regime, value};
}

const char* to_string(LimitRegime r) {
  switch (r) {
    case LimitRegime::kFinite: return "i";
    case LimitRegime::kLogarithmic: return "ii";
    case LimitRegime::kAlgebraic: return "iii";
  }
  return "?";
}

const char* to_string(FarFieldRegime r) {
  switch (r) {
    case FarFieldRegime::kSubcritical: return "subcritical";
    case FarFieldRegime::kCritical: return "critical";
    case FarFieldRegime::kSupercritical: return "supercritical";
  }
  return "?";
}

}  // namespace mixlap
