#include "mixlap/certificates.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "json_io.hpp"
#include "mixlap/errors.hpp"
#include "mixlap/special_functions.hpp"

namespace mixlap {

namespace {

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(6);
  os << v;
  return os.str();
}

bool is_critical(const OperatorParams& p, double beta) { return std::abs(beta - p.N) <= 1e-12 * p.N; }

FarFieldRegime far_regime_of(Regime r) {
  switch (r) {
    case Regime::kII: return FarFieldRegime::kSubcritical;
    case Regime::kIII: return FarFieldRegime::kCritical;
    default: return FarFieldRegime::kSupercritical;
  }
}

// The quantity that tends to the far-field constant as r grows.
double far_prefactor(Regime regime, const PsiClosedForm& cf, double r) {
  const double F = cf.reduced(r);
  const double t = r * r;
  switch (regime) {
    case Regime::kII: return -F;
    case Regime::kIII: return -F / std::log1p(t);
    case Regime::kIV: return -F * std::pow(1.0 + t, 0.5 * (cf.params().N - cf.weight().beta));
    default: throw RegimeError("far-field prefactor is not defined in regime i");
  }
}

double find_R_eps(Regime regime, const PsiClosedForm& cf, double limit, double eps, const ThresholdOptions& opt) {
  auto outside = [&](double r) { return !(std::abs(far_prefactor(regime, cf, r) - limit) <= eps); };
  constexpr int kPerDecade = 20;
  const int kmax = static_cast<int>(std::ceil(kPerDecade * std::log10(opt.r_cap)));
  int last = -1;
  for (int k = 0; k <= kmax; ++k)
    if (outside(std::pow(10.0, double(k) / kPerDecade))) last = k;
  if (last < 0) return 1.0;
  if (last == kmax)
    throw ConvergenceError("far-field prefactor still farther than " + fmt(eps) + " from its limit at r=" +
                           fmt(opt.r_cap));
  // last bad scan point and the following good one bracket R_eps
  double lo = std::log(std::pow(10.0, double(last) / kPerDecade));
  double hi = std::log(std::pow(10.0, double(last + 1) / kPerDecade));
  while (hi - lo > opt.bisection_tol) {
    const double mid = 0.5 * (lo + hi);
    (outside(std::exp(mid)) ? lo : hi) = mid;
  }
  return std::exp(hi);
}

double max_abs_on_ball(const PsiClosedForm& cf, double R) {
  double m = std::abs(cf(0.0));
  for (int i = 1; i <= 2000; ++i) m = std::max(m, std::abs(cf(R * i / 2000.0)));
  if (R > 1e-3) {
    const double l0 = std::log(1e-3), l1 = std::log(R);
    for (int i = 0; i <= 500; ++i) m = std::max(m, std::abs(cf(std::exp(l0 + (l1 - l0) * i / 500.0))));
  }
  return m;
}

void require_preconditions(Regime regime, const OperatorParams& params, double alpha, double beta) {
  if (!regime_preconditions_hold(regime, params, alpha, beta))
    throw RegimeError(std::string("regime ") + to_string(regime) + " needs " + regime_precondition_text(regime) +
                      "; got N=" + std::to_string(params.N) + " s=" + fmt(params.s) + " alpha=" + fmt(alpha) +
                      " beta=" + fmt(beta));
}

struct MarginPoint {
  double margin;
  double floor;
};

template <class Potential>
void fill_margins(Certificate& cert, const PsiClosedForm& cf, Potential potential) {
  const WeightSpec& w = cf.weight();
  const int N = cf.params().N;
  cert.margins.clear();
  cert.margin_floors.clear();
  cert.max_margin = -INFINITY;
  cert.first_violation.reset();
  cert.growth_bound_holds = true;
  bool negative = true;
  for (double r : cert.grid) {
    const double psi = w.value(r);
    const double lap = w.laplacian(N, r);
    const double fl = cf(r);
    const double pot = potential(r) * psi;
    const double m = lap - fl - pot;
    const double floor = 1e-12 * (std::abs(lap) + std::abs(fl) + std::abs(pot));
    cert.margins.push_back(m);
    cert.margin_floors.push_back(floor);
    cert.max_margin = std::max(cert.max_margin, m);
    if (!(m <= -floor)) {
      negative = false;
      if (!cert.first_violation || r < *cert.first_violation) cert.first_violation = r;
    }
    if (psi + std::abs(w.d1(r)) > (1.0 + w.beta) * psi * (1.0 + 1e-14)) cert.growth_bound_holds = false;
  }
  cert.pass = negative && cert.preconditions_hold;
}

std::vector<double> log_grid(double lo, double hi, int n) {
  std::vector<double> g(n);
  const double a = std::log(lo), b = std::log(hi);
  for (int i = 0; i < n; ++i) g[i] = std::exp(a + (b - a) * i / (n - 1));
  return g;
}

template <class Potential>
Certificate certify(CertificateKind kind, Regime regime, const OperatorParams& params, double beta,
                    const CoefficientModel& coeff, double multiplier, const std::vector<double>& grid,
                    const CertifyOptions& options, Potential potential) {
  Certificate cert;
  cert.kind = kind;
  cert.regime = to_string(regime);
  cert.params = params;
  cert.alpha = coeff.alpha;
  cert.beta = beta;
  cert.c0 = coeff.c0;
  cert.C0 = coeff.C0;
  cert.preconditions_hold = regime_preconditions_hold(regime, params, coeff.alpha, beta);
  if (!cert.preconditions_hold)
    cert.warnings.push_back(std::string("regime ") + to_string(regime) + " preconditions fail: needs " +
                            regime_precondition_text(regime));

  double R_eps = 1.0;
  if (cert.preconditions_hold) {
    try {
      const ThresholdResult t = threshold_pc0(regime, params, beta, coeff, options.threshold);
      cert.threshold = t.threshold;
      cert.epsilon = t.epsilon;
      cert.R_eps = t.R_eps;
      cert.M_eps_beta = t.M_eps_beta;
      R_eps = std::max(1.0, t.R_eps);
      if (multiplier < (1.0 + options.safety) * t.threshold)
        cert.warnings.push_back("value " + fmt(multiplier) + " is below the safety threshold " +
                                fmt((1.0 + options.safety) * t.threshold));
    } catch (const Error& e) {
      cert.threshold = NAN;
      cert.warnings.push_back(std::string("threshold unavailable: ") + e.what());
    }
  } else {
    cert.threshold = NAN;
  }

  cert.grid = grid.empty() ? default_certificate_grid(R_eps) : grid;
  const PsiClosedForm cf(params, WeightSpec(beta), options.threshold.quad);
  fill_margins(cert, cf, potential);
  return cert;
}

}  // namespace

const char* to_string(Regime r) {
  switch (r) {
    case Regime::kI: return "i";
    case Regime::kII: return "ii";
    case Regime::kIII: return "iii";
    case Regime::kIV: return "iv";
  }
  return "?";
}

Regime regime_from_string(const std::string& name) {
  if (name == "i") return Regime::kI;
  if (name == "ii") return Regime::kII;
  if (name == "iii") return Regime::kIII;
  if (name == "iv") return Regime::kIV;
  throw DomainError("unknown regime '" + name + "' (expected i, ii, iii or iv)");
}

const char* to_string(CertificateKind k) {
  switch (k) {
    case CertificateKind::kElliptic: return "elliptic";
    case CertificateKind::kParabolicLambda: return "parabolic_lambda";
    case CertificateKind::kBarrier: return "barrier";
  }
  return "?";
}

const char* to_string(CoefficientMode m) {
  return m == CoefficientMode::kLowerBound ? "lower_bound" : "upper_bound";
}

// ------------------------------------------------------------ coefficients

CoefficientModel CoefficientModel::lower_bound(double alpha, double C0, double c0) {
  if (!(alpha >= 0.0) || !(C0 > 0.0) || !(c0 >= 0.0))
    throw DomainError("lower-bound coefficients need alpha >= 0, C0 > 0, c0 >= 0");
  CoefficientModel m;
  m.alpha = alpha;
  m.C0 = C0;
  m.c0 = c0;
  m.mode = CoefficientMode::kLowerBound;
  m.rho = [=](double r) { return C0 * std::pow(1.0 + r * r, -0.5 * alpha); };
  m.c = [=](double) { return c0; };
  return m;
}

CoefficientModel CoefficientModel::upper_bound(double alpha, double c0, double r0, std::optional<double> rho_scale) {
  const double k = rho_scale.value_or(c0);
  if (!(alpha >= 0.0) || !(c0 > 0.0) || !(r0 > 0.0) || !(k > 0.0))
    throw DomainError("upper-bound coefficients need alpha >= 0, c0 > 0, r0 > 0 and a positive rho scale");
  CoefficientModel m;
  m.alpha = alpha;
  m.C0 = k;
  m.c0 = c0;
  m.mode = CoefficientMode::kUpperBound;
  m.r0 = r0;
  m.rho = [=](double r) { return k * std::pow(1.0 + r * r, -0.5 * alpha); };
  m.c = [=](double) { return c0; };
  return m;
}

std::vector<std::string> CoefficientModel::violations(const std::vector<double>& radii) const {
  std::vector<std::string> out;
  for (double r : radii) {
    const double bound = std::pow(1.0 + r * r, -0.5 * alpha);
    const double rv = rho(r), cv = c(r);
    const double slack = 1e-12 * bound;
    if (mode == CoefficientMode::kLowerBound && !(rv >= C0 * bound - slack * C0))
      out.push_back("rho(" + fmt(r) + ")=" + fmt(rv) + " below C0 (1+r^2)^(-alpha/2)");
    if (mode == CoefficientMode::kUpperBound && r > r0 && !(rv > 0.0 && rv <= c0 * bound + slack * c0))
      out.push_back("rho(" + fmt(r) + ")=" + fmt(rv) + " outside (0, c0 (1+r^2)^(-alpha/2)]");
    if (!(cv >= c0)) out.push_back("c(" + fmt(r) + ")=" + fmt(cv) + " below c0");
    if (mode == CoefficientMode::kLowerBound && !(c0 >= 0.0)) out.push_back("c0 negative");
  }
  return out;
}

void CoefficientModel::validate(const std::vector<double>& radii) const {
  const auto v = violations(radii);
  if (!v.empty()) throw DomainError("coefficient model: " + v.front());
}

// ---------------------------------------------------------------- regimes

bool regime_preconditions_hold(Regime regime, const OperatorParams& p, double alpha, double beta) {
  const double N = p.N, s2 = 2.0 * p.s;
  const double tol = 1e-12 * N;
  if (!(beta > 0.0) || !(alpha >= 0.0)) return false;
  switch (regime) {
    case Regime::kI: return beta <= N - s2 + tol && alpha <= 2.0;
    case Regime::kII: return beta > N - s2 + tol && beta < N - tol && alpha <= s2;
    case Regime::kIII: return is_critical(p, beta) && alpha < s2;
    case Regime::kIV: return beta > N + tol && alpha + beta <= s2 + N + tol;
  }
  return false;
}

std::string regime_precondition_text(Regime regime) {
  switch (regime) {
    case Regime::kI: return "0 < beta <= N-2s and alpha <= 2";
    case Regime::kII: return "N-2s < beta < N and alpha <= 2s";
    case Regime::kIII: return "beta = N and alpha < 2s";
    case Regime::kIV: return "beta > N and alpha + beta <= N + 2s";
  }
  return "";
}

ThresholdResult threshold_pc0(Regime regime, const OperatorParams& params, double beta, const CoefficientModel& coeff,
                              const ThresholdOptions& opt) {
  require_preconditions(regime, params, coeff.alpha, beta);
  ThresholdResult t;
  const double N = params.N;
  if (regime == Regime::kI) {
    // Delta psi <= beta (beta-N+2) (1+r^2)^(-beta/2-1) and (-Delta)^s psi >= 0
    t.threshold = beta < N - 2.0 ? 0.0 : beta * (beta - N + 2.0) / coeff.C0;
    return t;
  }
  const FarFieldConstant fc = far_field_constant(params, beta);
  if (fc.regime != far_regime_of(regime))
    throw RegimeError(std::string("beta=") + fmt(beta) + " is in the " + to_string(fc.regime) +
                      " far-field case, not regime " + to_string(regime));
  const PsiClosedForm cf(params, WeightSpec(beta), opt.quad);
  t.far_constant = fc.value;
  t.closed_constant = cf.constant();
  t.epsilon = opt.epsilon.value_or(0.1 * fc.value);
  if (!(t.epsilon > 0.0)) throw DomainError("epsilon must be positive");
  t.R_eps = find_R_eps(regime, cf, fc.value, t.epsilon, opt);
  t.M_eps_beta = max_abs_on_ball(cf, t.R_eps);

  const double bb = beta * (beta + 2.0);
  const double q = 1.0 + t.R_eps * t.R_eps;
  t.far_field_bound = 2.0 / coeff.C0 * std::max(t.closed_constant * (fc.value + t.epsilon), bb);
  t.compact_bound = 2.0 / coeff.C0 * (t.M_eps_beta + bb / q) * std::pow(q, 0.5 * (coeff.alpha + beta));
  t.threshold = std::max(t.far_field_bound, t.compact_bound);
  return t;
}

ThresholdResult threshold_lambda(Regime regime, const OperatorParams& params, double beta,
                                 const CoefficientModel& coeff, const ThresholdOptions& options) {
  // lambda plays the part of p c0, so the numbers coincide
  return threshold_pc0(regime, params, beta, coeff, options);
}

std::vector<double> default_certificate_grid(double R_eps) {
  std::vector<double> g;
  g.reserve(451);
  for (int i = 0; i <= 50; ++i) g.push_back(i / 50.0);
  const double hi = std::max(100.0, 10.0 * R_eps);
  for (double r : log_grid(1e-2, hi, 400)) g.push_back(r);
  std::sort(g.begin(), g.end());
  g.erase(std::unique(g.begin(), g.end()), g.end());
  return g;
}

// ------------------------------------------------------------ certificates

Certificate certify_elliptic(Regime regime, const OperatorParams& params, double beta, double p,
                             const CoefficientModel& coeff, const std::vector<double>& grid,
                             const CertifyOptions& options) {
  if (!(p >= 1.0)) throw DomainError("p must be >= 1");
  Certificate cert = certify(CertificateKind::kElliptic, regime, params, beta, coeff, p * coeff.c0, grid, options,
                             [&](double r) { return p * coeff.rho(r) * coeff.c(r); });
  cert.p = p;
  return cert;
}

Certificate certify_parabolic_lambda(Regime regime, const OperatorParams& params, double beta,
                                     const CoefficientModel& coeff, double lambda, const std::vector<double>& grid,
                                     const CertifyOptions& options) {
  if (!(lambda >= 0.0)) throw DomainError("lambda must be >= 0");
  Certificate cert = certify(CertificateKind::kParabolicLambda, regime, params, beta, coeff, lambda, grid, options,
                             [&](double r) { return lambda * coeff.rho(r); });
  cert.lambda = lambda;
  return cert;
}

// ------------------------------------------------------------------ barrier

BarrierResult lemma5_barrier(const OperatorParams& params, double alpha, double c0, double r0, double C_scale,
                             const BarrierOptions& opt) {
  const int N = params.N;
  const double s = params.s;
  if (N <= 2) throw DomainError("barrier exponent range is empty for N <= 2");
  if (!(alpha > 2.0 * s)) throw DomainError("barrier exponent range is empty for alpha <= 2s");
  if (!(c0 > 0.0) || !(r0 > 0.0) || !(C_scale > 0.0)) throw DomainError("barrier needs c0, r0, C_scale > 0");

  BarrierReport rep;
  const double beta = 0.5 * std::min(N - 2.0, alpha - 2.0 * s);
  rep.beta = beta;

  const RadialFunction unit = RadialFunction::power(beta, 1.0);
  double lo = INFINITY, hi = -INFINITY, sum = 0.0;
  for (double r : opt.theta_radii) {
    const double th = std::pow(r, beta + 2.0 * s) * fraclap_quadrature(params, unit, r, opt.quad);
    rep.theta_radii.push_back(r);
    rep.theta_values.push_back(th);
    lo = std::min(lo, th);
    hi = std::max(hi, th);
    sum += th;
  }
  rep.theta = sum / opt.theta_radii.size();
  rep.theta_spread = (hi - lo) / std::abs(rep.theta);
  rep.theta_literature = std::pow(2.0, 2.0 * s) * gamma(0.5 * (beta + 2.0 * s)) * gamma(0.5 * (N - beta)) /
                         (gamma(0.5 * beta) * gamma(0.5 * (N - beta - 2.0 * s)));

  rep.r_min = std::max(1.0, r0);
  rep.grid = log_grid(rep.r_min * (1.0 + 1e-6), opt.r_max, opt.grid_points);

  // L r^(-beta) = beta (beta+2-N) r^(-beta-2) - theta r^(-beta-2s) by homogeneity
  auto unit_mixed = [&](double r) {
    return beta * (beta + 2.0 - N) * std::pow(r, -beta - 2.0) - rep.theta * std::pow(r, -beta - 2.0 * s);
  };
  auto rho_max = [&](double r) { return c0 * std::pow(1.0 + r * r, -0.5 * alpha); };

  double C = C_scale;
  auto rho_ok = [&](double Cv) {
    for (double r : rep.grid)
      if (!(Cv * unit_mixed(r) <= -(1.0 + opt.margin) * rho_max(r))) return false;
    return true;
  };
  while (!rho_ok(C) && rep.doublings < opt.max_doublings) {
    C *= 2.0;
    ++rep.doublings;
  }
  rep.C = C;
  rep.rho_bound_holds = rho_ok(C);

  rep.decay_holds = rep.theta > 0.0;
  rep.nonnegative = true;
  for (double r : rep.grid) {
    const double LV = C * unit_mixed(r);
    const double decay = LV + rep.theta * C * std::pow(r, -beta - 2.0 * s);
    rep.decay_margins.push_back(decay);
    rep.rho_margins.push_back(LV + (1.0 + opt.margin) * rho_max(r));
    if (!(decay <= 0.0)) rep.decay_holds = false;
    if (!(C * std::pow(r, -beta) >= 0.0)) rep.nonnegative = false;
  }
  rep.m0 = C * std::pow(rep.r_min, -beta);
  rep.vanishes_at_infinity = C * std::pow(1e30, -beta) < 1e-6 * rep.m0;
  rep.pass = rep.decay_holds && rep.rho_bound_holds && rep.nonnegative && rep.vanishes_at_infinity &&
             rep.theta_spread <= 1e-6;

  RadialFunction V = RadialFunction::power(beta, C);
  return BarrierResult{std::move(V), beta, std::move(rep)};
}

Certificate BarrierReport::certificate(const OperatorParams& params, double alpha, double c0) const {
  Certificate c;
  c.kind = CertificateKind::kBarrier;
  c.regime = "lemma5";
  c.params = params;
  c.alpha = alpha;
  c.beta = beta;
  c.c0 = c0;
  c.threshold = C;
  c.grid = grid;
  c.margins = rho_margins;
  c.margin_floors.assign(grid.size(), 0.0);
  c.max_margin = rho_margins.empty() ? 0.0 : *std::max_element(rho_margins.begin(), rho_margins.end());
  for (size_t i = 0; i < grid.size(); ++i)
    if (!(rho_margins[i] <= 0.0)) {
      c.first_violation = grid[i];
      break;
    }
  c.pass = pass;
  return c;
}

// --------------------------------------------------------------------- json

nlohmann::json detail::certificate_json(const Certificate& c, bool with_grid) {
  nlohmann::json j;
  j["kind"] = to_string(c.kind);
  j["regime"] = c.regime;
  j["N"] = c.params.N;
  j["s"] = c.params.s;
  j["alpha"] = number(c.alpha);
  j["beta"] = number(c.beta);
  j["p"] = number(c.p);
  j["c0"] = number(c.c0);
  j["C0"] = number(c.C0);
  if (c.kind == CertificateKind::kParabolicLambda) j["lambda"] = number(c.lambda);
  j["threshold"] = number(c.threshold);
  j["epsilon"] = number(c.epsilon);
  j["R_eps"] = number(c.R_eps);
  j["M_eps_beta"] = number(c.M_eps_beta);
  j["max_margin"] = number(c.max_margin);
  j["first_violation"] = optional_number(c.first_violation);
  j["preconditions_hold"] = c.preconditions_hold;
  j["growth_bound_holds"] = c.growth_bound_holds;
  j["warnings"] = c.warnings;
  if (with_grid) {
    j["grid"] = numbers(c.grid);
    j["margins"] = numbers(c.margins);
  }
  j["verdict"] = c.pass ? "pass" : "fail";
  return j;
}

std::string Certificate::to_json(int indent) const { return detail::certificate_json(*this).dump(indent); }

}  // namespace mixlap
