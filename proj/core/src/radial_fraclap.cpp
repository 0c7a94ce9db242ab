#include "mixlap/radial_fraclap.hpp"

#include <algorithm>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <string>
#include <utility>
#include <vector>

#include "mixlap/errors.hpp"
#include "mixlap/radial_kernel.hpp"
#include "mixlap/special_functions.hpp"

namespace mixlap {
namespace {

using boost::math::quadrature::gauss_kronrod;
using boost::math::quadrature::tanh_sinh;

constexpr double kPi = std::numbers::pi;

// The integrand is D(y) |x - y|^(-N-2s) with D depending only on |y|.
// For (-Delta)^s u, D(y) = u(r) - u(|y|); for B(f,g) it is the product of
// two such differences. Near |y| = r, D(r + h) ~ c1 h + c2 h^2, and the
// y-Laplacian of D at y = x is `lap`. For large |y|,
// D ~ d0 + sum K_i |y|^theta_i.
struct Difference {
  std::function<double(double)> D;
  double c1 = 0.0;
  double c2 = 0.0;
  double lap = 0.0;
  double d0 = 0.0;
  std::vector<std::pair<double, double>> tail;  // (K, theta), theta != 0
  bool singular_at_origin = false;
};

double estimate_tail_coefficient(const RadialFunction& f, double R) {
  if (auto K = f.tail_coefficient()) return *K;
  return f(R) / std::pow(R, f.tail_exponent());
}

void add_tail(Difference& d, double K, double theta) {
  if (std::abs(theta) < 1e-14) {
    d.d0 += K;
    return;
  }
  d.tail.emplace_back(K, theta);
}

Difference single_difference(int N, const RadialFunction& u, double r, double R) {
  Difference d;
  const double ur = u(r);
  d.D = [&u, ur](double rho) { return ur - u(rho); };
  const double u1 = r == 0.0 ? 0.0 : u.d1(r);
  const double u2 = u.d2(r);
  d.c1 = -u1;
  d.c2 = -0.5 * u2;
  d.lap = -u.laplacian(N, r);
  d.d0 = ur;
  add_tail(d, -estimate_tail_coefficient(u, R), u.tail_exponent());
  d.singular_at_origin = u.singular_at_origin();
  return d;
}

Difference product_difference(int N, const RadialFunction& f, const RadialFunction& g, double r, double R) {
  Difference d;
  const double fr = f(r), gr = g(r);
  d.D = [&f, &g, fr, gr](double rho) { return (fr - f(rho)) * (gr - g(rho)); };
  const double f1 = r == 0.0 ? 0.0 : f.d1(r);
  const double g1 = r == 0.0 ? 0.0 : g.d1(r);
  d.c1 = 0.0;
  d.c2 = f1 * g1;
  d.lap = 2.0 * f1 * g1;
  (void)N;
  const double Kf = estimate_tail_coefficient(f, R), Kg = estimate_tail_coefficient(g, R);
  const double tf = f.tail_exponent(), tg = g.tail_exponent();
  d.d0 = fr * gr;
  add_tail(d, -gr * Kf, tf);
  add_tail(d, -fr * Kg, tg);
  add_tail(d, Kf * Kg, tf + tg);
  d.singular_at_origin = f.singular_at_origin() || g.singular_at_origin();
  return d;
}

// Panel integration with a convergence check on Boost's error estimate.
std::string num(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", x);
  return buf;
}

class PanelSum {
 public:
  explicit PanelSum(const QuadratureConfig& q) : q_(q) {}

  template <class F>
  void gk(F&& f, double a, double b) {
    if (!(b > a)) return;
    count();
    double err = 0.0, l1 = 0.0;
    double v = gauss_kronrod<double, 31>::integrate(f, a, b, 0, 0.0, &err, &l1);
    if (err > target(l1)) {
      // Boost's tolerance is relative to the panel's own L1 norm; loosen it
      // where the absolute floor is the binding requirement, otherwise
      // round-off in tiny panels sends the bisection to full depth.
      const double tol = std::max(1e-2 * q_.rel_tol, 0.5 * q_.panel_abs_tol / std::max(l1, 1e-300));
      v = gauss_kronrod<double, 31>::integrate(f, a, b, q_.max_depth, tol, &err, &l1);
    }
    accept(v, err, l1, a, b);
  }

  // For panels touching a point where the integrand may be singular.
  template <class F>
  void ts(F&& f, double a, double b) {
    if (!(b > a)) return;
    count();
    thread_local tanh_sinh<double> integrator(10);  // integrate() mutates its abscissa cache
    double err = 0.0, l1 = 0.0;
    std::size_t levels = 0;
    const double v = integrator.integrate(f, a, b, 1e-2 * q_.rel_tol, &err, &l1, &levels);
    accept(v, err, l1, a, b);
  }

  void add(double v) { total_ += v; }

  // Panels that missed their own target are acceptable when the summed
  // error is still within the global relative target.
  double total() const {
    if (deferred_err_ > std::max(q_.panel_abs_tol * panels_, q_.rel_tol * l1_))
      throw ConvergenceError("quadrature missed the global target: error estimate " + num(deferred_err_) +
                             " against L1 " + num(l1_) + " (" + worst_ + ")");
    return total_;
  }

 private:
  double target(double l1) const { return std::max(q_.panel_abs_tol, q_.rel_tol * l1); }
  void count() {
    if (++panels_ > q_.panel_cap)
      throw ConvergenceError("quadrature exceeded the panel cap of " + std::to_string(q_.panel_cap));
  }
  void accept(double v, double err, double l1, double a, double b) {
    if (!std::isfinite(v)) throw ConvergenceError("non-finite quadrature value on [" + num(a) + ", " + num(b) + "]");
    l1_ += l1;
    if (err > target(l1)) {
      deferred_err_ += err;
      worst_ = "panel [" + num(a) + ", " + num(b) + "]";
    }
    total_ += v;
  }

  const QuadratureConfig& q_;
  double total_ = 0.0;
  double l1_ = 0.0;
  double deferred_err_ = 0.0;
  std::string worst_;
  int panels_ = 0;
};

double endpoint_singular_integral(const std::function<double(double)>& f, double a, double b) {
  thread_local tanh_sinh<double> integrator(10);  // integrate() mutates its abscissa cache
  double err = 0.0, l1 = 0.0;
  std::size_t levels = 0;
  return integrator.integrate(f, a, b, 1e-12, &err, &l1, &levels);
}

double near_cutoff(const QuadratureConfig& q, double r) { return std::min(q.near_cap, q.near_scale * (1.0 + r)); }

// Singular part over t in (0, delta] of t^(-1-2s) A(t), with A(t) ~ a2 t^2
// as t -> 0. The substitution t = delta w^(1/(2-2s)) makes the integrand
// bounded at w = 0.
template <class A>
void near_shells(PanelSum& sum, double s, double delta, double a2, A&& shell) {
  const double m = 1.0 / (2.0 - 2.0 * s);
  const double t_taylor = 1e-3 * delta;
  const double taylor_value = a2 * m * std::pow(delta, 2.0 - 2.0 * s);
  auto integrand = [&](double w) {
    const double t = delta * std::pow(w, m);
    // a2 t^(1-2s) dt/dw is exactly constant in w
    if (t < t_taylor) return taylor_value;
    const double dt = delta * m * std::pow(w, m - 1.0);
    return std::pow(t, -1.0 - 2.0 * s) * shell(t) * dt;
  };
  sum.ts(integrand, 0.0, 1.0);
}

// The point x sits at the origin: every shell |y| = t sees D(t).
double origin_integral(const OperatorParams& p, const Difference& d, const QuadratureConfig& q) {
  const double s = p.s;
  const double area = sphere_area(p.N);
  const double delta = near_cutoff(q, 0.0);
  const double R = q.far_factor;
  PanelSum sum(q);
  near_shells(sum, s, delta, area * d.c2, [&](double t) { return area * d.D(t); });
  auto mid = [&](double t) { return area * d.D(t) * std::pow(t, -1.0 - 2.0 * s); };
  for (double a = delta; a < R; a *= 2.0) sum.gk(mid, a, std::min(R, 2.0 * a));
  double tail = d.d0 * std::pow(R, -2.0 * s) / (2.0 * s);
  for (auto [K, th] : d.tail) tail += K * std::pow(R, th - 2.0 * s) / (2.0 * s - th);
  sum.add(area * tail);
  return p.C_Ns * sum.total();
}

// N = 3: the polar angle integrates in closed form, leaving
// 2 pi rho / (r (1+2s)) (|r-rho|^(-1-2s) - (r+rho)^(-1-2s)) against D(rho).
double closed_kernel_integral(const OperatorParams& p, const Difference& d, double r, const QuadratureConfig& q) {
  const double s = p.s;
  const double pexp = 1.0 + 2.0 * s;
  const double pref = 2.0 * kPi / (r * pexp);
  const double delta = std::min(near_cutoff(q, r), 0.5 * r);
  const double R = q.far_factor * (1.0 + r);
  auto kern = [&](double rho) { return rho * power_gap(r + rho, std::min(r, rho), -pexp); };

  PanelSum sum(q);
  // symmetric pairs rho = r +- tau, split into even/odd parts of D so the
  // tau^(-1-2s) singularities cancel analytically
  {
    const double m = 1.0 / (2.0 - 2.0 * s);
    const double tau_taylor = 1e-3 * delta;
    const double taylor_singular = 2.0 * (r * d.c2 + d.c1) * m * std::pow(delta, 2.0 - 2.0 * s);
    auto integrand = [&](double w) {
      const double tau = delta * std::pow(w, m);
      if (tau == 0.0) return taylor_singular;
      const double dtau = delta * m * std::pow(w, m - 1.0);
      const double outer_plus = (r + tau) * std::pow(2.0 * r + tau, -pexp);
      const double outer_minus = (r - tau) * std::pow(2.0 * r - tau, -pexp);
      double even, odd;
      if (tau < tau_taylor) {
        even = d.c2 * tau * tau;
        odd = d.c1 * tau;
      } else {
        const double dp = d.D(r + tau), dm = d.D(r - tau);
        even = 0.5 * (dp + dm);
        odd = 0.5 * (dp - dm);
      }
      // kernel sum and difference of the pair:
      //   2 r tau^-p - (outer_plus + outer_minus),  2 tau^(1-p) - (outer_plus - outer_minus)
      const double regular = -even * (outer_plus + outer_minus) - odd * (outer_plus - outer_minus);
      if (tau < tau_taylor) return taylor_singular + regular * dtau;
      const double singular = (2.0 * r * even / tau + 2.0 * odd) * std::pow(tau, 1.0 - pexp);
      return (singular + regular) * dtau;
    };
    sum.ts(integrand, 0.0, 1.0);
  }
  auto mid = [&](double rho) { return d.D(rho) * kern(rho); };
  // inside: panels shrink geometrically towards r - delta
  {
    double b = r - delta;
    double w = delta;
    while (b - w > 0.5 * r) {
      sum.gk(mid, b - w, b);
      b -= w;
      w *= 2.0;
    }
    // kern ~ rho^2 at the origin, so a profile singular there contributes
    // O(rho_cut^(3-beta)) below rho_cut; evaluating it would overflow
    const double rho_cut = d.singular_at_origin ? 1e-100 * r : 0.0;
    sum.ts([&](double rho) { return rho < rho_cut ? 0.0 : mid(rho); }, 0.0, b);
  }
  // outside
  for (double a = r + delta, w = delta; a < R; a += w, w *= 2.0) sum.gk(mid, a, std::min(R, a + w));

  // analytic tail: exact for the constant part, two-term expansion for powers
  double tail = d.d0 * exterior_integral(3, s, r, R) / pref;
  const double kap = far_curvature(3, s);
  double powers = 0.0;
  for (auto [K, th] : d.tail)
    powers += K * (std::pow(R, th - 2.0 * s) / (2.0 * s - th) +
                   kap * r * r * std::pow(R, th - 2.0 - 2.0 * s) / (2.0 + 2.0 * s - th));
  tail += 4.0 * kPi * powers / pref;
  sum.add(tail);
  return p.C_Ns * pref * sum.total();
}

// Any N: shells |x - y| = t around x; the shell integral of D is a single
// polar-angle integral.
double angular_integral(const OperatorParams& p, const Difference& d, double r, const QuadratureConfig& q) {
  const int N = p.N;
  const double s = p.s;
  const double area = sphere_area(N);
  const double delta = near_cutoff(q, r);
  const double T = q.far_factor * (1.0 + r);

  // Pairs z and -z (polar angles theta and pi - theta) so the integrand is
  // the second difference, O(t^2) pointwise instead of only after averaging.
  // gap = t - r, passed separately so shells next to t = r keep it exact
  auto shell_at = [&](double t, double gap) {
    if (N == 1) return d.D(r + t) + d.D(std::abs(gap));
    const double ring = sphere_area(N - 1);
    auto f = [&](double theta) {
      // r^2 + t^2 -+ 2rt cos(theta), written so that |x - z| near 0 does not cancel
      const double sh = std::sin(0.5 * theta);
      const double q = 4.0 * r * t * sh * sh;
      const double plus = std::sqrt((r + t) * (r + t) - q), minus = std::sqrt(gap * gap + q);
      return (d.D(plus) + d.D(minus)) * std::pow(std::sin(theta), N - 2);
    };
    double v;
    if (d.singular_at_origin && std::abs(gap) < 0.5 * r) {
      // the peak at theta = 0 has width about |t - r| / r
      double w = 4.0 * std::abs(gap) / r;
      if (w > 0.25 * kPi) w = 0.5 * kPi;  // no sliver panels next to pi/2
      // scaled to [0, 1]: w can be far below the spacing tanh-sinh tolerates
      v = w * endpoint_singular_integral([&](double u) { return f(w * u); }, 0.0, 1.0);
      if (w < 0.5 * kPi) v += endpoint_singular_integral(f, w, 0.5 * kPi);
    } else {
      v = gauss_kronrod<double, 31>::integrate(f, 0.0, 0.5 * kPi, 8, 1e-2 * q.rel_tol);
    }
    return ring * v;
  };
  auto shell = [&](double t) { return shell_at(t, t - r); };

  PanelSum sum(q);
  near_shells(sum, s, delta, area * d.lap / (2.0 * N), shell);

  std::vector<double> cuts;
  for (double a = delta; a < T; a *= 2.0) cuts.push_back(a);
  cuts.push_back(T);
  for (double extra : {0.5 * r, r, 1.5 * r, 2.0 * r})
    if (extra > delta && extra < T) cuts.push_back(extra);
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
  auto mid = [&](double t) { return shell(t) * std::pow(t, -1.0 - 2.0 * s); };
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    // shells through the origin: t = r at either end of the panel
    const bool near_origin = d.singular_at_origin && (std::abs(cuts[i + 1] - r) < 1e-12 * (1.0 + r) ||
                                                      std::abs(cuts[i] - r) < 1e-12 * (1.0 + r));
    if (near_origin) {
      const double a = cuts[i], b = cuts[i + 1];
      // tc is a - t near the left end and b - t near the right end
      sum.ts(
          [&](double t, double tc) {
            double gap = tc < 0.0 ? (a == r ? -tc : t - r) : (b == r ? -tc : t - r);
            // closer than this a power profile overflows; the sliver left out
            // is O(eps^(N-beta)), below 1e-15 for beta < N - 0.25
            if (std::abs(gap) < 1e-60 * r) gap = std::copysign(1e-60 * r, gap);
            return shell_at(t, gap) * std::pow(t, -1.0 - 2.0 * s);
          },
          a, b);
    } else
      sum.gk(mid, cuts[i], cuts[i + 1]);
  }

  double tail = d.d0 * std::pow(T, -2.0 * s) / (2.0 * s);
  for (auto [K, th] : d.tail)
    tail += K * (std::pow(T, th - 2.0 * s) / (2.0 * s - th) +
                 th * (th + N - 2.0) * r * r / (2.0 * N) * std::pow(T, th - 2.0 - 2.0 * s) / (2.0 + 2.0 * s - th));
  sum.add(area * tail);
  return p.C_Ns * sum.total();
}

double integrate_difference(const OperatorParams& p, const Difference& d, double r, const QuadratureConfig& q) {
  if (!(r >= 0.0) || !std::isfinite(r)) throw DomainError("radius must be finite and >= 0");
  if (r == 0.0) {
    if (d.singular_at_origin) throw DomainError("profile is singular at the origin");
    return origin_integral(p, d, q);
  }
  QuadraturePath path = q.path;
  if (path == QuadraturePath::kAuto) path = p.N == 3 ? QuadraturePath::kClosedKernel : QuadraturePath::kAngular;
  if (path == QuadraturePath::kClosedKernel) {
    if (p.N != 3) throw DomainError("closed radial kernel is only available for N = 3");
    return closed_kernel_integral(p, d, r, q);
  }
  return angular_integral(p, d, r, q);
}

double far_radius(const QuadratureConfig& q, double r) { return q.far_factor * (1.0 + r); }

}  // namespace

double fraclap_quadrature(const OperatorParams& params, const RadialFunction& f, double r,
                          const QuadratureConfig& quad) {
  f.require_fractional_class(params);
  const Difference d = single_difference(params.N, f, r, far_radius(quad, r));
  return integrate_difference(params, d, r, quad);
}

double fraclap_bilinear(const OperatorParams& params, const RadialFunction& f, const RadialFunction& g, double r,
                        const QuadratureConfig& quad) {
  f.require_fractional_class(params);
  g.require_fractional_class(params);
  const double worst = std::max({f.tail_exponent(), g.tail_exponent(), f.tail_exponent() + g.tail_exponent()});
  if (!(worst < 2.0 * params.s))
    throw MembershipError("product of differences grows like r^" + std::to_string(worst) + ", needs < 2s");
  const Difference d = product_difference(params.N, f, g, r, far_radius(quad, r));
  return integrate_difference(params, d, r, quad);
}

double mixed_operator(const OperatorParams& params, const RadialFunction& f, double r, const QuadratureConfig& quad) {
  return f.laplacian(params.N, r) - fraclap_quadrature(params, f, r, quad);
}

// ------------------------------------------------------------ closed form

double PsiClosedForm::literature_constant(const OperatorParams& p, double beta) {
  const double n2 = 0.5 * p.N;
  return std::pow(2.0, 2.0 * p.s) * gamma(n2 + p.s) * gamma(0.5 * beta + p.s) / (gamma(n2) * gamma(0.5 * beta));
}

double PsiClosedForm::hyp(double r) const {
  return gauss_2f1(0.5 * params_.N + params_.s, 0.5 * weight_.beta + params_.s, 0.5 * params_.N, -r * r);
}

double PsiClosedForm::reduced(double r) const {
  return gauss_2f1_complement(-params_.s, 0.5 * weight_.beta + params_.s, 0.5 * params_.N, 1.0 / (1.0 + r * r));
}

PsiClosedForm::PsiClosedForm(const OperatorParams& params, const WeightSpec& weight, const QuadratureConfig& quad)
    : params_(params), weight_(weight) {
  const RadialFunction psi = weight.function();
  // anchor at r = 2 unless the hypergeometric factor nearly vanishes there
  double anchor = 2.0;
  double h = hyp(anchor);
  if (std::abs(h) < 1e-3) {
    anchor = 0.0;
    h = 1.0;
  }
  double q_anchor;
  try {
    q_anchor = fraclap_quadrature(params, psi, anchor, quad);
  } catch (const ConvergenceError& e) {
    throw CalibrationError(std::string("closed-form calibration: anchor quadrature failed: ") + e.what());
  }
  constant_ = q_anchor / h;
  report_.anchor_radius = anchor;
  report_.anchor_quadrature = q_anchor;
  const double floor = 1e-4 * std::abs(constant_);
  for (double rc : {0.5, 8.0}) {
    const double qv = fraclap_quadrature(params, psi, rc, quad);
    const double err = std::abs((*this)(rc) - qv) / std::max(std::abs(qv), floor);
    report_.check_radii.push_back(rc);
    report_.check_relative_errors.push_back(err);
    if (!(err <= kCheckTolerance))
      throw CalibrationError("closed form and quadrature disagree at r=" + std::to_string(rc) +
                             " (relative " + std::to_string(err) + ")");
  }
  report_.literature_constant = literature_constant(params, weight.beta);
  report_.literature_relative_gap = std::abs(report_.literature_constant - constant_) / std::abs(constant_);
}

double PsiClosedForm::operator()(double r) const { return constant_ * hyp(r); }

double PsiClosedForm::mixed(double r) const { return weight_.laplacian(params_.N, r) - (*this)(r); }

double fraclap_psi_closed(const OperatorParams& params, const WeightSpec& weight, double r) {
  return PsiClosedForm(params, weight)(r);
}

// -------------------------------------------------------- property checks

Prop5Report check_prop5(const OperatorParams& params, const RadialFunction& f, const std::vector<double>& grid,
                        double tol, const QuadratureConfig& quad) {
  Prop5Report rep;
  const double k = params.N - 2.0 * params.s + 1.0;
  for (double r : grid) {
    Prop5Point pt{};
    pt.r = r;
    pt.ode_value = r == 0.0 ? (k + 1.0) * f.d2(0.0) : f.d2(r) + k / r * f.d1(r);
    pt.ode_holds = pt.ode_value <= 1e-12 * (std::abs(f.d2(r)) + 1e-300);
    pt.fraclap = fraclap_quadrature(params, f, r, quad);
    if (!pt.ode_holds) {
      rep.hypothesis_everywhere = false;
      if (rep.failure_onset < 0.0 || r < rep.failure_onset) rep.failure_onset = r;
    } else if (pt.fraclap < -tol) {
      rep.sign_violations.push_back(r);
    }
    rep.points.push_back(pt);
  }
  rep.pass = rep.sign_violations.empty();
  return rep;
}

ProductRuleResult product_rule_check(const OperatorParams& params, const RadialFunction& f, const RadialFunction& g,
                                     double r, const QuadratureConfig& quad) {
  const double lfg = fraclap_quadrature(params, f * g, r, quad);
  const double fl = f(r) * fraclap_quadrature(params, g, r, quad);
  const double gl = g(r) * fraclap_quadrature(params, f, r, quad);
  const double b = fraclap_bilinear(params, f, g, r, quad);
  return {std::abs(lfg - fl - gl + b), std::abs(lfg) + std::abs(fl) + std::abs(gl) + std::abs(b)};
}

double convexity_check(const OperatorParams& params, const RadialFunction& f, double r, const QuadratureConfig& quad) {
  return 2.0 * f(r) * fraclap_quadrature(params, f, r, quad) - fraclap_quadrature(params, f * f, r, quad);
}

}  // namespace mixlap
