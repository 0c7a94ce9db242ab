// Acceptance run: one PASS/FAIL line per criterion, with the measured
// numbers behind each verdict. Exit status is 0 in report mode and the
// number of failing criteria with --strict.

#include <chrono>
#include <algorithm>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <cstring>
#include <functional>
#include <random>
#include <string>
#include <tuple>
#include <vector>

#include "mixlap/certificates.hpp"
#include "mixlap/dirichlet.hpp"
#include "mixlap/errors.hpp"
#include "mixlap/parabolic.hpp"
#include "mixlap/radial_fraclap.hpp"

using namespace mixlap;

namespace {

struct Verdict {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, ...) __attribute__((format(printf, 1, 2)));
std::string fmt(const char* f, ...) {
  char buf[1024];
  va_list ap;
  va_start(ap, f);
  std::vsnprintf(buf, sizeof buf, f, ap);
  va_end(ap);
  return buf;
}

std::vector<double> logspace(double a, double b, int n) {
  std::vector<double> v(n);
  for (int k = 0; k < n; ++k) v[k] = a * std::pow(b / a, double(k) / (n - 1));
  return v;
}

double loglog_slope(const std::vector<double>& r, const std::vector<double>& y) {
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double n = double(r.size());
  for (size_t k = 0; k < r.size(); ++k) {
    const double x = std::log(r[k]), z = std::log(std::abs(y[k]));
    sx += x;
    sy += z;
    sxx += x * x;
    sxy += x * z;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

// 1. closed form vs quadrature on the 3x3x4 lattice, r in [0, 20]
Verdict oracle_equivalence() {
  std::vector<double> radii{0.0, 0.3, 1.0, 2.7, 5.0, 11.0, 20.0};
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> u(0.0, 20.0);
  for (int k = 0; k < 5; ++k) radii.push_back(u(rng));
  double worst = 0.0;
  std::string where;
  int cases = 0;
  for (int N : {2, 3, 4})
    for (double s : {0.25, 0.5, 0.75})
      for (double beta : {N - 2 * s - 0.1, N - 1.0, double(N), N + 0.2}) {
        if (!(beta > 0.0)) continue;
        ++cases;
        const auto P = OperatorParams::make(N, s);
        const PsiClosedForm cf(P, WeightSpec(beta));
        const auto psi = RadialFunction::weight(beta);
        const double floor = 1e-4 * std::abs(cf.constant());
        for (double r : radii) {
          const double q = fraclap_quadrature(P, psi, r);
          const double e = std::abs(cf(r) - q) / std::max(std::abs(q), floor);
          if (e > worst) {
            worst = e;
            where = fmt("N=%d s=%g beta=%g r=%.3g", N, s, beta, r);
          }
        }
      }
  return {worst <= 1e-5, fmt("%d cases x %zu radii, max rel err %.2e at %s", cases, radii.size(), worst, where.c_str())};
}

// 2. far-field slopes over [1e2, 1e4]. The closed form (checked against
// quadrature in criterion 1) gives the slopes on the whole lattice; two
// cases are repeated with quadrature.
Verdict asymptotic_slopes() {
  const auto window = logspace(1e2, 1e4, 9), far = logspace(1e6, 1e8, 9);
  int pass = 0, total = 0;
  double worst = 0.0, worst_far = 0.0;
  std::string fails;
  for (int N : {2, 3, 4})
    for (double s : {0.25, 0.5, 0.75})
      for (double beta : {N - s, N + 0.5}) {
        const auto P = OperatorParams::make(N, s);
        const PsiClosedForm cf(P, WeightSpec(beta));
        auto slope_on = [&](const std::vector<double>& rr) {
          std::vector<double> y;
          for (double r : rr) y.push_back(cf(r));
          return loglog_slope(rr, y);
        };
        const double want = beta > N ? -(2 * s + N) : -(2 * s + beta);
        const double err = std::abs(slope_on(window) / want - 1.0);
        worst_far = std::max(worst_far, std::abs(slope_on(far) / want - 1.0));
        ++total;
        if (err <= 0.02) {
          ++pass;
        } else {
          fails += fmt(" (N=%d s=%g b=%g %.1f%%)", N, s, beta, 100 * err);
        }
        worst = std::max(worst, err);
      }
  // quadrature cross-check of the window slope
  double cross = 0.0;
  for (auto [N, s, beta] : {std::tuple{3, 0.25, 3.2}, std::tuple{2, 0.5, 1.5}}) {
    const auto P = OperatorParams::make(N, s);
    const auto psi = RadialFunction::weight(beta);
    const PsiClosedForm cf(P, WeightSpec(beta));
    std::vector<double> yq, yc;
    for (double r : window) {
      yq.push_back(fraclap_quadrature(P, psi, r));
      yc.push_back(cf(r));
    }
    cross = std::max(cross, std::abs(loglog_slope(window, yq) - loglog_slope(window, yc)));
  }
  return {pass == total && cross <= 1e-3,
          fmt("%d/%d lattice cases within 2%% on [1e2,1e4] (worst %.1f%%); on [1e6,1e8] worst %.2f%%; "
              "quadrature vs closed slope %.1e; outside:%s",
              pass, total, 100 * worst, 100 * worst_far, cross, fails.empty() ? " none" : fails.c_str())};
}

// 3. certificates at 1.1x and 0.5x threshold
Verdict certificates() {
  const auto P = OperatorParams::make(3, 0.25);
  struct Case { Regime r; double beta, alpha; };
  bool above = true, below = true;
  std::string d;
  for (const Case c : {Case{Regime::kI, 2.4, 1.0}, Case{Regime::kII, 2.75, 0.3}, Case{Regime::kIII, 3.0, 0.3},
                       Case{Regime::kIV, 3.2, 0.3}}) {
    const auto t = threshold_pc0(c.r, P, c.beta, CoefficientModel::lower_bound(c.alpha, 1.0, 1.0));
    const Certificate hi = certify_elliptic(c.r, P, c.beta, 1.0, CoefficientModel::lower_bound(c.alpha, 1.0, 1.1 * t.threshold));
    above = above && hi.pass;
    std::string lo_txt = "-";
    if (c.r != Regime::kI) {
      const Certificate lo =
          certify_elliptic(c.r, P, c.beta, 1.0, CoefficientModel::lower_bound(c.alpha, 1.0, 0.5 * t.threshold));
      const bool found = lo.max_margin >= 0.0;
      below = below && found;
      lo_txt = fmt("%s(max %.2e)", found ? "nonneg" : "all-neg", lo.max_margin);
    }
    d += fmt("%s%s thr=%.3g 1.1x:%s 0.5x:%s", d.empty() ? "" : "; ", to_string(c.r), t.threshold,
             hi.pass ? "pass" : "fail", lo_txt.c_str());
  }
  return {above && below, d};
}

// 4. homogeneity of r^(-beta) and the barrier's theta spread
Verdict homogeneity() {
  double worst = 0.0;
  for (int N : {2, 3, 4})
    for (double s : {0.25, 0.5, 0.75})
      for (double beta : {0.3, N - 0.3}) {  // away from the s-harmonic N - 2s
        const auto P = OperatorParams::make(N, s);
        const auto v = RadialFunction::power(beta);
        const double a = fraclap_quadrature(P, v, 2.0), b = fraclap_quadrature(P, v, 4.0);
        worst = std::max(worst, std::abs(b / a / std::pow(2.0, -beta - 2 * s) - 1.0));
      }
  const auto B = lemma5_barrier(OperatorParams::make(3, 0.25), 1.0, 1.0, 1.0);
  const bool ok = worst <= 1e-6 && B.report.theta_spread <= 1e-6;
  return {ok, fmt("doubling ratio max rel err %.2e; barrier theta %.10f spread %.2e", worst, B.report.theta,
                  B.report.theta_spread)};
}

// 5. weak maximum principle
Verdict maximum_principle() {
  const DirichletProblem pr{OperatorParams::make(3, 0.25), CoefficientModel::upper_bound(1.0, 1.0, 1.0), 1.0,
                            RadialGrid::uniform(20.0, 1000), {}};
  const WmpReport ok = wmp_check(pr, 100, 7);
  WmpOptions f;
  f.inject_fault = true;
  const WmpReport bad = wmp_check(pr, 100, 7, f);
  return {ok.pass && ok.nonnegative_passes == 100 && !bad.pass,
          fmt("%d/100 nonnegative (min %.2e); fault injection %s (min %.2e)", ok.nonnegative_passes, ok.min_value,
              bad.pass ? "not detected" : "detected", bad.min_value)};
}

// 6. nonuniqueness: exhaustion limits with alpha = 1
Verdict nonuniqueness() {
  const auto P = OperatorParams::make(3, 0.25);
  const auto co = CoefficientModel::upper_bound(1.0, 1.0, 1.0);
  ExhaustionOptions opt;
  opt.intervals = 2000;
  const auto r1 = exhaustion_experiment(P, co, 1.0, {10, 20, 40, 80}, opt);
  const auto r2 = exhaustion_experiment(P, co, 2.0, {10, 20, 40, 80}, opt);
  const double gap1 = r1.center_gaps.back(), gap2 = r2.center_gaps.back();
  const bool cauchy = gap1 <= 1e-3 && gap2 <= 1e-3 && r1.gaps_shrink && r2.gaps_shrink;
  const double split = std::abs(r2.runs.back().center_value - r1.runs.back().center_value);
  const double cover = std::min(r1.min_coverage, r2.min_coverage);
  const bool ok = cauchy && split >= 0.3 && r1.bounds_hold && r2.bounds_hold && cover >= 0.99;
  std::string centers;
  for (const auto& r : r1.runs) centers += fmt(" %.5f", r.center_value);
  return {ok, fmt("eta=1 centers%s; final gaps %.2e / %.2e (need <= 1e-3, shrinking %d/%d); limit split %.3f; "
                  "bounds %d/%d; barrier coverage %.3f",
                  centers.c_str(), gap1, gap2, r1.gaps_shrink, r2.gaps_shrink, split, r1.bounds_hold,
                  r2.bounds_hold, cover)};
}

// 7. uniqueness collapse with alpha = 0
Verdict collapse() {
  const auto P = OperatorParams::make(3, 0.25);
  const double beta = 3.4;  // N + 2s - 0.1
  const auto t = threshold_pc0(Regime::kIV, P, beta, CoefficientModel::lower_bound(0.0, 1.0, 1.0));
  ExhaustionOptions opt;
  opt.intervals = 2000;
  opt.barrier = false;
  const auto rep =
      exhaustion_experiment(P, CoefficientModel::lower_bound(0.0, 1.0, 1.1 * t.threshold), 1.0, {10, 20, 40, 80}, opt);
  const double u10 = rep.runs.front().center_value, u80 = rep.runs.back().center_value;
  const double ratio = std::abs(u80) / std::abs(u10);
  return {rep.center_decreasing && ratio <= 0.1,
          fmt("c0=%.3g; u(0): %.3e %.3e %.3e %.3e; decreasing %d; |u80|/|u10| = %.3f (need <= 0.1)", 1.1 * t.threshold,
              rep.runs[0].center_value, rep.runs[1].center_value, rep.runs[2].center_value, rep.runs[3].center_value,
              rep.center_decreasing, ratio)};
}

// 8. parabolic checks
Verdict parabolic() {
  const auto P = OperatorParams::make(3, 0.25);
  ParabolicRun run{DirichletProblem{P, CoefficientModel::upper_bound(1.0, 1.0, 1.0), 0.0,
                                    RadialGrid::uniform(10.0, 400), {}},
                   {}, 1e-2, 1.0, {}};
  const auto z = zero_uniqueness_check(run, 1000);
  ParabolicRun ss_run = run;
  ss_run.problem.eta = 1.0;
  ss_run.dt = 1.0;
  const auto ss = steady_state(ss_run);
  const auto lb = CoefficientModel::lower_bound(0.3, 1.0, 1.0);
  const auto t = threshold_lambda(Regime::kIV, P, 3.2, lb);
  const bool above = lambda_certificate(Regime::kIV, P, 3.2, lb, 1.1 * t.threshold).pass;
  const bool at0 = lambda_certificate(Regime::kIV, P, 3.2, lb, 0.0).pass;
  const bool ok = z.max_abs <= 1e-12 && ss.converged && ss.max_gap_to_elliptic <= 1e-8 && above && !at0;
  return {ok, fmt("zero run max %.1e over %d steps; steady gap %.1e after %d steps; lambda 1.1x thr %s, 0 %s",
                  z.max_abs, z.steps, ss.max_gap_to_elliptic, ss.steps, above ? "pass" : "fail",
                  at0 ? "pass" : "fail")};
}

// 9. product rule, convexity, symmetry and coercivity
Verdict structural() {
  const auto P = OperatorParams::make(3, 0.25);
  const auto psi1 = RadialFunction::weight(1.0), psi2 = RadialFunction::weight(2.0), psi3 = RadialFunction::weight(3.0);
  const auto one = RadialFunction::constant(1.0);
  double worst_pr = 0.0;
  auto pr = [&](const RadialFunction& f, const RadialFunction& g, double r) {
    const auto res = product_rule_check(P, f, g, r);
    worst_pr = std::max(worst_pr, res.residual / std::max(res.scale, 1e-300));
  };
  pr(psi2, psi2, 1.0);
  pr(psi1, psi3, 0.0);
  pr(psi2, one, 1.0);
  const RadialFunction wiggle(
      [](double r) { return 1.0 + std::sin(r) / 4.0; }, [](double r) { return std::cos(r) / 4.0; },
      [](double r) { return -std::sin(r) / 4.0; }, 0.0, "1+sin/4");
  double min_cv = INFINITY;
  for (double r : {0.0, 1.0, 5.0}) min_cv = std::min(min_cv, convexity_check(P, psi2, r));
  min_cv = std::min(min_cv, convexity_check(P, psi1 * wiggle, 2.0));
  min_cv = std::min(min_cv, convexity_check(P, RadialFunction::constant(2.0), 1.0));

  const DirichletProblem prob{P, CoefficientModel::upper_bound(1.0, 1.0, 1.0), 1.0, RadialGrid::uniform(20.0, 1000),
                              {}};
  const DirichletSystem sys = assemble(prob);
  const Eigen::MatrixXd W = sys.weighted_nonlocal_block();
  const double asym = (W - W.transpose()).cwiseAbs().maxCoeff() / W.cwiseAbs().maxCoeff();
  std::mt19937_64 rng(99);
  std::normal_distribution<double> g;
  int coercive = 0;
  for (int k = 0; k < 20; ++k) {
    Eigen::VectorXd v(sys.size());
    for (auto& x : v) x = g(rng);
    const Eigen::VectorXd Wv = W * v;
    if (v.dot(Wv) > 0.0 && sys.energy(v) > 0.0) ++coercive;
  }
  const bool ok = worst_pr <= 1e-5 && min_cv >= -1e-8 && asym <= 1e-12 && coercive == 20;
  return {ok, fmt("product rule residual/scale %.1e; min convexity margin %.2e; asymmetry %.1e; coercive %d/20",
                  worst_pr, min_cv, asym, coercive)};
}

}  // namespace

int main(int argc, char** argv) {
  bool strict = false;
  std::vector<int> only;
  for (int i = 1; i < argc; ++i) {
    if (!std::strcmp(argv[i], "--strict"))
      strict = true;
    else
      only.push_back(std::atoi(argv[i]));
  }
  const std::vector<std::pair<const char*, std::function<Verdict()>>> criteria = {
      {"oracle equivalence", oracle_equivalence}, {"asymptotic slopes", asymptotic_slopes},
      {"certificates", certificates},             {"homogeneity", homogeneity},
      {"maximum principle", maximum_principle},   {"nonuniqueness", nonuniqueness},
      {"uniqueness collapse", collapse},          {"parabolic", parabolic},
      {"structural numerics", structural},
  };
  int failed = 0;
  for (size_t k = 0; k < criteria.size(); ++k) {
    const int id = int(k) + 1;
    if (!only.empty() && std::find(only.begin(), only.end(), id) == only.end()) continue;
    const auto t0 = std::chrono::steady_clock::now();
    Verdict v;
    try {
      v = criteria[k].second();
    } catch (const std::exception& e) {
      v = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    failed += !v.pass;
    std::printf("%s %d %s [%.1fs]: %s\n", v.pass ? "PASS" : "FAIL", id, criteria[k].first, secs, v.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d criteria failed\n", failed);
  return strict ? failed : 0;
}
