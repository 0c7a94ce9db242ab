#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "mixlap/certificates.hpp"
#include "mixlap/errors.hpp"
#include "mixlap/special_functions.hpp"
#include "oracles.hpp"

using namespace mixlap;

namespace {
const OperatorParams P = OperatorParams::make(3, 0.25);
}

TEST_CASE("regime i threshold is zero below N - 2 and explicit above") {
  const auto co = CoefficientModel::lower_bound(1.0, 1.0, 1.0);
  CHECK(threshold_pc0(Regime::kI, P, 0.8, co).threshold == 0.0);
  CHECK(threshold_pc0(Regime::kI, P, 2.4, co).threshold == doctest::Approx(2.4 * 1.4));
  const auto co2 = CoefficientModel::lower_bound(1.0, 2.0, 1.0);
  CHECK(threshold_pc0(Regime::kI, P, 2.4, co2).threshold == doctest::Approx(2.4 * 1.4 / 2.0));
}

TEST_CASE("preconditions") {
  CHECK(regime_preconditions_hold(Regime::kI, P, 1.0, 2.4));
  CHECK_FALSE(regime_preconditions_hold(Regime::kI, P, 1.0, 2.6));  // beta must stay below N - 2s
  CHECK(regime_preconditions_hold(Regime::kII, P, 0.3, 2.75));
  CHECK_FALSE(regime_preconditions_hold(Regime::kII, P, 0.6, 2.75));  // alpha <= 2s
  CHECK(regime_preconditions_hold(Regime::kIII, P, 0.3, 3.0));
  CHECK_FALSE(regime_preconditions_hold(Regime::kIII, P, 0.3, 3.1));
  CHECK(regime_preconditions_hold(Regime::kIV, P, 0.3, 3.2));
  const auto co = CoefficientModel::lower_bound(0.3, 1.0, 1.0);
  CHECK_THROWS_AS(threshold_pc0(Regime::kIII, P, 2.9, co), RegimeError);
  CHECK(regime_from_string("iii") == Regime::kIII);
  CHECK_THROWS(regime_from_string("v"));
}

TEST_CASE("above-threshold certificates pass in all regimes") {
  struct Case { Regime r; double beta, alpha; };
  for (const Case c : {Case{Regime::kI, 2.4, 1.0}, Case{Regime::kII, 2.75, 0.3}, Case{Regime::kIII, 3.0, 0.3},
                       Case{Regime::kIV, 3.2, 0.3}}) {
    CAPTURE(to_string(c.r));
    const auto t = threshold_pc0(c.r, P, c.beta, CoefficientModel::lower_bound(c.alpha, 1.0, 1.0));
    CHECK(std::isfinite(t.threshold));
    const auto co = CoefficientModel::lower_bound(c.alpha, 1.0, 1.1 * std::max(t.threshold, 1.0));
    const Certificate cert = certify_elliptic(c.r, P, c.beta, 1.0, co);
    CHECK(cert.pass);
    CHECK(cert.growth_bound_holds);
    CHECK(cert.max_margin < 0.0);
    CHECK_FALSE(cert.first_violation.has_value());
  }
}

TEST_CASE("threshold grows when epsilon shrinks") {
  const auto co = CoefficientModel::lower_bound(0.3, 1.0, 1.0);
  ThresholdOptions a, b;
  a.epsilon = 0.2 * far_field_constant(P, 3.2).value;
  b.epsilon = 0.05 * far_field_constant(P, 3.2).value;
  const auto ta = threshold_pc0(Regime::kIV, P, 3.2, co, a);
  const auto tb = threshold_pc0(Regime::kIV, P, 3.2, co, b);
  CHECK(tb.R_eps > ta.R_eps);
  CHECK(tb.threshold >= ta.threshold);
}

TEST_CASE("precondition failure makes the verdict fail") {
  const auto co = CoefficientModel::lower_bound(2.2, 1.0, 10.0);
  const Certificate cert = certify_elliptic(Regime::kI, P, 2.6, 1.0, co);
  CHECK_FALSE(cert.preconditions_hold);
  CHECK_FALSE(cert.pass);
  CHECK_FALSE(cert.warnings.empty());
}

TEST_CASE("lambda certificate passes above threshold and fails at zero") {
  const auto co = CoefficientModel::lower_bound(0.3, 1.0, 1.0);
  const auto t = threshold_lambda(Regime::kIV, P, 3.2, co);
  CHECK(t.threshold == doctest::Approx(threshold_pc0(Regime::kIV, P, 3.2, co).threshold));
  CHECK(certify_parabolic_lambda(Regime::kIV, P, 3.2, co, 1.1 * t.threshold).pass);
  const Certificate zero = certify_parabolic_lambda(Regime::kIV, P, 3.2, co, 0.0);
  CHECK_FALSE(zero.pass);
  CHECK(zero.first_violation.has_value());
}

TEST_CASE("certificate json carries the margins") {
  const auto co = CoefficientModel::lower_bound(1.0, 1.0, 10.0);
  const Certificate cert = certify_elliptic(Regime::kI, P, 2.4, 1.0, co, {0.0, 1.0, 10.0});
  const std::string js = cert.to_json();
  CHECK(js.find("\"margins\"") != std::string::npos);
  CHECK(js.find("\"regime\": \"i\"") != std::string::npos);
}

TEST_CASE("coefficient model bounds") {
  const auto lo = CoefficientModel::lower_bound(1.0, 2.0, 3.0);
  CHECK(lo.violations({0.0, 1.0, 100.0}).empty());
  auto up = CoefficientModel::upper_bound(1.0, 1.0, 1.0);
  CHECK(up.violations({0.0, 2.0, 50.0}).empty());
  up.rho = [](double) { return 5.0; };
  CHECK_FALSE(up.violations({2.0, 50.0}).empty());
  CHECK_THROWS_AS(up.validate({2.0}), DomainError);
}

TEST_CASE("barrier measures the homogeneity constant and dominates rho") {
  const BarrierResult b = lemma5_barrier(P, 1.0, 1.0, 1.0);
  CHECK(b.beta == doctest::Approx(0.25));
  CHECK(b.report.theta_spread <= 1e-6);
  CHECK(std::abs(b.report.theta / oracles::kPowerTheta[0].value - 1.0) < 1e-6);
  CHECK(b.report.pass);
  CHECK(b.report.decay_holds);
  CHECK(b.report.rho_bound_holds);
  CHECK(b.report.vanishes_at_infinity);
  CHECK_THROWS_AS(lemma5_barrier(P, 0.4, 1.0, 1.0), DomainError);  // alpha <= 2s
}

TEST_CASE("default grid covers the far field") {
  const auto g = default_certificate_grid(1e5);
  CHECK(g.front() == 0.0);
  CHECK(g.back() == doctest::Approx(1e6));
  CHECK(std::is_sorted(g.begin(), g.end()));
}
