#pragma once

#include <vector>

#include "mixlap/operator_params.hpp"
#include "mixlap/radial_function.hpp"

namespace mixlap {

enum class QuadraturePath {
  kAuto,          // closed radial kernel when N = 3, angular otherwise
  kClosedKernel,  // N = 3 only
  kAngular,       // shells |x - y| = t with an inner polar-angle integral
};

struct QuadratureConfig {
  double panel_abs_tol = 1e-10;
  double rel_tol = 1e-8;
  unsigned max_depth = 15;  // Gauss-Kronrod bisection depth per panel
  int panel_cap = 400;
  // near-field cutoff delta = min(near_cap, near_scale * (1 + r))
  double near_cap = 0.1;
  double near_scale = 0.01;
  // analytic tail beyond far_factor * (1 + r)
  double far_factor = 1e3;
  QuadraturePath path = QuadraturePath::kAuto;
};

// (-Delta)^s f at a point of radius r, by direct quadrature of the
// singular integral.
double fraclap_quadrature(const OperatorParams& params, const RadialFunction& f, double r,
                          const QuadratureConfig& quad = {});

// B(f,g)(x) = C_Ns * integral of (f(x)-f(y))(g(x)-g(y)) |x-y|^(-N-2s) dy.
double fraclap_bilinear(const OperatorParams& params, const RadialFunction& f, const RadialFunction& g, double r,
                        const QuadratureConfig& quad = {});

// Delta f - (-Delta)^s f.
double mixed_operator(const OperatorParams& params, const RadialFunction& f, double r,
                      const QuadratureConfig& quad = {});

struct CalibrationReport {
  double anchor_radius = 0.0;
  double anchor_quadrature = 0.0;
  std::vector<double> check_radii;
  std::vector<double> check_relative_errors;
  double literature_constant = 0.0;
  double literature_relative_gap = 0.0;
};

// (-Delta)^s psi_beta(r) = Cc * 2F1(N/2+s, beta/2+s; N/2; -r^2), with the
// scalar Cc fitted to quadrature at r = 2 and checked at r = 0.5 and r = 8.
class PsiClosedForm {
 public:
  PsiClosedForm(const OperatorParams& params, const WeightSpec& weight, const QuadratureConfig& quad = {});

  double operator()(double r) const;
  // Delta psi - (-Delta)^s psi.
  double mixed(double r) const;
  // 2F1(-s, beta/2+s; N/2; r^2/(1+r^2)), i.e. the closed form with the
  // algebraic factor (1+r^2)^(-beta/2-s) and Cc removed.
  double reduced(double r) const;

  double constant() const noexcept { return constant_; }
  const CalibrationReport& calibration() const noexcept { return report_; }
  const OperatorParams& params() const noexcept { return params_; }
  const WeightSpec& weight() const noexcept { return weight_; }

  // 2^(2s) Gamma(N/2+s) Gamma(beta/2+s) / (Gamma(N/2) Gamma(beta/2))
  static double literature_constant(const OperatorParams& params, double beta);

  // Rejection threshold for the two check radii.
  static constexpr double kCheckTolerance = 1e-4;

 private:
  double hyp(double r) const;

  OperatorParams params_;
  WeightSpec weight_;
  double constant_ = 0.0;
  CalibrationReport report_;
};

double fraclap_psi_closed(const OperatorParams& params, const WeightSpec& weight, double r);

struct Prop5Point {
  double r;
  double ode_value;  // w'' + (N-2s+1)/r w'
  bool ode_holds;
  double fraclap;
};

struct Prop5Report {
  std::vector<Prop5Point> points;
  bool hypothesis_everywhere = true;
  // smallest grid radius where the ODE inequality fails, or -1
  double failure_onset = -1.0;
  // grid radii where the inequality held locally and (-Delta)^s f < -tol
  std::vector<double> sign_violations;
  bool pass = true;
};

// Where w'' + (N-2s+1)/r w' <= 0 holds on the grid, checks (-Delta)^s w >= -tol.
Prop5Report check_prop5(const OperatorParams& params, const RadialFunction& f, const std::vector<double>& grid,
                        double tol = 1e-8, const QuadratureConfig& quad = {});

struct ProductRuleResult {
  double residual;  // |(-D)^s(fg) - f(-D)^s g - g(-D)^s f + B(f,g)|
  double scale;     // sum of the magnitudes of the four terms
};

ProductRuleResult product_rule_check(const OperatorParams& params, const RadialFunction& f, const RadialFunction& g,
                                     double r, const QuadratureConfig& quad = {});

// 2 f (-Delta)^s f - (-Delta)^s f^2, each side by its own quadrature.
double convexity_check(const OperatorParams& params, const RadialFunction& f, double r,
                       const QuadratureConfig& quad = {});

}  // namespace mixlap
