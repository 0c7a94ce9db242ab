#pragma once

#include <optional>
#include <string>
#include <vector>

#include "mixlap/operator_params.hpp"
#include "mixlap/radial_fraclap.hpp"
#include "mixlap/radial_function.hpp"

namespace mixlap {

// The four (beta, alpha) cases in which psi_beta certifies uniqueness.
enum class Regime { kI, kII, kIII, kIV };

const char* to_string(Regime r);
Regime regime_from_string(const std::string& name);

// Which inequality a certificate verifies.
enum class CertificateKind {
  kElliptic,         // L psi - p rho c psi < 0
  kParabolicLambda,  // L psi - lambda rho psi < 0
  kBarrier,          // L V <= -rho for V = C r^(-beta)
};

const char* to_string(CertificateKind k);

enum class CoefficientMode { kLowerBound, kUpperBound };

const char* to_string(CoefficientMode m);

// rho and c together with the bounds they are supposed to satisfy:
//   lower: rho >= C0 (1+r^2)^(-alpha/2)
//   upper: 0 < rho <= c0 (1+r^2)^(-alpha/2) for r > r0
// and c >= c0 in both modes.
struct CoefficientModel {
  double alpha = 0.0;
  double C0 = 1.0;
  double c0 = 1.0;
  CoefficientMode mode = CoefficientMode::kLowerBound;
  double r0 = 1.0;
  RadialCallable rho;
  RadialCallable c;

  // rho = C0 (1+r^2)^(-alpha/2), c = c0.
  static CoefficientModel lower_bound(double alpha, double C0, double c0);
  // rho = rho_scale (1+r^2)^(-alpha/2) with rho_scale <= c0, c = c0.
  static CoefficientModel upper_bound(double alpha, double c0, double r0, std::optional<double> rho_scale = {});

  // Bound violations found on the sampled radii (empty when consistent).
  std::vector<std::string> violations(const std::vector<double>& radii) const;
  // Throws DomainError listing the first violation.
  void validate(const std::vector<double>& radii) const;
};

// True when (N, s, alpha, beta) satisfies the hypotheses of the regime.
bool regime_preconditions_hold(Regime regime, const OperatorParams& params, double alpha, double beta);
std::string regime_precondition_text(Regime regime);

struct ThresholdResult {
  double threshold = 0.0;       // minimal p c0 (or lambda) the construction needs
  double epsilon = 0.0;         // distance allowed from the far-field limit
  double R_eps = 0.0;           // prefactor within epsilon of its limit beyond R_eps
  double M_eps_beta = 0.0;      // max |(-Delta)^s psi| on the ball of radius R_eps
  double far_field_bound = 0.0;
  double compact_bound = 0.0;
  double far_constant = 0.0;    // C1, C2 or C3 (0 in regime i)
  double closed_constant = 0.0; // calibrated Cc (0 in regime i)
};

struct ThresholdOptions {
  std::optional<double> epsilon;  // default 0.1 * far-field constant
  double r_cap = 1e15;
  double bisection_tol = 1e-3;
  QuadratureConfig quad;
};

// Regime preconditions are enforced here (RegimeError).
ThresholdResult threshold_pc0(Regime regime, const OperatorParams& params, double beta, const CoefficientModel& coeff,
                              const ThresholdOptions& options = {});

// Same construction with lambda in place of p c0.
ThresholdResult threshold_lambda(Regime regime, const OperatorParams& params, double beta,
                                 const CoefficientModel& coeff, const ThresholdOptions& options = {});

// 0, 50 uniform radii on [0, 1] and 400 log-spaced radii up to max(100, 10 R_eps).
std::vector<double> default_certificate_grid(double R_eps);

struct Certificate {
  CertificateKind kind = CertificateKind::kElliptic;
  std::string regime;  // "i".."iv" or "lemma5"
  OperatorParams params;
  double alpha = 0.0;
  double beta = 0.0;
  double p = 1.0;
  double c0 = 0.0;
  double C0 = 0.0;
  double lambda = 0.0;
  double threshold = 0.0;
  double epsilon = 0.0;
  double R_eps = 0.0;
  double M_eps_beta = 0.0;
  std::vector<double> grid;
  std::vector<double> margins;
  std::vector<double> margin_floors;
  bool pass = false;
  // smallest radius with margin > -floor, if any
  std::optional<double> first_violation;
  double max_margin = 0.0;
  bool growth_bound_holds = true;  // psi + |psi'| <= (1+beta) psi
  bool preconditions_hold = true;
  std::vector<std::string> warnings;

  std::string to_json(int indent = 2) const;
};

struct CertifyOptions {
  double safety = 0.1;
  ThresholdOptions threshold;
};

// Margins of L psi_beta - p rho c psi_beta on the grid (default grid when
// empty). Threshold and precondition problems become warnings.
Certificate certify_elliptic(Regime regime, const OperatorParams& params, double beta, double p,
                             const CoefficientModel& coeff, const std::vector<double>& grid = {},
                             const CertifyOptions& options = {});

// Margins of L psi_beta - lambda rho psi_beta.
Certificate certify_parabolic_lambda(Regime regime, const OperatorParams& params, double beta,
                                     const CoefficientModel& coeff, double lambda,
                                     const std::vector<double>& grid = {}, const CertifyOptions& options = {});

struct BarrierReport {
  double beta = 0.0;
  double C = 0.0;
  int doublings = 0;
  double theta = 0.0;                // r^(beta+2s) (-Delta)^s r^(-beta)
  std::vector<double> theta_radii;
  std::vector<double> theta_values;
  double theta_spread = 0.0;         // (max - min) / |mean|
  double theta_literature = 0.0;
  double r_min = 0.0;                // grid starts above max(1, r0)
  std::vector<double> grid;
  std::vector<double> decay_margins;  // L V + theta C r^(-beta-2s)   (<= 0)
  std::vector<double> rho_margins;    // L V + 1.1 rho_max             (<= 0)
  bool decay_holds = false;
  bool rho_bound_holds = false;
  bool nonnegative = false;
  double m0 = 0.0;                    // V >= m0 on the ball of radius max(1, r0)
  bool vanishes_at_infinity = false;
  bool pass = false;

  Certificate certificate(const OperatorParams& params, double alpha, double c0) const;
};

struct BarrierResult {
  RadialFunction V;
  double beta;
  BarrierReport report;
};

struct BarrierOptions {
  double r_max = 1e4;
  int grid_points = 200;
  double margin = 0.1;  // L V <= -(1 + margin) rho
  int max_doublings = 40;
  std::vector<double> theta_radii{2.0, 4.0, 8.0};
  QuadratureConfig quad;
};

// V = C r^(-beta) with beta = min(N-2, alpha-2s)/2; rho is bounded by
// c0 (1+r^2)^(-alpha/2). Requires alpha > 2s and N > 2 (DomainError).
BarrierResult lemma5_barrier(const OperatorParams& params, double alpha, double c0, double r0, double C_scale = 1.0,
                             const BarrierOptions& options = {});

}  // namespace mixlap
