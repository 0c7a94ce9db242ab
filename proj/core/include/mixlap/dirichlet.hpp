#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "mixlap/certificates.hpp"
#include "mixlap/operator_params.hpp"
#include "mixlap/radial_function.hpp"

namespace mixlap {

enum class Grading { kUniform, kGraded };

// Nodes 0 = r_0 < ... < r_M = radius. The unknowns sit at r_0 .. r_{M-1};
// r_M carries the exterior value.
struct RadialGrid {
  double radius = 0.0;
  std::vector<double> nodes;
  Grading grading = Grading::kUniform;
  double power = 1.0;

  static RadialGrid uniform(double radius, int intervals);
  // Refined towards both r = 0 and r = radius with the given power (>= 1).
  static RadialGrid graded(double radius, int intervals, double power);

  int intervals() const { return static_cast<int>(nodes.size()) - 1; }
  double min_spacing() const;
  void validate() const;
};

struct DirichletProblem {
  OperatorParams params;
  CoefficientModel coeff;
  double eta = 0.0;  // constant value outside the ball
  RadialGrid grid;
  RadialCallable f;  // source; empty means zero

  // rho c >= 0 on all nodes, grid valid.
  void validate() const;
};

// A u = b for the interior unknowns, where A discretises -L + rho c.
// Row i: finite-volume Laplacian with the near-field correction folded into
// its coefficient, plus C_Ns sum_j Kbar(r_i, r_j) V_j (u_i - u_j), plus the
// exterior coupling X_i u_i. diag(volumes) (A - diag(potential)) is symmetric.
struct DirichletSystem {
  Eigen::MatrixXd A;
  Eigen::VectorXd b;
  Eigen::VectorXd volumes;           // cell measure of each unknown
  Eigen::VectorXd potential;         // rho c at the unknowns
  Eigen::VectorXd source;            // f at the unknowns
  Eigen::VectorXd exterior_weight;   // coefficient of eta in b
  Eigen::VectorXd face_weight;       // |S| r_face^(N-1) / h_face, faces i+1/2, i = 0..M-1
  Eigen::VectorXd lap_lower, lap_diag, lap_upper;  // tridiagonal local part (rows scaled by 1/V)
  double delta = 0.0;                // kernel truncation radius
  double kappa = 0.0;                // near-field Laplacian correction

  int size() const { return static_cast<int>(b.size()); }
  // The kernel part alone (including the exterior coupling on the diagonal).
  Eigen::MatrixXd nonlocal_block() const;
  // diag(V) * nonlocal_block(), which should be symmetric.
  Eigen::MatrixXd weighted_nonlocal_block() const;
  // sum_i V_i v_i ((A - diag(potential)) v)_i for v vanishing outside the ball.
  double energy(const Eigen::VectorXd& v) const;
  // sum over faces |S| r^(N-1) (v_{i+1} - v_i)^2 / h with v_M = 0.
  double h1_seminorm_sq(const Eigen::VectorXd& v) const;
  // Right-hand side for other data with the same matrix.
  Eigen::VectorXd rhs(const Eigen::VectorXd& f, double eta) const;
};

struct AssemblyOptions {
  int workers = 1;
  bool check_sign_pattern = true;
};

// Throws AssemblyError when the M-matrix sign pattern fails.
DirichletSystem assemble(const DirichletProblem& problem, const AssemblyOptions& options = {});

struct RadialSolution {
  std::vector<double> nodes;   // including the boundary node
  std::vector<double> values;  // value at every node; the last one is eta
  double eta = 0.0;
  double residual_norm = 0.0;  // ||A u - b|| / max(||b||, 1)
  double center_value = 0.0;
  double max_abs = 0.0;
  double energy = 0.0;         // discrete B_s(u - eta, u - eta)
  bool used_direct = true;

  // |u(r) - eta| by linear interpolation, r in [0, radius].
  double tail_gap(double r) const;
  double value_at(double r) const;
};

struct SolveOptions {
  int direct_limit = 10000;
  double iterative_tol = 1e-10;
  AssemblyOptions assembly;
};

RadialSolution solve_dirichlet(const DirichletProblem& problem, const SolveOptions& options = {});
RadialSolution solve_system(const DirichletProblem& problem, const DirichletSystem& sys,
                            const SolveOptions& options = {});

struct WmpOptions {
  double tol = 1e-10;
  // Adds a positive off-diagonal entry to one row before solving, to show
  // that the check notices a broken sign pattern.
  bool inject_fault = false;
};

struct WmpReport {
  int trials = 0;
  int nonnegative_passes = 0;
  int comparison_passes = 0;
  double min_value = 0.0;        // smallest solution value seen
  double min_comparison_gap = 0.0;  // smallest u2 - u1 seen
  bool fault_injected = false;
  bool pass = false;
};

// Random nonnegative (f, eta) with the problem's coefficients; the matrix is
// factored once.
WmpReport wmp_check(const DirichletProblem& problem, int trials, std::uint64_t seed, const WmpOptions& options = {});

struct ExhaustionOptions {
  int intervals = 2000;
  std::optional<double> r_obs;  // default min(radii) / 2
  double cauchy_tol = 1e-3;     // relative to |eta|
  double bound_tol = 1e-8;
  bool barrier = true;          // only used when alpha > 2s
  int workers = 1;
  SolveOptions solve;
};

struct ExhaustionRun {
  double radius = 0.0;
  double center_value = 0.0;
  double max_abs = 0.0;
  double residual_norm = 0.0;
  bool bound_holds = false;  // max|u| <= |eta| + bound_tol
  std::vector<double> obs_r, obs_u;
  // barrier check on r in (max(1, r0), radius)
  int tail_nodes = 0;
  int covered_nodes = 0;
  double coverage = 1.0;
  RadialSolution solution;
};

struct ExhaustionReport {
  double eta = 0.0;
  double r_obs = 0.0;
  std::vector<ExhaustionRun> runs;  // sorted by radius
  std::vector<double> center_gaps;  // |u_{k+1}(0) - u_k(0)|
  std::vector<double> window_gaps;  // max over [0, r_obs] of |u_{k+1} - u_k|
  bool gaps_shrink = false;
  double final_gap = 0.0;
  bool cauchy = false;              // gaps shrink and final gap <= cauchy_tol |eta|
  bool bounds_hold = false;
  bool center_decreasing = false;
  bool barrier_checked = false;
  double barrier_beta = 0.0;
  double barrier_C = 0.0;     // V = barrier_C r^(-beta)
  double barrier_K = 0.0;     // |u_n - eta| <= K V
  double min_coverage = 1.0;
};

ExhaustionReport exhaustion_experiment(const OperatorParams& params, const CoefficientModel& coeff, double eta,
                                       const std::vector<double>& radii, const ExhaustionOptions& options = {});

}  // namespace mixlap
