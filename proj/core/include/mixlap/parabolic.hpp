#pragma once

#include <memory>
#include <vector>

#include <Eigen/Dense>

#include "mixlap/certificates.hpp"
#include "mixlap/dirichlet.hpp"

namespace mixlap {

// rho u_t = Delta u - (-Delta)^s u on a ball, exterior value problem.eta.
// The spatial matrix is the elliptic one with the potential switched off.
struct ParabolicRun {
  DirichletProblem problem;
  RadialCallable u0;  // empty means zero
  double dt = 1e-2;
  double T = 1.0;
  std::vector<double> snapshot_times;

  void validate() const;
};

struct Snapshot {
  double t;
  std::vector<double> values;  // at every node, boundary included
};

// Implicit Euler: (diag(rho)/dt + A0) u_{k+1} = diag(rho)/dt u_k + b0.
// The system matrix is factored once.
class ParabolicStepper {
 public:
  explicit ParabolicStepper(const ParabolicRun& run, int workers = 1);

  // Interior values in, interior values out.
  Eigen::VectorXd step(const Eigen::VectorXd& u) const;
  Eigen::VectorXd initial() const;
  std::vector<double> with_boundary(const Eigen::VectorXd& u) const;

  const DirichletSystem& system() const noexcept { return sys_; }
  const Eigen::VectorXd& rho() const noexcept { return rho_; }
  const ParabolicRun& run() const noexcept { return run_; }
  int size() const noexcept { return sys_.size(); }

 private:
  ParabolicRun run_;
  DirichletSystem sys_;
  Eigen::VectorXd rho_;
  Eigen::PartialPivLU<Eigen::MatrixXd> lu_;
};

struct EvolutionResult {
  std::vector<Snapshot> snapshots;
  std::vector<double> max_abs;          // max |u_k| per step, k = 0..steps
  std::vector<double> max_dev;          // max |u_k - eta| per step
  int steps = 0;
  bool max_abs_nonincreasing = false;
  bool deviation_nonincreasing = false;
};

// Runs to T (ceil(T/dt) steps), recording the requested snapshot times.
EvolutionResult evolve(const ParabolicRun& run, int workers = 1);

struct ZeroUniquenessReport {
  int steps = 0;
  double dt = 0.0;
  double perturbation = 0.0;
  double max_abs = 0.0;   // over all steps and nodes
  double final_max_abs = 0.0;
  double tol = 1e-12;
  bool pass = false;
};

// Zero initial and exterior data; an optional uniform perturbation of u0
// probes amplification of round-off.
ZeroUniquenessReport zero_uniqueness_check(const ParabolicRun& run, int steps, double perturbation = 0.0,
                                           double tol = 1e-12);

struct SteadyStateReport {
  int steps = 0;
  double last_change = 0.0;
  bool converged = false;
  std::vector<double> values;  // at every node
  double max_gap_to_elliptic = 0.0;
};

// Iterates the step until successive iterates differ by less than tol, then
// compares with the elliptic solution for c = 0.
SteadyStateReport steady_state(const ParabolicRun& run, double tol = 1e-13, int max_steps = 100000);

// Supersolution check for e^(-lambda t) psi_beta.
Certificate lambda_certificate(Regime regime, const OperatorParams& params, double beta,
                               const CoefficientModel& coeff, double lambda, const std::vector<double>& grid = {},
                               const CertifyOptions& options = {});

}  // namespace mixlap
