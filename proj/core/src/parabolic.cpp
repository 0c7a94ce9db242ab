#include "mixlap/parabolic.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "mixlap/errors.hpp"

namespace mixlap {

namespace {

DirichletProblem without_potential(const DirichletProblem& p) {
  DirichletProblem q = p;
  q.coeff.c = [](double) { return 0.0; };
  q.f = {};
  return q;
}

double max_abs_dev(const Eigen::VectorXd& u, double eta) {
  return std::max((u.array() - eta).abs().maxCoeff(), 0.0);
}

}  // namespace

void ParabolicRun::validate() const {
  problem.validate();
  if (!(dt > 0.0) || !(T > 0.0)) throw DomainError("dt and T must be positive");
  if (dt > T) throw DomainError("dt must not exceed T");
  for (double t : snapshot_times)
    if (!(t >= 0.0 && t <= T)) throw DomainError("snapshot times must lie in [0, T]");
}

ParabolicStepper::ParabolicStepper(const ParabolicRun& run, int workers) : run_(run) {
  run_.validate();
  AssemblyOptions opt;
  opt.workers = workers;
  sys_ = assemble(without_potential(run_.problem), opt);
  const int n = sys_.size();
  rho_.resize(n);
  for (int i = 0; i < n; ++i) {
    rho_[i] = run_.problem.coeff.rho(run_.problem.grid.nodes[i]);
    if (!(rho_[i] > 0.0)) throw DomainError("rho must be positive at every node for time stepping");
  }
  Eigen::MatrixXd M = sys_.A;
  M.diagonal() += rho_ / run_.dt;
  lu_.compute(M);
}

Eigen::VectorXd ParabolicStepper::step(const Eigen::VectorXd& u) const {
  Eigen::VectorXd next = lu_.solve(rho_.cwiseProduct(u) / run_.dt + sys_.b);
  if (!next.allFinite()) throw SolverError("time step produced non-finite values (singular system?)");
  return next;
}

Eigen::VectorXd ParabolicStepper::initial() const {
  const int n = size();
  Eigen::VectorXd u(n);
  for (int i = 0; i < n; ++i) u[i] = run_.u0 ? run_.u0(run_.problem.grid.nodes[i]) : 0.0;
  return u;
}

std::vector<double> ParabolicStepper::with_boundary(const Eigen::VectorXd& u) const {
  std::vector<double> v(u.data(), u.data() + u.size());
  v.push_back(run_.problem.eta);
  return v;
}

EvolutionResult evolve(const ParabolicRun& run, int workers) {
  const ParabolicStepper stepper(run, workers);
  EvolutionResult res;
  res.steps = static_cast<int>(std::ceil(run.T / run.dt - 1e-9));
  std::vector<double> times = run.snapshot_times;
  std::sort(times.begin(), times.end());
  size_t next_snap = 0;

  Eigen::VectorXd u = stepper.initial();
  const double eta = run.problem.eta;
  auto record = [&](int k) {
    const double t = k * run.dt;
    res.max_abs.push_back(std::max(u.cwiseAbs().maxCoeff(), std::abs(eta)));
    res.max_dev.push_back(max_abs_dev(u, eta));
    while (next_snap < times.size() && times[next_snap] <= t + 0.5 * run.dt) {
      res.snapshots.push_back({t, stepper.with_boundary(u)});
      ++next_snap;
    }
  };
  record(0);
  for (int k = 1; k <= res.steps; ++k) {
    u = stepper.step(u);
    record(k);
  }
  res.max_abs_nonincreasing = res.deviation_nonincreasing = true;
  for (size_t k = 1; k < res.max_abs.size(); ++k) {
    if (res.max_abs[k] > res.max_abs[k - 1] * (1.0 + 1e-12) + 1e-300) res.max_abs_nonincreasing = false;
    if (res.max_dev[k] > res.max_dev[k - 1] * (1.0 + 1e-12) + 1e-300) res.deviation_nonincreasing = false;
  }
  return res;
}

ZeroUniquenessReport zero_uniqueness_check(const ParabolicRun& run, int steps, double perturbation, double tol) {
  if (run.problem.eta != 0.0) throw DomainError("uniqueness check needs exterior value 0");
  ParabolicRun r = run;
  r.u0 = [perturbation](double) { return perturbation; };
  r.T = std::max(r.T, steps * r.dt);
  r.snapshot_times.clear();
  const ParabolicStepper stepper(r);
  ZeroUniquenessReport rep;
  rep.steps = steps;
  rep.dt = r.dt;
  rep.perturbation = perturbation;
  rep.tol = tol;
  Eigen::VectorXd u = stepper.initial();
  // the perturbed start is not part of the zero-data solution
  rep.max_abs = perturbation == 0.0 ? u.cwiseAbs().maxCoeff() : 0.0;
  for (int k = 0; k < steps; ++k) {
    u = stepper.step(u);
    rep.max_abs = std::max(rep.max_abs, u.cwiseAbs().maxCoeff());
  }
  rep.final_max_abs = u.cwiseAbs().maxCoeff();
  rep.pass = rep.max_abs <= tol;
  return rep;
}

SteadyStateReport steady_state(const ParabolicRun& run, double tol, int max_steps) {
  const ParabolicStepper stepper(run);
  SteadyStateReport rep;
  Eigen::VectorXd u = stepper.initial();
  for (rep.steps = 1; rep.steps <= max_steps; ++rep.steps) {
    Eigen::VectorXd next = stepper.step(u);
    rep.last_change = (next - u).cwiseAbs().maxCoeff();
    u = std::move(next);
    if (rep.last_change <= tol) {
      rep.converged = true;
      break;
    }
  }
  rep.values = stepper.with_boundary(u);
  const RadialSolution elliptic = solve_system(run.problem, stepper.system());
  for (size_t i = 0; i < rep.values.size(); ++i)
    rep.max_gap_to_elliptic = std::max(rep.max_gap_to_elliptic, std::abs(rep.values[i] - elliptic.values[i]));
  return rep;
}

Certificate lambda_certificate(Regime regime, const OperatorParams& params, double beta,
                               const CoefficientModel& coeff, double lambda, const std::vector<double>& grid,
                               const CertifyOptions& options) {
  return certify_parabolic_lambda(regime, params, beta, coeff, lambda, grid, options);
}

}  // namespace mixlap
