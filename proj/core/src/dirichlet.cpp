#include "mixlap/dirichlet.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <string>

#include <Eigen/IterativeLinearSolvers>

#include "mixlap/errors.hpp"
#include "mixlap/radial_kernel.hpp"
#include "parallel.hpp"

namespace mixlap {

namespace {

double shell_volume(int N, double lo, double hi) {
  return sphere_area(N) * (std::pow(hi, N) - std::pow(lo, N)) / N;
}

}  // namespace

// ------------------------------------------------------------------- grid

RadialGrid RadialGrid::uniform(double radius, int intervals) {
  RadialGrid g;
  g.radius = radius;
  g.grading = Grading::kUniform;
  g.nodes.resize(intervals + 1);
  for (int i = 0; i <= intervals; ++i) g.nodes[i] = radius * i / intervals;
  g.nodes.back() = radius;
  g.validate();
  return g;
}

RadialGrid RadialGrid::graded(double radius, int intervals, double power) {
  if (!(power >= 1.0)) throw DomainError("grading power must be >= 1");
  RadialGrid g;
  g.radius = radius;
  g.grading = Grading::kGraded;
  g.power = power;
  g.nodes.resize(intervals + 1);
  for (int i = 0; i <= intervals; ++i) {
    const double t = double(i) / intervals;
    const double m = t <= 0.5 ? 0.5 * std::pow(2.0 * t, power) : 1.0 - 0.5 * std::pow(2.0 * (1.0 - t), power);
    g.nodes[i] = radius * m;
  }
  g.nodes.front() = 0.0;
  g.nodes.back() = radius;
  g.validate();
  return g;
}

double RadialGrid::min_spacing() const {
  double h = INFINITY;
  for (size_t i = 1; i < nodes.size(); ++i) h = std::min(h, nodes[i] - nodes[i - 1]);
  return h;
}

void RadialGrid::validate() const {
  if (!(radius > 0.0)) throw DomainError("grid radius must be positive");
  if (nodes.size() < 17) throw DomainError("grid needs at least 16 intervals");
  if (nodes.front() != 0.0 || nodes.back() != radius) throw DomainError("grid must run from 0 to the radius");
  for (size_t i = 1; i < nodes.size(); ++i)
    if (!(nodes[i] > nodes[i - 1])) throw DomainError("grid nodes must be strictly increasing");
}

void DirichletProblem::validate() const {
  grid.validate();
  if (!coeff.rho || !coeff.c) throw DomainError("coefficient model has no rho or c profile");
  if (!std::isfinite(eta)) throw DomainError("exterior value must be finite");
  for (double r : grid.nodes) {
    const double v = coeff.rho(r) * coeff.c(r);
    if (!(v >= 0.0) || !std::isfinite(v))
      throw DomainError("potential rho*c must be finite and >= 0; got " + std::to_string(v) +
                        " at r=" + std::to_string(r));
  }
}

// --------------------------------------------------------------- assembly

DirichletSystem assemble(const DirichletProblem& problem, const AssemblyOptions& options) {
  problem.validate();
  const OperatorParams& P = problem.params;
  const int N = P.N;
  const double s = P.s;
  const auto& r = problem.grid.nodes;
  const int M = problem.grid.intervals();
  const int n = M;  // unknowns 0 .. M-1
  const double R = problem.grid.radius;
  const double S = sphere_area(N);

  DirichletSystem sys;
  sys.delta = problem.grid.min_spacing();
  sys.kappa = P.C_Ns * S * std::pow(sys.delta, 2.0 - 2.0 * s) / (2.0 * N * (2.0 - 2.0 * s));

  // cell measures, including the half cell of the boundary node
  Eigen::VectorXd vol(M + 1);
  for (int i = 0; i <= M; ++i) {
    const double lo = i == 0 ? 0.0 : 0.5 * (r[i - 1] + r[i]);
    const double hi = i == M ? R : 0.5 * (r[i] + r[i + 1]);
    vol[i] = shell_volume(N, lo, hi);
  }
  sys.volumes = vol.head(n);

  sys.A = Eigen::MatrixXd::Zero(n, n);
  sys.b = Eigen::VectorXd::Zero(n);
  sys.exterior_weight = Eigen::VectorXd::Zero(n);
  Eigen::VectorXd boundary_col(n);
  Eigen::VectorXd exterior(n);

  // kernel couplings; each (i, j > i) pair is computed once and mirrored
  const double C = P.C_Ns;
  detail::parallel_for(n, options.workers, [&](int i) {
    for (int j = i + 1; j < M; ++j) {
      const double k = C * shell_average_kernel(N, s, r[i], r[j], sys.delta);
      sys.A(i, j) = -k * vol[j];
      sys.A(j, i) = -k * vol[i];
    }
    boundary_col[i] = C * shell_average_kernel(N, s, r[i], R, sys.delta) * vol[M];
    exterior[i] = C * exterior_integral(N, s, r[i], R);
  });
  for (int i = 0; i < n; ++i) {
    double d = boundary_col[i] + exterior[i];
    for (int j = 0; j < n; ++j)
      if (j != i) d -= sys.A(i, j);
    sys.A(i, i) = d;
    sys.exterior_weight[i] = boundary_col[i] + exterior[i];
  }

  // finite-volume Laplacian with coefficient (1 + kappa)
  sys.face_weight.resize(n);
  for (int i = 0; i < n; ++i) {
    const double rf = 0.5 * (r[i] + r[i + 1]);
    sys.face_weight[i] = S * std::pow(rf, N - 1) / (r[i + 1] - r[i]);
  }
  sys.lap_lower = Eigen::VectorXd::Zero(n);
  sys.lap_diag = Eigen::VectorXd::Zero(n);
  sys.lap_upper = Eigen::VectorXd::Zero(n);
  for (int i = 0; i < n; ++i) {
    const double right = (1.0 + sys.kappa) * sys.face_weight[i] / vol[i];
    sys.lap_diag[i] += right;
    if (i + 1 < n) {
      sys.lap_upper[i] = -right;
      sys.A(i, i + 1) -= right;
    } else {
      sys.exterior_weight[i] += right;
    }
    if (i > 0) {
      const double left = (1.0 + sys.kappa) * sys.face_weight[i - 1] / vol[i];
      sys.lap_diag[i] += left;
      sys.lap_lower[i] = -left;
      sys.A(i, i - 1) -= left;
    }
    sys.A(i, i) += sys.lap_diag[i];
  }

  sys.potential.resize(n);
  sys.source.resize(n);
  for (int i = 0; i < n; ++i) {
    sys.potential[i] = problem.coeff.rho(r[i]) * problem.coeff.c(r[i]);
    sys.source[i] = problem.f ? problem.f(r[i]) : 0.0;
    sys.A(i, i) += sys.potential[i];
  }
  sys.b = sys.rhs(sys.source, problem.eta);

  if (options.check_sign_pattern) {
    for (int i = 0; i < n; ++i) {
      if (!(sys.A(i, i) > 0.0))
        throw AssemblyError("non-positive diagonal at row " + std::to_string(i) + " (r=" + std::to_string(r[i]) + ")");
      for (int j = 0; j < n; ++j)
        if (j != i && sys.A(i, j) > 0.0)
          throw AssemblyError("positive off-diagonal at (" + std::to_string(i) + "," + std::to_string(j) +
                              "); the grid is too coarse near the kernel singularity");
    }
  }
  return sys;
}

Eigen::VectorXd DirichletSystem::rhs(const Eigen::VectorXd& f, double eta) const { return f + eta * exterior_weight; }

Eigen::MatrixXd DirichletSystem::nonlocal_block() const {
  Eigen::MatrixXd B = A;
  const int n = size();
  for (int i = 0; i < n; ++i) {
    B(i, i) -= lap_diag[i] + potential[i];
    if (i > 0) B(i, i - 1) -= lap_lower[i];
    if (i + 1 < n) B(i, i + 1) -= lap_upper[i];
  }
  return B;
}

Eigen::MatrixXd DirichletSystem::weighted_nonlocal_block() const { return volumes.asDiagonal() * nonlocal_block(); }

double DirichletSystem::energy(const Eigen::VectorXd& v) const {
  const Eigen::VectorXd Av = A * v - potential.cwiseProduct(v);
  return volumes.cwiseProduct(v).dot(Av);
}

double DirichletSystem::h1_seminorm_sq(const Eigen::VectorXd& v) const {
  const int n = size();
  double e = 0.0;
  for (int i = 0; i < n; ++i) {
    const double next = i + 1 < n ? v[i + 1] : 0.0;
    e += face_weight[i] * (next - v[i]) * (next - v[i]);
  }
  return e;
}

// ------------------------------------------------------------------ solve

double RadialSolution::value_at(double r) const {
  if (r <= nodes.front()) return values.front();
  if (r >= nodes.back()) return values.back();
  const auto it = std::upper_bound(nodes.begin(), nodes.end(), r);
  const size_t j = it - nodes.begin();
  const double t = (r - nodes[j - 1]) / (nodes[j] - nodes[j - 1]);
  return (1.0 - t) * values[j - 1] + t * values[j];
}

double RadialSolution::tail_gap(double r) const { return std::abs(value_at(r) - eta); }

RadialSolution solve_system(const DirichletProblem& problem, const DirichletSystem& sys, const SolveOptions& options) {
  const int n = sys.size();
  Eigen::VectorXd u;
  RadialSolution sol;
  if (n <= options.direct_limit) {
    u = sys.A.partialPivLu().solve(sys.b);
    sol.used_direct = true;
  } else {
    Eigen::BiCGSTAB<Eigen::MatrixXd, Eigen::DiagonalPreconditioner<double>> it;
    it.setTolerance(options.iterative_tol);
    it.setMaxIterations(10 * n);
    it.compute(sys.A);
    u = it.solve(sys.b);
    if (it.info() != Eigen::Success) throw SolverError("BiCGSTAB did not reach the requested residual");
    sol.used_direct = false;
  }
  if (!u.allFinite()) throw SolverError("linear solve produced non-finite values (singular system?)");
  sol.residual_norm = (sys.A * u - sys.b).norm() / std::max(sys.b.norm(), 1.0);
  const double tol = sol.used_direct ? 1e-8 : 10.0 * options.iterative_tol;
  if (!(sol.residual_norm <= tol))
    throw SolverError("linear solve residual " + std::to_string(sol.residual_norm) + " above tolerance");

  sol.eta = problem.eta;
  sol.nodes = problem.grid.nodes;
  sol.values.assign(u.data(), u.data() + n);
  sol.values.push_back(problem.eta);
  sol.center_value = sol.values.front();
  sol.max_abs = 0.0;
  for (double v : sol.values) sol.max_abs = std::max(sol.max_abs, std::abs(v));
  sol.energy = sys.energy(u - Eigen::VectorXd::Constant(n, problem.eta));
  return sol;
}

RadialSolution solve_dirichlet(const DirichletProblem& problem, const SolveOptions& options) {
  const DirichletSystem sys = assemble(problem, options.assembly);
  return solve_system(problem, sys, options);
}

// -------------------------------------------------------- maximum principle

WmpReport wmp_check(const DirichletProblem& problem, int trials, std::uint64_t seed, const WmpOptions& options) {
  DirichletSystem sys = assemble(problem);
  const int n = sys.size();
  WmpReport rep;
  rep.trials = trials;
  if (options.inject_fault) {
    const int k = n / 2;
    sys.A(k, k + 1) = 3.0 * sys.A(k, k);
    rep.fault_injected = true;
  }
  const Eigen::PartialPivLU<Eigen::MatrixXd> lu(sys.A);

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  auto random_source = [&](double amplitude) {
    Eigen::VectorXd f(n);
    for (int i = 0; i < n; ++i) f[i] = amplitude * unit(rng);
    return f;
  };

  rep.min_value = INFINITY;
  rep.min_comparison_gap = INFINITY;
  for (int t = 0; t < trials; ++t) {
    const double amp1 = unit(rng), eta1 = 2.0 * unit(rng);
    const Eigen::VectorXd f1 = random_source(amp1);
    const Eigen::VectorXd f2 = f1 + random_source(unit(rng));
    const double eta2 = eta1 + unit(rng);
    const Eigen::VectorXd u1 = lu.solve(sys.rhs(f1, eta1));
    const Eigen::VectorXd u2 = lu.solve(sys.rhs(f2, eta2));
    const double scale = std::max(1.0, u2.cwiseAbs().maxCoeff());
    const double m1 = std::min(u1.minCoeff(), eta1);
    const double gap = (u2 - u1).minCoeff();
    rep.min_value = std::min(rep.min_value, m1);
    rep.min_comparison_gap = std::min(rep.min_comparison_gap, gap);
    if (m1 >= -options.tol * scale) ++rep.nonnegative_passes;
    if (gap >= -options.tol * scale) ++rep.comparison_passes;
  }
  rep.pass = rep.nonnegative_passes == trials && rep.comparison_passes == trials;
  return rep;
}

// -------------------------------------------------------------- exhaustion

ExhaustionReport exhaustion_experiment(const OperatorParams& params, const CoefficientModel& coeff, double eta,
                                       const std::vector<double>& radii, const ExhaustionOptions& options) {
  if (radii.empty()) throw DomainError("exhaustion needs at least one radius");
  for (size_t k = 1; k < radii.size(); ++k)
    if (!(radii[k] > radii[k - 1])) throw DomainError("exhaustion radii must be increasing");
  if (options.intervals > 8000) throw DomainError("node count is capped at 8000");

  ExhaustionReport rep;
  rep.eta = eta;
  rep.r_obs = options.r_obs.value_or(0.5 * radii.front());
  if (!(rep.r_obs > 0.0 && rep.r_obs <= radii.front()))
    throw DomainError("observation window must lie inside the smallest ball");

  rep.runs.resize(radii.size());
  detail::parallel_for(static_cast<int>(radii.size()), options.workers, [&](int k) {
    DirichletProblem prob{params, coeff, eta, RadialGrid::uniform(radii[k], options.intervals), {}};
    ExhaustionRun& run = rep.runs[k];
    run.radius = radii[k];
    run.solution = solve_dirichlet(prob, options.solve);
    run.center_value = run.solution.center_value;
    run.max_abs = run.solution.max_abs;
    run.residual_norm = run.solution.residual_norm;
    run.bound_holds = run.max_abs <= std::abs(eta) + options.bound_tol;
    constexpr int kObs = 201;
    for (int i = 0; i < kObs; ++i) {
      const double x = rep.r_obs * i / (kObs - 1);
      run.obs_r.push_back(x);
      run.obs_u.push_back(run.solution.value_at(x));
    }
  });

  rep.bounds_hold = true;
  rep.center_decreasing = true;
  for (size_t k = 0; k < rep.runs.size(); ++k) {
    rep.bounds_hold = rep.bounds_hold && rep.runs[k].bound_holds;
    if (k == 0) continue;
    const auto& a = rep.runs[k - 1];
    const auto& b = rep.runs[k];
    rep.center_gaps.push_back(std::abs(b.center_value - a.center_value));
    double w = 0.0;
    for (size_t i = 0; i < a.obs_u.size(); ++i) w = std::max(w, std::abs(b.obs_u[i] - a.obs_u[i]));
    rep.window_gaps.push_back(w);
    if (!(b.center_value < a.center_value)) rep.center_decreasing = false;
  }
  rep.gaps_shrink = true;
  for (size_t k = 1; k < rep.center_gaps.size(); ++k)
    if (!(rep.center_gaps[k] <= rep.center_gaps[k - 1])) rep.gaps_shrink = false;
  rep.final_gap = rep.center_gaps.empty() ? 0.0 : rep.center_gaps.back();
  rep.cauchy = rep.gaps_shrink && rep.final_gap <= options.cauchy_tol * std::abs(eta);

  // |u_n - eta| <= K V with K from the comparison argument: K V >= |eta| on
  // the inner ball and K >= |eta| sup c so that eta - K V is a subsolution
  if (options.barrier && coeff.alpha > 2.0 * params.s && params.N > 2) {
    const BarrierResult bar = lemma5_barrier(params, coeff.alpha, coeff.c0, coeff.r0);
    const double r_min = bar.report.r_min;
    double c_max = 0.0;
    for (double x : rep.runs.back().solution.nodes) c_max = std::max(c_max, coeff.c(x));
    rep.barrier_checked = true;
    rep.barrier_beta = bar.beta;
    rep.barrier_C = bar.report.C;
    rep.barrier_K = std::max(std::abs(eta) * std::pow(r_min, bar.beta) / bar.report.C, std::abs(eta) * c_max);
    rep.min_coverage = 1.0;
    for (auto& run : rep.runs) {
      const auto& sol = run.solution;
      run.tail_nodes = run.covered_nodes = 0;
      for (size_t i = 0; i + 1 < sol.nodes.size(); ++i) {
        const double x = sol.nodes[i];
        if (!(x > r_min)) continue;
        ++run.tail_nodes;
        const double bound = rep.barrier_K * bar.report.C * std::pow(x, -bar.beta);
        if (std::abs(sol.values[i] - eta) <= bound * (1.0 + 1e-12)) ++run.covered_nodes;
      }
      run.coverage = run.tail_nodes ? double(run.covered_nodes) / run.tail_nodes : 1.0;
      rep.min_coverage = std::min(rep.min_coverage, run.coverage);
    }
  }
  return rep;
}

}  // namespace mixlap
