#include "mixlap/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <mutex>
#include <random>
#include <sstream>

#include "json_io.hpp"
#include "mixlap/certificates.hpp"
#include "mixlap/dirichlet.hpp"
#include "mixlap/errors.hpp"
#include "mixlap/parabolic.hpp"
#include "mixlap/radial_fraclap.hpp"
#include "parallel.hpp"

namespace mixlap {

namespace fs = std::filesystem;
using nlohmann::json;
using detail::number;
using detail::numbers;

namespace {

// ----------------------------------------------------------------- output

std::string num(double v) {
  if (!std::isfinite(v)) return "nan";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

// Writes through a temporary name so readers never see a partial file.
void write_atomic(const fs::path& path, const std::string& text) {
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write " + tmp.string());
    out << text;
    if (!out) throw Error("write failed for " + tmp.string());
  }
  fs::rename(tmp, path);
}

class Csv {
 public:
  explicit Csv(std::initializer_list<const char*> header) {
    bool first = true;
    for (const char* h : header) {
      text_ += first ? "" : ",";
      text_ += h;
      first = false;
    }
    text_ += '\n';
  }
  template <class... T>
  void row(const T&... cells) {
    bool first = true;
    ((text_ += (first ? "" : ","), text_ += cell(cells), first = false), ...);
    text_ += '\n';
  }
  const std::string& text() const { return text_; }

 private:
  static std::string cell(double v) { return num(v); }
  static std::string cell(int v) { return std::to_string(v); }
  static std::string cell(const std::string& v) { return v; }
  static std::string cell(const char* v) { return v; }
  std::string text_;
};

json config_json(const ExperimentConfig& cfg) {
  json j = json::object();
  std::map<std::string, ConfigType> types;
  for (const auto& [k, t] : config_keys(cfg.kind())) types[k] = t;
  for (const auto& [key, e] : cfg.entries()) {
    std::visit(
        [&](const auto& v) {
          using V = std::decay_t<decltype(v)>;
          if constexpr (std::is_same_v<V, double>) {
            if (types[key] == ConfigType::kInteger)
              j[key] = static_cast<long long>(v);
            else
              j[key] = v;
          } else {
            j[key] = v;
          }
        },
        e.value);
  }
  return j;
}

// Converts a domain problem found while preparing inputs into a config
// diagnostic that points at the key.
template <class Fn>
auto checked(const ExperimentConfig& cfg, const std::string& key, Fn&& fn) {
  try {
    return fn();
  } catch (const ConfigError&) {
    throw;
  } catch (const DomainError& e) {
    const int line = cfg.line_of(key);
    throw ConfigError((line > 0 ? "line " + std::to_string(line) + ": " : std::string()) + key + ": " + e.what(),
                      key, line);
  }
}

void require(bool ok, const ExperimentConfig& cfg, const std::string& key, const std::string& what) {
  if (ok) return;
  const int line = cfg.line_of(key);
  throw ConfigError((line > 0 ? "line " + std::to_string(line) + ": " : std::string()) + key + " " + what, key,
                    line);
}

OperatorParams params_of(const ExperimentConfig& cfg) {
  const long long N = cfg.integer("N");
  require(N >= 1 && N <= 64, cfg, "N", "must be between 1 and 64");
  const double s = cfg.number("s");
  require(s > 0.0 && s < 1.0, cfg, "s", "must lie in (0, 1)");
  return OperatorParams::make(static_cast<int>(N), s);
}

int workers_of(const ExperimentConfig& cfg) {
  const long long w = cfg.integer("workers");
  require(w >= 1 && w <= 256, cfg, "workers", "must be between 1 and 256");
  return static_cast<int>(w);
}

Regime regime_of_beta(const OperatorParams& p, double beta) {
  if (beta <= p.N - 2.0 * p.s + 1e-12 * p.N) return Regime::kI;
  if (std::abs(beta - p.N) <= 1e-12 * p.N) return Regime::kIII;
  return beta < p.N ? Regime::kII : Regime::kIV;
}

// Canonical (beta, alpha) inside each regime.
std::pair<double, double> regime_defaults(Regime r, const OperatorParams& p) {
  const double N = p.N, s = p.s;
  switch (r) {
    case Regime::kI: return {N - 2.0 * s - 0.1, 1.0};
    case Regime::kII: return {N - s, 1.2 * s};
    case Regime::kIII: return {N, 1.2 * s};
    case Regime::kIV: return {N + 0.2, std::max(0.0, std::min(1.2 * s, 2.0 * s - 0.2))};
  }
  return {N, 0.0};
}

json threshold_json(const ThresholdResult& t) {
  return {{"threshold", number(t.threshold)},       {"epsilon", number(t.epsilon)},
          {"R_eps", number(t.R_eps)},               {"M_eps_beta", number(t.M_eps_beta)},
          {"far_field_bound", number(t.far_field_bound)}, {"compact_bound", number(t.compact_bound)},
          {"far_constant", number(t.far_constant)}, {"closed_constant", number(t.closed_constant)}};
}

json barrier_json(const BarrierReport& b) {
  return {{"beta", b.beta},
          {"C", b.C},
          {"doublings", b.doublings},
          {"theta", number(b.theta)},
          {"theta_radii", numbers(b.theta_radii)},
          {"theta_values", numbers(b.theta_values)},
          {"theta_spread", number(b.theta_spread)},
          {"theta_gamma_ratio", number(b.theta_literature)},
          {"r_min", b.r_min},
          {"m0", number(b.m0)},
          {"decay_holds", b.decay_holds},
          {"rho_bound_holds", b.rho_bound_holds},
          {"nonnegative", b.nonnegative},
          {"vanishes_at_infinity", b.vanishes_at_infinity},
          {"verdict", b.pass ? "pass" : "fail"}};
}

std::string margins_csv(const Certificate& c) {
  Csv csv{"r", "margin", "margin_floor"};
  for (size_t i = 0; i < c.grid.size(); ++i)
    csv.row(c.grid[i], c.margins[i], i < c.margin_floors.size() ? c.margin_floors[i] : 0.0);
  return csv.text();
}

struct Output {
  fs::path dir;
  std::vector<fs::path> files;
  void write(const std::string& name, const std::string& text) {
    const fs::path p = dir / name;
    write_atomic(p, text);
    files.push_back(p);
  }
};

// ----------------------------------------------------------------- certify

json run_certify(const ExperimentConfig& cfg, Output& out, int& exit_code, std::string& summary) {
  const OperatorParams P = checked(cfg, "s", [&] { return params_of(cfg); });
  const std::string which = cfg.string("certificate");
  const bool required = cfg.boolean("required");
  json res;

  if (which == "barrier") {
    const double alpha = cfg.optional_number("alpha").value_or(1.0);
    const double c0 = cfg.optional_number("c0").value_or(1.0);
    const BarrierResult b = checked(cfg, "alpha", [&] {
      return lemma5_barrier(P, alpha, c0, cfg.number("r0"), cfg.number("C_scale"));
    });
    const Certificate cert = b.report.certificate(P, alpha, c0);
    res["certificate"] = detail::certificate_json(cert);
    res["barrier"] = barrier_json(b.report);
    out.write("margins.csv", margins_csv(cert));
    out.write("certificate.json", cert.to_json() + "\n");
    if (required && !cert.pass) exit_code = 1;
    summary = "barrier certificate: " + std::string(cert.pass ? "pass" : "fail");
    return res;
  }
  require(which == "elliptic" || which == "parabolic_lambda", cfg, "certificate",
          "must be elliptic, parabolic_lambda or barrier");
  require(cfg.has("regime"), cfg, "regime", "is required for certify (i, ii, iii or iv)");
  const Regime regime = checked(cfg, "regime", [&] { return regime_from_string(cfg.string("regime")); });
  const auto [beta_d, alpha_d] = regime_defaults(regime, P);
  const double beta = cfg.optional_number("beta").value_or(beta_d);
  const double alpha = cfg.optional_number("alpha").value_or(alpha_d);
  const double C0 = cfg.number("C0");
  const double p = cfg.number("p");
  require(C0 > 0.0, cfg, "C0", "must be positive");
  require(p >= 1.0, cfg, "p", "must be >= 1");
  require(regime_preconditions_hold(regime, P, alpha, beta), cfg, cfg.has("beta") ? "beta" : "regime",
          "violates regime " + std::string(to_string(regime)) + ": needs " + regime_precondition_text(regime));

  ThresholdOptions topt;
  if (auto eps = cfg.optional_number("epsilon")) {
    require(*eps > 0.0, cfg, "epsilon", "must be positive");
    topt.epsilon = *eps;
  }
  CertifyOptions copt;
  copt.safety = cfg.number("safety");
  copt.threshold = topt;

  const CoefficientModel probe = CoefficientModel::lower_bound(alpha, C0, 1.0);
  const ThresholdResult thr = checked(cfg, "beta", [&] { return threshold_pc0(regime, P, beta, probe, topt); });
  res["threshold"] = threshold_json(thr);
  const double factor = cfg.number("c0_factor");
  Certificate cert;
  if (which == "elliptic") {
    double c0 = cfg.optional_number("c0").value_or(thr.threshold > 0.0 ? factor * thr.threshold / p : 1.0);
    require(c0 > 0.0, cfg, "c0", "must be positive");
    cert = certify_elliptic(regime, P, beta, p, CoefficientModel::lower_bound(alpha, C0, c0), {}, copt);
  } else {
    const double c0 = cfg.optional_number("c0").value_or(1.0);
    const double lambda = cfg.optional_number("lambda").value_or(factor * thr.threshold);
    require(lambda >= 0.0, cfg, "lambda", "must be >= 0");
    cert = certify_parabolic_lambda(regime, P, beta, CoefficientModel::lower_bound(alpha, C0, c0), lambda, {}, copt);
  }
  res["certificate"] = detail::certificate_json(cert);
  out.write("margins.csv", margins_csv(cert));
  out.write("certificate.json", cert.to_json() + "\n");
  if (required && !cert.pass) exit_code = 1;
  summary = std::string(to_string(cert.kind)) + " certificate, regime " + cert.regime + ": " +
            (cert.pass ? "pass" : "fail") + " (threshold " + num(cert.threshold) + ", max margin " +
            num(cert.max_margin) + ")";
  return res;
}

// ------------------------------------------------------------------- sweep

json run_sweep(const ExperimentConfig& cfg, Output& out, int& exit_code, std::string& summary) {
  const OperatorParams P = checked(cfg, "s", [&] { return params_of(cfg); });
  const int workers = workers_of(cfg);
  const std::vector<double> alphas = cfg.numbers("alphas");
  std::vector<double> betas;
  if (cfg.has("betas")) {
    betas = cfg.numbers("betas");
  } else {
    const double N = P.N, s = P.s;
    for (double b : {0.5 * (N - 2.0), N - 2.0 * s - 0.1, N - s, N, N + 0.2, N + 2.0 * s - 0.1})
      if (b > 0.0) betas.push_back(b);
    std::sort(betas.begin(), betas.end());
    betas.erase(std::unique(betas.begin(), betas.end()), betas.end());
  }
  require(!alphas.empty(), cfg, "alphas", "must not be empty");
  require(!betas.empty(), cfg, "betas", "must not be empty");
  for (double a : alphas) require(a >= 0.0, cfg, "alphas", "entries must be >= 0");
  for (double b : betas) require(b > 0.0, cfg, "betas", "entries must be > 0");
  const double C0 = cfg.number("C0"), p = cfg.number("p"), factor = cfg.number("c0_factor");
  require(C0 > 0.0, cfg, "C0", "must be positive");
  require(p >= 1.0, cfg, "p", "must be >= 1");
  const double barrier_c0 = cfg.number("barrier_c0"), r0 = cfg.number("r0");
  require(barrier_c0 > 0.0, cfg, "barrier_c0", "must be positive");
  require(r0 > 0.0, cfg, "r0", "must be positive");
  const bool required = cfg.boolean("required");

  // the barrier depends on alpha only
  std::vector<std::optional<BarrierReport>> barriers(alphas.size());
  detail::parallel_for(static_cast<int>(alphas.size()), workers, [&](int k) {
    if (alphas[k] > 2.0 * P.s && P.N > 2) barriers[k] = lemma5_barrier(P, alphas[k], barrier_c0, r0).report;
  });

  const fs::path cell_dir = out.dir / "cells";
  fs::create_directories(cell_dir);
  struct Cell {
    json j;
    std::string regime, cert, barrier, label;
    double threshold = NAN, alpha, beta;
    bool cert_failed = false;
  };
  const int na = static_cast<int>(alphas.size()), nb = static_cast<int>(betas.size());
  std::vector<Cell> cells(na * nb);
  detail::parallel_for(na * nb, workers, [&](int idx) {
    const int ia = idx / nb, ib = idx % nb;
    Cell& c = cells[idx];
    c.alpha = alphas[ia];
    c.beta = betas[ib];
    const Regime regime = regime_of_beta(P, c.beta);
    c.regime = to_string(regime);
    c.j = {{"alpha", c.alpha}, {"beta", c.beta}, {"regime", c.regime}};
    const bool pre = regime_preconditions_hold(regime, P, c.alpha, c.beta);
    c.j["preconditions_hold"] = pre;
    if (pre) {
      try {
        const ThresholdResult thr = threshold_pc0(regime, P, c.beta, CoefficientModel::lower_bound(c.alpha, C0, 1.0));
        c.threshold = thr.threshold;
        const double c0 = thr.threshold > 0.0 ? factor * thr.threshold / p : 1.0;
        const Certificate cert =
            certify_elliptic(regime, P, c.beta, p, CoefficientModel::lower_bound(c.alpha, C0, c0));
        c.cert = cert.pass ? "pass" : "fail";
        c.cert_failed = !cert.pass;
        c.j["certificate"] = detail::certificate_json(cert, false);
      } catch (const Error& e) {
        c.cert = "error";
        c.cert_failed = true;
        c.j["certificate_error"] = e.what();
      }
    } else {
      c.cert = "not_applicable";
    }
    const auto& bar = barriers[ia];
    c.barrier = bar ? (bar->pass ? "pass" : "fail") : "not_applicable";
    if (bar) c.j["barrier"] = barrier_json(*bar);
    const bool u = c.cert == "pass", nu = c.barrier == "pass";
    c.label = u && nu ? "both" : u ? "uniqueness" : nu ? "nonuniqueness" : c.cert_failed ? "certificate_fail" : "none";
    c.j["threshold"] = number(c.threshold);
    c.j["cell"] = c.label;
    char name[64];
    std::snprintf(name, sizeof name, "cell_%03d_%03d.json", ia, ib);
    write_atomic(cell_dir / name, c.j.dump(2) + "\n");
  });

  Csv csv{"alpha", "beta", "regime", "threshold", "certificate", "barrier", "cell"};
  json arr = json::array();
  int n_fail = 0, n_u = 0, n_nu = 0;
  for (int idx = 0; idx < na * nb; ++idx) {
    const Cell& c = cells[idx];
    csv.row(c.alpha, c.beta, c.regime, c.threshold, c.cert, c.barrier, c.label);
    arr.push_back(c.j);
    n_fail += c.cert_failed;
    n_u += c.cert == "pass";
    n_nu += c.barrier == "pass";
    char name[64];
    std::snprintf(name, sizeof name, "cell_%03d_%03d.json", idx / nb, idx % nb);
    out.files.push_back(cell_dir / name);
  }
  out.write("regime_map.csv", csv.text());
  if (required && n_fail > 0) exit_code = 1;
  summary = "sweep: " + std::to_string(na * nb) + " cells, " + std::to_string(n_u) + " uniqueness certificates, " +
            std::to_string(n_nu) + " barrier passes, " + std::to_string(n_fail) + " certificate failures";
  return {{"frontier_alpha", 2.0 * P.s}, {"alphas", alphas}, {"betas", betas}, {"cells", arr},
          {"certificate_failures", n_fail}};
}

// -------------------------------------------------------------- exhaustion

json run_exhaustion(const ExperimentConfig& cfg, Output& out, int& exit_code, std::string& summary) {
  const OperatorParams P = checked(cfg, "s", [&] { return params_of(cfg); });
  const int workers = workers_of(cfg);
  const std::string mode = cfg.string("mode");
  require(mode == "upper_bound" || mode == "lower_bound", cfg, "mode", "must be upper_bound or lower_bound");
  const double alpha = cfg.optional_number("alpha").value_or(1.0);
  require(alpha >= 0.0, cfg, "alpha", "must be >= 0");
  const double r0 = cfg.number("r0");
  require(r0 > 0.0, cfg, "r0", "must be positive");

  json res;
  CoefficientModel coeff;
  if (cfg.has("c0_threshold_beta")) {
    const double beta = cfg.number("c0_threshold_beta");
    const double C0 = cfg.number("C0"), p = cfg.number("p"), factor = cfg.number("c0_factor");
    require(mode == "lower_bound", cfg, "c0_threshold_beta", "needs mode = \"lower_bound\"");
    require(!cfg.has("c0"), cfg, "c0", "conflicts with c0_threshold_beta");
    require(C0 > 0.0, cfg, "C0", "must be positive");
    require(p >= 1.0, cfg, "p", "must be >= 1");
    const Regime regime = regime_of_beta(P, beta);
    const ThresholdResult thr = checked(cfg, "c0_threshold_beta", [&] {
      return threshold_pc0(regime, P, beta, CoefficientModel::lower_bound(alpha, C0, 1.0));
    });
    const double c0 = thr.threshold > 0.0 ? factor * thr.threshold / p : 1.0;
    coeff = CoefficientModel::lower_bound(alpha, C0, c0);
    res["threshold"] = threshold_json(thr);
    res["threshold"]["regime"] = to_string(regime);
    res["threshold"]["beta"] = beta;
  } else {
    const double c0 = cfg.optional_number("c0").value_or(1.0);
    require(c0 > 0.0, cfg, "c0", "must be positive");
    coeff = checked(cfg, mode == "upper_bound" ? "rho_scale" : "C0", [&] {
      return mode == "upper_bound"
                 ? CoefficientModel::upper_bound(alpha, c0, r0, cfg.optional_number("rho_scale"))
                 : CoefficientModel::lower_bound(alpha, cfg.number("C0"), c0);
    });
  }
  coeff.r0 = r0;
  res["coefficients"] = {{"mode", to_string(coeff.mode)}, {"alpha", coeff.alpha}, {"C0", coeff.C0},
                         {"c0", coeff.c0}, {"r0", coeff.r0}};

  const std::vector<double> etas = cfg.numbers("etas");
  const std::vector<double> radii = cfg.has("radii") ? cfg.numbers("radii") : std::vector<double>{10, 20, 40, 80};
  require(!etas.empty(), cfg, "etas", "must not be empty");
  for (double e : etas) require(std::isfinite(e), cfg, "etas", "entries must be finite");
  require(!radii.empty(), cfg, "radii", "must not be empty");
  for (size_t k = 0; k < radii.size(); ++k)
    require(radii[k] > 0.0 && (k == 0 || radii[k] > radii[k - 1]), cfg, "radii", "must be positive and increasing");
  ExhaustionOptions opt;
  opt.intervals = cfg.has("intervals") ? static_cast<int>(cfg.integer("intervals")) : 2000;
  require(opt.intervals >= 16 && opt.intervals <= 8000, cfg, "intervals", "must be between 16 and 8000");
  if (cfg.has("r_obs")) {
    opt.r_obs = cfg.number("r_obs");
    require(*opt.r_obs > 0.0 && *opt.r_obs <= radii.front(), cfg, "r_obs", "must lie in (0, smallest radius]");
  }
  opt.cauchy_tol = cfg.number("cauchy_tol");
  opt.barrier = cfg.boolean("barrier");
  opt.workers = workers;

  Csv centers{"eta", "radius", "center_value", "max_abs", "residual_norm", "bound_holds", "barrier_coverage"};
  Csv profiles{"eta", "radius", "r", "u"};
  json runs = json::array();
  std::vector<double> limits;
  bool all_ok = true;
  for (double eta : etas) {
    const ExhaustionReport rep = exhaustion_experiment(P, coeff, eta, radii, opt);
    json jr = {{"eta", eta},
               {"r_obs", rep.r_obs},
               {"center_gaps", numbers(rep.center_gaps)},
               {"window_gaps", numbers(rep.window_gaps)},
               {"gaps_shrink", rep.gaps_shrink},
               {"final_gap", rep.final_gap},
               {"cauchy", rep.cauchy},
               {"bounds_hold", rep.bounds_hold},
               {"center_decreasing", rep.center_decreasing}};
    json rj = json::array();
    for (const auto& run : rep.runs) {
      rj.push_back({{"radius", run.radius},
                    {"center_value", run.center_value},
                    {"max_abs", run.max_abs},
                    {"residual_norm", run.residual_norm},
                    {"energy", number(run.solution.energy)},
                    {"bound_holds", run.bound_holds},
                    {"tail_nodes", run.tail_nodes},
                    {"covered_nodes", run.covered_nodes}});
      centers.row(eta, run.radius, run.center_value, run.max_abs, run.residual_norm, run.bound_holds ? 1 : 0,
                  run.coverage);
      for (size_t i = 0; i < run.obs_r.size(); ++i) profiles.row(eta, run.radius, run.obs_r[i], run.obs_u[i]);
    }
    jr["runs"] = rj;
    if (rep.barrier_checked)
      jr["barrier"] = {{"beta", rep.barrier_beta}, {"C", rep.barrier_C}, {"K", rep.barrier_K},
                       {"min_coverage", rep.min_coverage}};
    runs.push_back(jr);
    limits.push_back(rep.runs.back().center_value);
    all_ok = all_ok && rep.bounds_hold;
  }
  res["experiments"] = runs;
  if (limits.size() > 1) {
    const auto [lo, hi] = std::minmax_element(limits.begin(), limits.end());
    res["limit_spread"] = *hi - *lo;
  }
  out.write("exhaustion_centers.csv", centers.text());
  out.write("exhaustion_profiles.csv", profiles.text());
  if (cfg.boolean("required") && !all_ok) exit_code = 1;
  summary = "exhaustion: " + std::to_string(etas.size()) + " exterior values x " + std::to_string(radii.size()) +
            " radii; bounds " + (all_ok ? "hold" : "violated");
  return res;
}

// --------------------------------------------------------------- parabolic

json run_parabolic(const ExperimentConfig& cfg, Output& out, int& exit_code, std::string& summary) {
  const OperatorParams P = checked(cfg, "s", [&] { return params_of(cfg); });
  const int workers = workers_of(cfg);
  const double alpha = cfg.optional_number("alpha").value_or(1.0);
  const double c0 = cfg.optional_number("c0").value_or(1.0);
  require(alpha >= 0.0, cfg, "alpha", "must be >= 0");
  require(c0 > 0.0, cfg, "c0", "must be positive");
  const double radius = cfg.number("radius");
  require(radius > 0.0, cfg, "radius", "must be positive");
  const int intervals = cfg.has("intervals") ? static_cast<int>(cfg.integer("intervals")) : 400;
  require(intervals >= 16 && intervals <= 8000, cfg, "intervals", "must be between 16 and 8000");
  const double dt = cfg.number("dt"), T = cfg.number("T");
  require(dt > 0.0, cfg, "dt", "must be positive");
  require(T >= dt, cfg, "T", "must be >= dt");
  const double u0_beta = cfg.number("u0_beta");
  require(u0_beta >= 0.0, cfg, "u0_beta", "must be >= 0 (0 means zero initial data)");
  for (double t : cfg.numbers("snapshot_times")) require(t >= 0.0 && t <= T, cfg, "snapshot_times", "must lie in [0, T]");
  const long long zero_steps = cfg.integer("zero_steps");
  require(zero_steps >= 1, cfg, "zero_steps", "must be >= 1");
  const double steady_dt = cfg.number("steady_dt"), steady_tol = cfg.number("steady_tol");
  require(steady_dt > 0.0, cfg, "steady_dt", "must be positive");
  require(steady_tol > 0.0, cfg, "steady_tol", "must be positive");

  const CoefficientModel coeff = checked(cfg, "rho_scale", [&] {
    return CoefficientModel::upper_bound(alpha, c0, cfg.number("r0"), cfg.optional_number("rho_scale"));
  });
  ParabolicRun run{DirichletProblem{P, coeff, cfg.number("eta"), RadialGrid::uniform(radius, intervals), {}},
                   {}, dt, T, cfg.numbers("snapshot_times")};
  if (u0_beta > 0.0) run.u0 = [w = WeightSpec(u0_beta)](double r) { return w.value(r); };

  json res;
  const EvolutionResult ev = evolve(run, workers);
  Csv snaps{"t", "r", "u"};
  for (const auto& sn : ev.snapshots)
    for (size_t i = 0; i < sn.values.size(); ++i) snaps.row(sn.t, run.problem.grid.nodes[i], sn.values[i]);
  out.write("parabolic_snapshots.csv", snaps.text());
  Csv norms{"step", "t", "max_abs", "max_dev"};
  for (size_t k = 0; k < ev.max_abs.size(); ++k) norms.row(int(k), k * dt, ev.max_abs[k], ev.max_dev[k]);
  out.write("parabolic_norms.csv", norms.text());
  res["evolution"] = {{"steps", ev.steps},
                      {"max_abs_nonincreasing", ev.max_abs_nonincreasing},
                      {"deviation_nonincreasing", ev.deviation_nonincreasing},
                      {"final_max_abs", ev.max_abs.back()}};

  ParabolicRun zrun = run;
  zrun.problem.eta = 0.0;
  zrun.u0 = {};
  zrun.snapshot_times.clear();
  const ZeroUniquenessReport z = zero_uniqueness_check(zrun, static_cast<int>(zero_steps));
  res["zero_uniqueness"] = {{"steps", z.steps}, {"max_abs", z.max_abs}, {"tol", z.tol},
                            {"verdict", z.pass ? "pass" : "fail"}};

  ParabolicRun srun = run;
  srun.dt = steady_dt;
  srun.T = std::max(srun.T, steady_dt);
  srun.snapshot_times.clear();
  const SteadyStateReport ss = steady_state(srun, steady_tol);
  res["steady_state"] = {{"steps", ss.steps},
                         {"converged", ss.converged},
                         {"last_change", ss.last_change},
                         {"max_gap_to_elliptic", ss.max_gap_to_elliptic}};

  bool ok = z.pass && ev.max_abs_nonincreasing && ss.converged;
  std::string lambda_txt;
  if (cfg.has("lambda_regime")) {
    const Regime regime = checked(cfg, "lambda_regime", [&] { return regime_from_string(cfg.string("lambda_regime")); });
    const double beta = cfg.optional_number("lambda_beta").value_or(regime_defaults(regime, P).first);
    const double la = cfg.number("lambda_alpha"), lC0 = cfg.number("lambda_C0");
    require(lC0 > 0.0, cfg, "lambda_C0", "must be positive");
    require(regime_preconditions_hold(regime, P, la, beta), cfg, "lambda_regime",
            "preconditions fail: needs " + regime_precondition_text(regime));
    const CoefficientModel lc = CoefficientModel::lower_bound(la, lC0, 1.0);
    const ThresholdResult thr = threshold_lambda(regime, P, beta, lc);
    const double lambda = cfg.optional_number("lambda").value_or(1.1 * thr.threshold);
    require(lambda >= 0.0, cfg, "lambda", "must be >= 0");
    const Certificate above = lambda_certificate(regime, P, beta, lc, lambda);
    const Certificate zero = lambda_certificate(regime, P, beta, lc, 0.0);
    res["lambda_threshold"] = threshold_json(thr);
    res["lambda_certificate"] = detail::certificate_json(above, false);
    res["lambda_zero_certificate"] = detail::certificate_json(zero, false);
    ok = ok && above.pass;
    lambda_txt = ", lambda " + num(lambda) + (above.pass ? " certified" : " not certified") + ", lambda 0 " +
                 (zero.pass ? "certified" : "not certified");
  }
  if (cfg.boolean("required") && !ok) exit_code = 1;
  summary = "parabolic: zero-data max " + num(z.max_abs) + ", steady-state gap " + num(ss.max_gap_to_elliptic) +
            lambda_txt;
  return res;
}

// ---------------------------------------------------------- oracle compare

json run_oracle(const ExperimentConfig& cfg, Output& out, int& exit_code, std::string& summary) {
  const int workers = workers_of(cfg);
  const auto& Ns = cfg.numbers("Ns");
  const auto& ss = cfg.numbers("ss");
  require(!Ns.empty(), cfg, "Ns", "must not be empty");
  require(!ss.empty(), cfg, "ss", "must not be empty");
  for (double N : Ns) require(N >= 1 && N <= 16 && N == std::trunc(N), cfg, "Ns", "entries must be integers in [1, 16]");
  for (double s : ss) require(s > 0.0 && s < 1.0, cfg, "ss", "entries must lie in (0, 1)");
  std::vector<double> radii = cfg.has("radii") ? cfg.numbers("radii")
                                               : std::vector<double>{0.0, 0.3, 1.0, 2.7, 5.0, 11.0, 20.0};
  for (double r : radii) require(r >= 0.0 && r <= 1e3, cfg, "radii", "entries must lie in [0, 1000]");
  const long long extra = cfg.integer("random_radii");
  require(extra >= 0 && extra <= 1000, cfg, "random_radii", "must be between 0 and 1000");
  std::mt19937_64 rng(static_cast<std::uint64_t>(cfg.integer("seed")));
  std::uniform_real_distribution<double> unit(0.0, 20.0);
  for (long long k = 0; k < extra; ++k) radii.push_back(unit(rng));
  const double tol = cfg.number("tolerance");

  struct Case {
    int N = 0;
    double s = 0.0, beta = 0.0;
    double constant = NAN, literature_gap = NAN, max_err = NAN;
    std::vector<double> closed, quad, err;
    std::string error;
  };
  std::vector<Case> cases;
  for (double Nd : Ns)
    for (double s : ss) {
      const int N = static_cast<int>(Nd);
      std::vector<double> betas;
      if (cfg.has("betas")) {
        betas = cfg.numbers("betas");
      } else {
        betas = {N - 2.0 * s - 0.1, N - 1.0, double(N), N + 0.2};
      }
      for (double b : betas)
        if (b > 0.0) {
          Case c;
          c.N = N;
          c.s = s;
          c.beta = b;
          cases.push_back(std::move(c));
        }
    }

  detail::parallel_for(static_cast<int>(cases.size()), workers, [&](int k) {
    Case& c = cases[k];
    try {
      const OperatorParams P = OperatorParams::make(c.N, c.s);
      const PsiClosedForm cf(P, WeightSpec(c.beta));
      const RadialFunction psi = RadialFunction::weight(c.beta);
      c.constant = cf.constant();
      c.literature_gap = cf.calibration().literature_relative_gap;
      c.max_err = 0.0;
      const double floor = 1e-4 * std::abs(c.constant);
      for (double r : radii) {
        const double q = fraclap_quadrature(P, psi, r);
        const double v = cf(r);
        const double e = std::abs(v - q) / std::max(std::abs(q), floor);
        c.closed.push_back(v);
        c.quad.push_back(q);
        c.err.push_back(e);
        c.max_err = std::max(c.max_err, e);
      }
    } catch (const Error& e) {
      c.error = e.what();
    }
  });

  Csv csv{"N", "s", "beta", "r", "closed", "quadrature", "rel_error"};
  json jc = json::array();
  double worst = 0.0;
  bool ok = true;
  for (const Case& c : cases) {
    for (size_t i = 0; i < c.err.size(); ++i) csv.row(c.N, c.s, c.beta, radii[i], c.closed[i], c.quad[i], c.err[i]);
    json j = {{"N", c.N}, {"s", c.s}, {"beta", c.beta}, {"closed_constant", number(c.constant)},
              {"gamma_ratio_gap", number(c.literature_gap)}, {"max_rel_error", number(c.max_err)}};
    if (!c.error.empty()) j["error"] = c.error;
    jc.push_back(j);
    if (!c.error.empty() || !(c.max_err <= tol)) ok = false;
    if (std::isfinite(c.max_err)) worst = std::max(worst, c.max_err);
  }
  out.write("oracle_compare.csv", csv.text());
  if (cfg.boolean("required") && !ok) exit_code = 1;
  summary = "oracle_compare: " + std::to_string(cases.size()) + " cases, max relative error " + num(worst) +
            (ok ? " (within " : " (exceeds ") + num(tol) + ")";
  return {{"cases", jc}, {"radii", numbers(radii)}, {"max_rel_error", worst}, {"tolerance", tol},
          {"verdict", ok ? "pass" : "fail"}};
}

}  // namespace

RunOutcome run_experiment(const ExperimentConfig& config) {
  const ExperimentConfig cfg = config.resolved();
  const std::string kind = cfg.kind();
  Output out;
  out.dir = cfg.string("output_dir");
  require(!out.dir.empty(), cfg, "output_dir", "must not be empty");
  const long long seed = cfg.integer("seed");
  require(seed >= 0, cfg, "seed", "must be >= 0");
  fs::create_directories(out.dir);

  RunOutcome outcome;
  json results;
  if (kind == "certify") results = run_certify(cfg, out, outcome.exit_code, outcome.summary);
  else if (kind == "sweep") results = run_sweep(cfg, out, outcome.exit_code, outcome.summary);
  else if (kind == "exhaustion") results = run_exhaustion(cfg, out, outcome.exit_code, outcome.summary);
  else if (kind == "parabolic") results = run_parabolic(cfg, out, outcome.exit_code, outcome.summary);
  else results = run_oracle(cfg, out, outcome.exit_code, outcome.summary);

  json report;
  report["schema_version"] = kReportSchemaVersion;
  report["tool"] = "mixlap";
  report["kind"] = kind;
  report["config"] = config_json(cfg);
  report["results"] = results;
  json files = json::array();
  for (const auto& f : out.files) files.push_back(fs::relative(f, out.dir).generic_string());
  report["files"] = files;
  report["exit_code"] = outcome.exit_code;
  report["summary"] = outcome.summary;
  outcome.report = out.dir / "report.json";
  write_atomic(outcome.report, report.dump(2) + "\n");
  outcome.files = out.files;
  outcome.files.push_back(outcome.report);
  return outcome;
}

}  // namespace mixlap
