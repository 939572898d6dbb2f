#pragma once

// Experiment orchestration: configs to runs, seeded sweeps over (d, T) grids,
// CSV persistence, and report generation. Everything is deterministic given
// the config; parallel and serial execution produce identical files.

#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <tuple>
#include <vector>

#include "config.hpp"
#include "csv.hpp"
#include "metrics.hpp"
#include "optimizers.hpp"

namespace adalab {

inline constexpr const char* kSummaryColumns =
    "run_id,seed,d,T,eta,delta,method,problem,delta1,avg_grad_l1,min_grad_l1,avg_grad_l2,"
    "grad1_l1,phi_grad1,phi_tilde_L,phi_sigma,Q,hT,theorem_rhs,status";

inline constexpr const char* kTrajectoryColumns =
    "t,f_value,grad_l1,grad_l2,grad_linf,step_min,step_max,etahat_min";

// Worker count for (cell x seed) parallelism; defaults to 1.
inline int worker_count() {
  const char* env = std::getenv("ADALAB_WORKERS");
  if (!env) return 1;
  const int n = std::atoi(env);
  return n < 1 ? 1 : n;
}

// Runs fn(i) for i in [0, n) over the worker pool; results land in
// caller-owned slots, so ordering (and output) is independent of scheduling.
template <typename Fn>
inline void parallel_for(std::size_t n, Fn&& fn) {
  const int workers = worker_count();
  if (workers <= 1 || n <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::vector<std::thread> pool;
  const int used = static_cast<int>(std::min<std::size_t>(n, static_cast<std::size_t>(workers)));
  for (int w = 0; w < used; ++w) {
    pool.emplace_back([&, w] {
      for (std::size_t i = static_cast<std::size_t>(w); i < n; i += static_cast<std::size_t>(used)) fn(i);
    });
  }
  for (auto& th : pool) th.join();
}

inline Problem build_problem(const ExperimentConfig& cfg) {
  if (cfg.problem_kind == "quadratic") {
    Problem p = make_quadratic(cfg.coeffs.empty() ? std::vector<double>(cfg.d, cfg.scale) : cfg.coeffs);
    return p;
  }
  if (cfg.problem_kind == "separable_nonconvex") {
    return make_separable_nonconvex(cfg.coeffs.empty() ? std::vector<double>(cfg.d, cfg.scale) : cfg.coeffs);
  }
  if (cfg.problem_kind == "dense_grad_sparse_curv")
    return make_extreme_case(ExtremeKind::DenseGradSparseCurv, cfg.d, cfg.scale);
  if (cfg.problem_kind == "sparse_grad_dense_curv")
    return make_extreme_case(ExtremeKind::SparseGradDenseCurv, cfg.d, cfg.scale);
  throw std::invalid_argument("build_problem: unknown kind '" + cfg.problem_kind + "'");
}

inline NoiseModel build_noise(const ExperimentConfig& cfg, int d) {
  NoiseModel nm;
  nm.distribution = cfg.noise_distribution == "gaussian" ? NoiseDist::Gaussian : NoiseDist::Rademacher;
  if (cfg.sigma_profile == "constant") nm.sigma = sigma_constant(d, cfg.sigma_s);
  else if (cfg.sigma_profile == "spike") nm.sigma = sigma_spike(d, cfg.sigma_s);
  else nm.sigma = cfg.sigma_list;
  return nm;
}

inline double resolve_delta(const ExperimentConfig& cfg) {
  if (cfg.delta >= 0.0) return cfg.delta;
  return std::min(1e-8, 1.0 / (2.0 * static_cast<double>(cfg.d)));
}

inline double resolve_eta(const ExperimentConfig& cfg, const Problem& p, const NoiseModel& nm) {
  if (cfg.eta_rule == "constant") return cfg.eta;
  if (cfg.eta_rule == "inv_sqrt_d") return 1.0 / std::sqrt(static_cast<double>(p.dim));
  // sgd_tuned: needs delta1, L_inf and the l2 noise mass of the problem at hand
  const Eval e0 = eval(p, p.init_point);
  const double delta1 = e0.value - p.f_star;
  const double L_inf = norms(p.smoothness).linf;
  const double sigma_l2 = norms(nm.sigma).l2;
  return sgd_tuned_eta(L_inf, sigma_l2, delta1, cfg.T);
}

inline Method method_from_name(const std::string& name) {
  if (name == "adagrad") return Method::AdaGrad;
  if (name == "adagrad_norm") return Method::AdaGradNorm;
  if (name == "sgd") return Method::SGD;
  throw std::invalid_argument("unknown method '" + name + "'");
}

struct SummaryRow {
  std::string run_id;
  std::uint64_t seed = 0;
  int d = 0;
  long T = 0;
  double eta = 0.0, delta = 0.0;
  std::string method, problem;
  double delta1 = 0.0;
  double avg_grad_l1 = 0.0, min_grad_l1 = 0.0, avg_grad_l2 = 0.0;
  double grad1_l1 = 0.0;
  double phi_grad1 = 0.0, phi_tilde_L = 0.0, phi_sigma = 0.0;
  double Q = 0.0, hT = 0.0, theorem_rhs = 0.0;
  std::string status = "ok";
};

inline std::string summary_row_csv(const SummaryRow& r) {
  std::vector<std::string> c;
  c.push_back(r.run_id);
  c.push_back(std::to_string(r.seed));
  c.push_back(std::to_string(r.d));
  c.push_back(std::to_string(r.T));
  c.push_back(fmt_num(r.eta));
  c.push_back(fmt_num(r.delta));
  c.push_back(r.method);
  c.push_back(r.problem);
  c.push_back(fmt_num(r.delta1));
  c.push_back(fmt_num(r.avg_grad_l1));
  c.push_back(fmt_num(r.min_grad_l1));
  c.push_back(fmt_num(r.avg_grad_l2));
  c.push_back(fmt_num(r.grad1_l1));
  c.push_back(fmt_num(r.phi_grad1));
  c.push_back(fmt_num(r.phi_tilde_L));
  c.push_back(fmt_num(r.phi_sigma));
  c.push_back(fmt_num(r.Q));
  c.push_back(fmt_num(r.hT));
  c.push_back(fmt_num(r.theorem_rhs));
  c.push_back(r.status);
  return join_csv(c);
}

namespace detail {

inline double density_or_nan(const std::vector<double>& v, bool tilde) {
  const Norms n = norms(v);
  if ((tilde ? n.linf : n.l2) == 0.0) return std::numeric_limits<double>::quiet_NaN();
  return tilde ? density_phi_tilde(v) : density_phi(v);
}

}  // namespace detail

// One summary row from a finished trajectory plus its problem context.
inline SummaryRow summarize_run(const Problem& p, const NoiseModel& nm, const Trajectory& traj,
                                const std::string& problem_name) {
  SummaryRow r;
  const RunSummary& sm = traj.summary;
  r.seed = traj.seed;
  r.d = p.dim;
  r.T = traj.T;
  r.eta = traj.eta;
  r.delta = traj.delta;
  r.method = method_name(traj.method);
  r.problem = problem_name;
  std::ostringstream id;
  id << problem_name << '-' << r.method << "-d" << r.d << "-T" << r.T << "-s" << r.seed;
  r.run_id = id.str();
  r.delta1 = sm.delta1;
  r.avg_grad_l1 = sm.avg_grad_l1;
  r.min_grad_l1 = sm.min_grad_l1;
  r.avg_grad_l2 = sm.avg_grad_l2;
  r.grad1_l1 = sm.grad1_l1;
  const Eval e0 = eval(p, p.init_point);
  r.phi_grad1 = detail::density_or_nan(e0.gradient, false);
  r.phi_tilde_L = detail::density_or_nan(p.smoothness, true);
  r.phi_sigma = detail::density_or_nan(nm.sigma, false);
  const double nan = std::numeric_limits<double>::quiet_NaN();
  if (traj.delta > 0.0) {
    BoundInputs bi;
    bi.delta1 = sm.delta1;
    bi.eta = traj.eta;
    bi.delta = traj.delta;
    bi.sigma = nm.sigma;
    bi.L = p.smoothness;
    bi.grad1_l2 = sm.grad1_l2;
    bi.T = traj.T;
    bi.d = p.dim;
    r.hT = bound_hT(bi);
    r.Q = bound_Q(bi);
    r.theorem_rhs = theorem_hypothesis(traj.delta, p.dim)
                        ? theorem_bound(r.Q, traj.eta, traj.T, norms(nm.sigma).l1)
                        : nan;
  } else {
    r.hT = nan;
    r.Q = nan;
    r.theorem_rhs = nan;
  }
  r.status = sm.diverged ? "diverged" : "ok";
  return r;
}

inline std::vector<std::string> trajectory_csv_lines(const Trajectory& traj) {
  std::vector<std::string> lines;
  lines.push_back(kTrajectoryColumns);
  for (std::size_t t = 0; t < traj.records.size(); ++t) {
    const TrajectoryRecord& rec = traj.records[t];
    const Norms n = norms(rec.true_gradient);
    double smin = std::numeric_limits<double>::infinity(), smax = 0.0;
    for (double s : rec.step_sizes) {
      smin = std::min(smin, s);
      smax = std::max(smax, s);
    }
    double ehmin = std::numeric_limits<double>::quiet_NaN();
    if (!rec.etahat.empty()) {
      ehmin = std::numeric_limits<double>::infinity();
      for (double v : rec.etahat) ehmin = std::min(ehmin, v);
    }
    std::vector<std::string> c;
    c.push_back(std::to_string(t + 1));
    c.push_back(fmt_num(rec.f_value));
    c.push_back(fmt_num(n.l1));
    c.push_back(fmt_num(n.l2));
    c.push_back(fmt_num(n.linf));
    c.push_back(fmt_num(smin));
    c.push_back(fmt_num(smax));
    c.push_back(fmt_num(ehmin));
    lines.push_back(join_csv(c));
  }
  return lines;
}

struct ExperimentResult {
  std::vector<SummaryRow> rows;          // one per seed, in seed order
  std::vector<RunSummary> run_summaries; // matching per-seed run summaries
  std::string summary_path;
};

inline ExperimentResult run_experiment(const ExperimentConfig& cfg, bool write_files = true) {
  const Problem p = build_problem(cfg);
  const NoiseModel nm = build_noise(cfg, p.dim);
  const double delta = resolve_delta(cfg);
  const double eta = resolve_eta(cfg, p, nm);
  const Method method = method_from_name(cfg.method);

  ExperimentResult res;
  res.rows.resize(cfg.seeds.size());
  res.run_summaries.resize(cfg.seeds.size());
  std::vector<Trajectory> trajs(cfg.record_trajectory ? cfg.seeds.size() : 0);

  parallel_for(cfg.seeds.size(), [&](std::size_t k) {
    RunSpec rs;
    rs.method = method;
    rs.eta = eta;
    rs.delta = delta;
    rs.T = cfg.T;
    rs.seed = cfg.seeds[k];
    rs.record.trajectory = cfg.record_trajectory;
    rs.record.diagnostics = cfg.record_diagnostics || cfg.record_trajectory;
    rs.record.summary_only = cfg.record_summary_only && !cfg.record_trajectory;
    Trajectory traj = run(p, nm, rs);
    res.rows[k] = summarize_run(p, nm, traj, cfg.problem_kind);
    res.run_summaries[k] = traj.summary;
    if (cfg.record_trajectory) trajs[k] = std::move(traj);
  });

  if (write_files) {
    std::filesystem::create_directories(cfg.output_dir);
    std::vector<std::string> lines;
    lines.push_back(kSummaryColumns);
    for (const SummaryRow& r : res.rows) lines.push_back(summary_row_csv(r));
    res.summary_path = cfg.output_dir + "/summary.csv";
    write_lines(res.summary_path, lines);
    if (cfg.record_trajectory)
      for (std::size_t k = 0; k < trajs.size(); ++k)
        write_lines(cfg.output_dir + "/trajectory_" + res.rows[k].run_id + ".csv",
                    trajectory_csv_lines(trajs[k]));
  }
  return res;
}

struct SweepSpec {
  ExperimentConfig base;
  std::vector<int> d_grid;
  std::vector<long> T_grid;
  std::string metric = "avg_grad_l1";  // avg_grad_l1 | min_grad_l1 | avg_grad_l2
};

struct SweepCell {
  int d = 0;
  long T = 0;
  int n_seeds = 0;
  double avg_grad_l1 = 0.0, min_grad_l1 = 0.0, avg_grad_l2 = 0.0;
  bool failed = false;
};

struct SweepResult {
  std::vector<SweepCell> cells;
  RateFit fit;
  bool fit_ok = false;
  std::string fit_note;
  std::string grid_path, fit_path;
};

inline double cell_metric(const SweepCell& c, const std::string& metric) {
  if (metric == "avg_grad_l1") return c.avg_grad_l1;
  if (metric == "min_grad_l1") return c.min_grad_l1;
  if (metric == "avg_grad_l2") return c.avg_grad_l2;
  throw std::invalid_argument("unknown sweep metric '" + metric + "'");
}

inline SweepResult sweep(const SweepSpec& spec, bool write_files = true) {
  if (spec.d_grid.empty() || spec.T_grid.empty())
    throw std::invalid_argument("sweep: empty grid axis");
  cell_metric(SweepCell{}, spec.metric);  // validate the metric name up front

  SweepResult res;
  res.cells.resize(spec.d_grid.size() * spec.T_grid.size());
  const std::size_t nT = spec.T_grid.size();

  parallel_for(res.cells.size(), [&](std::size_t idx) {
    const int d = spec.d_grid[idx / nT];
    const long T = spec.T_grid[idx % nT];
    ExperimentConfig cfg = spec.base;
    cfg.d = d;
    cfg.T = T;
    SweepCell cell;
    cell.d = d;
    cell.T = T;
    // seeds inside the cell run serially; the grid is the parallel axis
    const ExperimentResult er = run_experiment(cfg, false);
    int ok = 0;
    for (const SummaryRow& r : er.rows) {
      if (r.status != "ok") continue;
      ++ok;
      cell.avg_grad_l1 += r.avg_grad_l1;
      cell.min_grad_l1 += r.min_grad_l1;
      cell.avg_grad_l2 += r.avg_grad_l2;
    }
    cell.n_seeds = ok;
    if (ok == 0) {
      cell.failed = true;
    } else {
      cell.avg_grad_l1 /= ok;
      cell.min_grad_l1 /= ok;
      cell.avg_grad_l2 /= ok;
    }
    res.cells[idx] = cell;
  });

  std::vector<std::tuple<double, double, double>> samples;
  for (const SweepCell& c : res.cells)
    if (!c.failed) samples.emplace_back(c.d, c.T, cell_metric(c, spec.metric));
  try {
    res.fit = fit_rate(samples);
    res.fit_ok = true;
    res.fit_note = "ok";
  } catch (const std::exception& e) {
    res.fit_ok = false;
    res.fit_note = std::string("fit skipped: ") + e.what();
  }

  if (write_files) {
    std::filesystem::create_directories(spec.base.output_dir);
    std::vector<std::string> lines;
    lines.push_back("d,T,n_seeds,avg_grad_l1,min_grad_l1,avg_grad_l2,status");
    for (const SweepCell& c : res.cells) {
      std::vector<std::string> cells;
      cells.push_back(std::to_string(c.d));
      cells.push_back(std::to_string(c.T));
      cells.push_back(std::to_string(c.n_seeds));
      cells.push_back(fmt_num(c.avg_grad_l1));
      cells.push_back(fmt_num(c.min_grad_l1));
      cells.push_back(fmt_num(c.avg_grad_l2));
      cells.push_back(c.failed ? "failed" : "ok");
      lines.push_back(join_csv(cells));
    }
    res.grid_path = spec.base.output_dir + "/grid.csv";
    write_lines(res.grid_path, lines);

    std::vector<std::string> fit_lines;
    if (res.fit_ok) {
      fit_lines.push_back("metric = " + spec.metric);
      fit_lines.push_back("alpha_d = " + fmt_num(res.fit.alpha_d));
      fit_lines.push_back("beta_T = " + fmt_num(res.fit.beta_T));
      fit_lines.push_back("intercept = " + fmt_num(res.fit.intercept));
      fit_lines.push_back("r_squared = " + fmt_num(res.fit.r_squared));
    } else {
      fit_lines.push_back(res.fit_note);
    }
    res.fit_path = spec.base.output_dir + "/ratefit.txt";
    write_lines(res.fit_path, fit_lines);
  }
  return res;
}

struct ReportResult {
  std::string bounds_path, comparison_path;
  std::vector<std::string> plot_paths;
  // (problem, d) -> method -> mean min_grad_l1, plus R1/R2 per group
  std::vector<std::string> comparison_lines;
};

// Reads summary CSVs and emits (a) a bound-vs-empirics table, (b) an
// AdaGrad-vs-SGD comparison with R1/R2 per (problem, d), (c) two-column
// plot-data series per (problem, method) curve.
inline ReportResult report(const std::vector<std::string>& paths, const std::string& out_dir) {
  if (paths.empty()) throw std::invalid_argument("report: empty input list");
  std::filesystem::create_directories(out_dir);

  struct Row {
    std::string run_id, method, problem, status;
    int d;
    long T;
    double avg_l1, min_l1, Q, rhs, phi_g, phi_L, phi_s;
  };
  std::vector<Row> rows;
  for (const std::string& path : paths) {
    const CsvTable t = read_csv(path);
    const int c_id = t.col_required("run_id", path);
    const int c_d = t.col_required("d", path);
    const int c_T = t.col_required("T", path);
    const int c_m = t.col_required("method", path);
    const int c_p = t.col_required("problem", path);
    const int c_avg = t.col_required("avg_grad_l1", path);
    const int c_min = t.col_required("min_grad_l1", path);
    const int c_Q = t.col_required("Q", path);
    const int c_rhs = t.col_required("theorem_rhs", path);
    const int c_pg = t.col_required("phi_grad1", path);
    const int c_pL = t.col_required("phi_tilde_L", path);
    const int c_ps = t.col_required("phi_sigma", path);
    const int c_st = t.col_required("status", path);
    for (const auto& raw : t.rows) {
      Row r;
      r.run_id = raw[c_id];
      r.d = std::atoi(raw[c_d].c_str());
      r.T = std::atol(raw[c_T].c_str());
      r.method = raw[c_m];
      r.problem = raw[c_p];
      r.avg_l1 = std::atof(raw[c_avg].c_str());
      r.min_l1 = std::atof(raw[c_min].c_str());
      r.Q = std::atof(raw[c_Q].c_str());
      r.rhs = std::atof(raw[c_rhs].c_str());
      r.phi_g = std::atof(raw[c_pg].c_str());
      r.phi_L = std::atof(raw[c_pL].c_str());
      r.phi_s = std::atof(raw[c_ps].c_str());
      r.status = raw[c_st];
      rows.push_back(r);
    }
  }

  ReportResult res;
  // (a) bound-vs-empirics
  std::vector<std::string> blines;
  blines.push_back("run_id,avg_grad_l1,Q,theorem_rhs,margin,bound_holds");
  for (const Row& r : rows) {
    std::vector<std::string> c;
    c.push_back(r.run_id);
    c.push_back(fmt_num(r.avg_l1));
    c.push_back(fmt_num(r.Q));
    c.push_back(fmt_num(r.rhs));
    c.push_back(fmt_num(r.rhs - r.avg_l1));
    c.push_back(r.avg_l1 <= r.rhs ? "yes" : "no");
    blines.push_back(join_csv(c));
  }
  res.bounds_path = out_dir + "/bounds_table.csv";
  write_lines(res.bounds_path, blines);

  // (b) comparison table per (problem, d): seed-mean min_grad_l1 by method
  std::map<std::pair<std::string, int>, std::map<std::string, std::pair<double, int>>> groups;
  std::map<std::pair<std::string, int>, Row> any_row;
  for (const Row& r : rows) {
    if (r.status != "ok") continue;
    auto key = std::make_pair(r.problem, r.d);
    auto& acc = groups[key][r.method];
    acc.first += r.min_l1;
    acc.second += 1;
    any_row.emplace(key, r);
  }
  std::vector<std::string> clines;
  clines.push_back("problem,d,adagrad_min_grad_l1,sgd_min_grad_l1,ratio_sgd_over_adagrad,R1,R2");
  for (const auto& [key, methods] : groups) {
    const auto ada = methods.find("adagrad");
    const auto sgd = methods.find("sgd");
    if (ada == methods.end() || sgd == methods.end()) continue;
    const double am = ada->second.first / ada->second.second;
    const double sm = sgd->second.first / sgd->second.second;
    const Row& ref = any_row.at(key);
    double r1 = std::numeric_limits<double>::quiet_NaN();
    double r2 = std::numeric_limits<double>::quiet_NaN();
    if (ref.phi_g > 0.0 && ref.phi_L > 0.0) {
      r1 = std::sqrt(ref.phi_g / ref.phi_L);
      if (ref.phi_s > 0.0) r2 = std::sqrt(ref.phi_g) / std::pow(ref.phi_s * ref.phi_L, 0.25);
    }
    std::vector<std::string> c;
    c.push_back(key.first);
    c.push_back(std::to_string(key.second));
    c.push_back(fmt_num(am));
    c.push_back(fmt_num(sm));
    c.push_back(fmt_num(sm / am));
    c.push_back(fmt_num(r1));
    c.push_back(fmt_num(r2));
    clines.push_back(join_csv(c));
    res.comparison_lines.push_back("problem=" + key.first + " d=" + std::to_string(key.second) +
                                   " ratio=" + fmt_num(sm / am) + " R1=" + fmt_num(r1) +
                                   " R2=" + fmt_num(r2));
  }
  res.comparison_path = out_dir + "/comparison_table.csv";
  write_lines(res.comparison_path, clines);

  // (c) plot data: one (x, y) series per (problem, method), metric vs d and vs T
  std::map<std::pair<std::string, std::string>, std::map<int, std::pair<double, int>>> by_d;
  std::map<std::pair<std::string, std::string>, std::map<long, std::pair<double, int>>> by_T;
  for (const Row& r : rows) {
    if (r.status != "ok") continue;
    auto& ad = by_d[{r.problem, r.method}][r.d];
    ad.first += r.min_l1;
    ad.second += 1;
    auto& aT = by_T[{r.problem, r.method}][r.T];
    aT.first += r.avg_l1;
    aT.second += 1;
  }
  for (const auto& [key, pts] : by_d) {
    if (pts.size() < 2) continue;
    std::vector<std::string> lines;
    for (const auto& [d, acc] : pts)
      lines.push_back(std::to_string(d) + " " + fmt_num(acc.first / acc.second));
    const std::string path = out_dir + "/plot_" + key.first + "_" + key.second + "_min_grad_l1_vs_d.txt";
    write_lines(path, lines);
    res.plot_paths.push_back(path);
  }
  for (const auto& [key, pts] : by_T) {
    if (pts.size() < 2) continue;
    std::vector<std::string> lines;
    for (const auto& [T, acc] : pts)
      lines.push_back(std::to_string(T) + " " + fmt_num(acc.first / acc.second));
    const std::string path = out_dir + "/plot_" + key.first + "_" + key.second + "_avg_grad_l1_vs_T.txt";
    write_lines(path, lines);
    res.plot_paths.push_back(path);
  }
  return res;
}

}  // namespace adalab
