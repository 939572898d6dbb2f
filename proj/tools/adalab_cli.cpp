// Command-line front end: run experiments from config files, sweep (d, T)
// grids, generate reports, run lower-bound trials, and verify the library's
// invariants.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "adalab/config.hpp"
#include "adalab/harness.hpp"
#include "adalab/lower_bound.hpp"

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open config file: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

template <typename T>
std::vector<T> parse_grid(const std::string& s) {
  std::vector<T> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    out.push_back(static_cast<T>(std::stol(item)));
  }
  return out;
}

int cmd_run(const std::string& config_path) {
  const adalab::ExperimentConfig cfg = adalab::load_config(read_file(config_path));
  const adalab::ExperimentResult res = adalab::run_experiment(cfg);
  for (const adalab::SummaryRow& r : res.rows)
    std::cout << r.run_id << " status=" << r.status
              << " avg_grad_l1=" << adalab::fmt_num(r.avg_grad_l1)
              << " min_grad_l1=" << adalab::fmt_num(r.min_grad_l1)
              << " theorem_rhs=" << adalab::fmt_num(r.theorem_rhs) << "\n";
  std::cout << "summary written to " << res.summary_path << "\n";
  return 0;
}

int cmd_sweep(const std::string& config_path, const std::string& d_grid,
              const std::string& t_grid, const std::string& metric) {
  adalab::SweepSpec spec;
  spec.base = adalab::load_config(read_file(config_path));
  spec.d_grid = parse_grid<int>(d_grid);
  spec.T_grid = parse_grid<long>(t_grid);
  spec.metric = metric;
  const adalab::SweepResult res = adalab::sweep(spec);
  std::cout << "grid written to " << res.grid_path << "\n";
  if (res.fit_ok)
    std::cout << "fit: alpha_d=" << adalab::fmt_num(res.fit.alpha_d)
              << " beta_T=" << adalab::fmt_num(res.fit.beta_T)
              << " r_squared=" << adalab::fmt_num(res.fit.r_squared) << "\n";
  else
    std::cout << res.fit_note << "\n";
  return 0;
}

int cmd_report(const std::vector<std::string>& csvs, const std::string& out_dir) {
  const adalab::ReportResult res = adalab::report(csvs, out_dir);
  for (const std::string& line : res.comparison_lines) std::cout << line << "\n";
  std::cout << "bounds table: " << res.bounds_path << "\n";
  std::cout << "comparison table: " << res.comparison_path << "\n";
  for (const std::string& p : res.plot_paths) std::cout << "plot data: " << p << "\n";
  return 0;
}

int cmd_lowerbound(int d, double eps, const std::string& method, long budget,
                   double eta, double delta, const std::string& report_path) {
  adalab::LbMethod m;
  if (method == "gd") m = adalab::LbMethod::GradientDescent;
  else if (method == "adagrad") m = adalab::LbMethod::AdaGrad;
  else if (method == "adagrad_norm") m = adalab::LbMethod::AdaGradNorm;
  else {
    std::cerr << "unknown method '" << method
              << "' (deterministic methods only: gd, adagrad, adagrad_norm)\n";
    return 2;
  }
  const adalab::TrialResult tr = adalab::query_complexity_trial(m, eta, delta, d, eps, budget);
  const bool below = static_cast<double>(tr.queries_used) < tr.threshold;
  const bool contract = !below || tr.final_grad_l1 >= eps * (1.0 - 1e-6);
  std::cout << "lowerbound d=" << d << " eps=" << adalab::fmt_num(eps) << " method=" << method
            << " budget=" << budget << ": queries=" << tr.queries_used
            << " grad_l1=" << adalab::fmt_num(tr.final_grad_l1)
            << " threshold=" << adalab::fmt_num(tr.threshold)
            << " instance=" << (tr.report.passed ? "verified" : "FAILED")
            << " contract=" << (contract ? "holds" : "VIOLATED") << "\n";
  std::vector<std::string> lines;
  lines.push_back("d = " + std::to_string(d));
  lines.push_back("eps = " + adalab::fmt_num(eps));
  lines.push_back("method = " + method);
  lines.push_back("queries_used = " + std::to_string(tr.queries_used));
  lines.push_back("threshold = " + adalab::fmt_num(tr.threshold));
  lines.push_back("final_grad_l1 = " + adalab::fmt_num(tr.final_grad_l1));
  lines.push_back("max_second_derivative = " + adalab::fmt_num(tr.report.max_second_derivative));
  lines.push_back("p0_minus_min = " + adalab::fmt_num(tr.report.p0_minus_min));
  lines.push_back("max_knot_residual = " + adalab::fmt_num(tr.report.max_knot_residual));
  lines.push_back("max_oracle_mismatch = " + adalab::fmt_num(tr.report.max_oracle_mismatch));
  lines.push_back(std::string("verified = ") + (tr.report.passed ? "yes" : "no"));
  if (!tr.report.passed) lines.push_back("failure = " + tr.report.failure);
  adalab::write_lines(report_path, lines);
  return (tr.report.passed && contract) ? 0 : 1;
}

bool check(const char* name, bool ok, int& failures) {
  std::cout << (ok ? "[ok]   " : "[FAIL] ") << name << "\n";
  if (!ok) ++failures;
  return ok;
}

// Quick pass over the library's cross-module invariants.
int cmd_verify() {
  using namespace adalab;
  int failures = 0;

  {
    bool ok = true;
    for (int rep = 0; rep < 200 && ok; ++rep) {
      const int d = 1 + static_cast<int>(counter_hash(7, rep, 0) % 8);
      std::vector<double> c(d), w(d);
      for (int i = 0; i < d; ++i) {
        c[i] = uniform_open01(counter_hash(8, rep, i)) * 3.0;
        w[i] = (uniform_open01(counter_hash(9, rep, i)) - 0.5) * 4.0;
      }
      const Problem p = rep % 2 ? make_quadratic(c) : make_separable_nonconvex(c);
      ok = check_gradient_fd(p, w, 1e-5) <= 1e-5;
    }
    check("analytic gradients match finite differences", ok, failures);
  }
  {
    bool ok = true;
    for (int rep = 0; rep < 200 && ok; ++rep) {
      std::vector<double> a;
      const int n = 1 + static_cast<int>(counter_hash(11, rep, 0) % 50);
      for (int i = 0; i < n; ++i) a.push_back(uniform_open01(counter_hash(12, rep, i)) * 10.0);
      const double delta = 0.01 + uniform_open01(counter_hash(13, rep, 0)) * 9.99;
      ok = log_sum_lemma_check(a, delta).holds;
    }
    check("log-sum lemma holds on random sequences", ok, failures);
  }
  {
    bool ok = true;
    for (int rep = 0; rep < 2000 && ok; ++rep) {
      const int d = 1 + static_cast<int>(counter_hash(21, rep, 0) % 64);
      std::vector<double> v(d);
      bool nonzero = false;
      for (int i = 0; i < d; ++i) {
        v[i] = (uniform_open01(counter_hash(22, rep, i)) - 0.5) * 6.0;
        nonzero = nonzero || v[i] != 0.0;
      }
      if (!nonzero) continue;
      const double phi = density_phi(v), phit = density_phi_tilde(v);
      const double lo = 1.0 / d - 1e-12, hi = 1.0 + 1e-12;
      const Norms n = norms(v);
      ok = phi >= lo && phi <= hi && phit >= lo && phit <= hi &&
           std::abs(n.l1 - std::sqrt(d * phi) * n.l2) <= 1e-12 * std::max(1.0, n.l1);
    }
    check("density ranges and the l1 identity", ok, failures);
  }
  {
    const Problem p = make_separable_nonconvex({1.0, 2.0, 0.5});
    const NoiseModel nm{sigma_constant(3, 0.7), NoiseDist::Rademacher};
    const std::vector<double> w = {0.3, -1.2, 2.0};
    const auto g1 = sample_gradient(p, nm, w, 42, 5);
    const auto g2 = sample_gradient(p, nm, w, 42, 5);
    check("oracle draws are reproducible for identical (seed, t, i)", g1 == g2, failures);
    const NoiseStats st = estimate_noise_stats(p, nm, w, 20000, 3);
    bool ok = true;
    for (int i = 0; i < 3; ++i)
      ok = ok && std::abs(st.mean_error[i]) < 4.0 * 0.7 / std::sqrt(20000.0) &&
           std::abs(st.variance[i] - 0.49) < 0.05 * 0.49 + 3e-3;
    check("oracle mean/variance near nominal", ok, failures);
  }
  {
    const Problem p = make_quadratic(std::vector<double>(4, 1.0));
    const NoiseModel nm{sigma_constant(4, 0.5), NoiseDist::Rademacher};
    RunSpec rs;
    rs.method = Method::AdaGrad;
    rs.eta = 0.5;
    rs.delta = 1e-8;
    rs.T = 500;
    rs.seed = 17;
    rs.record.diagnostics = true;
    const Trajectory traj = run(p, nm, rs);
    bool ok = !traj.summary.diverged && traj.summary.max_step_increase <= 1e-15;
    for (std::size_t i = 0; i < 4 && ok; ++i) {
      const double tilde = auxiliary_stepsize(traj.summary.g_sq_sum_head[i],
                                              traj.summary.grad_sq_sum[i], nm.sigma[i], rs.eta, rs.delta);
      ok = traj.summary.min_etahat[i] >= tilde - 1e-15;
    }
    check("step sizes non-increasing and etahat >= auxiliary bound", ok, failures);
    const double growth_cap = rs.eta * 2.0 * norms(p.smoothness).linf;
    check("trajectory gradient growth within the per-step cap",
          traj.summary.max_growth_step <= growth_cap + 1e-12, failures);
  }
  {
    const TrialResult tr = query_complexity_trial(LbMethod::AdaGrad, 1.0, 1e-8, 4, 0.1, 12);
    check("lower-bound instance verifies and resists below the query threshold",
          tr.report.passed && tr.final_grad_l1 >= 0.1 * (1.0 - 1e-6), failures);
  }
  std::cout << (failures == 0 ? "verify: all checks passed\n" : "verify: FAILURES\n");
  return failures == 0 ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"stochastic non-convex optimization laboratory"};
  app.require_subcommand(1);

  std::string config_path, d_grid, t_grid, metric = "avg_grad_l1", out_dir = "report_out";
  std::vector<std::string> csvs;
  int lb_d = 1;
  double lb_eps = 0.1, lb_eta = 1.0, lb_delta = 1e-8;
  long lb_budget = 0;
  std::string lb_method = "gd", lb_report = "lowerbound_report.txt";

  CLI::App* c_run = app.add_subcommand("run", "run an experiment from a config file");
  c_run->add_option("--config", config_path, "config file path")->required();

  CLI::App* c_sweep = app.add_subcommand("sweep", "run a (d, T) grid sweep and fit rates");
  c_sweep->add_option("--config", config_path, "base config file path")->required();
  c_sweep->add_option("--d-grid", d_grid, "comma-separated d values")->required();
  c_sweep->add_option("--t-grid", t_grid, "comma-separated T values")->required();
  c_sweep->add_option("--metric", metric, "avg_grad_l1 | min_grad_l1 | avg_grad_l2");

  CLI::App* c_report = app.add_subcommand("report", "tables and plot data from summary CSVs");
  c_report->add_option("csvs", csvs, "summary CSV files")->required();
  c_report->add_option("--out", out_dir, "output directory");

  CLI::App* c_lb = app.add_subcommand("lowerbound", "resisting-oracle query-complexity trial");
  c_lb->add_option("--d", lb_d, "dimension")->required();
  c_lb->add_option("--eps", lb_eps, "target l1 gradient accuracy")->required();
  c_lb->add_option("--method", lb_method, "gd | adagrad | adagrad_norm")->required();
  c_lb->add_option("--budget", lb_budget, "gradient query budget")->required();
  c_lb->add_option("--eta", lb_eta, "method step size");
  c_lb->add_option("--delta", lb_delta, "adagrad stabilizer");
  c_lb->add_option("--report", lb_report, "verification report output path");

  CLI::App* c_verify = app.add_subcommand("verify", "run the invariant suite");

  CLI11_PARSE(app, argc, argv);

  try {
    if (app.got_subcommand(c_run)) return cmd_run(config_path);
    if (app.got_subcommand(c_sweep)) return cmd_sweep(config_path, d_grid, t_grid, metric);
    if (app.got_subcommand(c_report)) return cmd_report(csvs, out_dir);
    if (app.got_subcommand(c_lb))
      return cmd_lowerbound(lb_d, lb_eps, lb_method, lb_budget, lb_eta, lb_delta, lb_report);
    if (app.got_subcommand(c_verify)) return cmd_verify();
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
