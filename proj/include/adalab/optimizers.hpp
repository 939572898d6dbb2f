#pragma once

// Update rules under study (coordinate-wise AdaGrad, AdaGrad-Norm, SGD), the
// step-size diagnostics, and a trajectory runner feeding the metrics layer.

#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "noise.hpp"
#include "problems.hpp"

namespace adalab {

enum class Method { AdaGrad, AdaGradNorm, SGD };

inline const char* method_name(Method m) {
  switch (m) {
    case Method::AdaGrad: return "adagrad";
    case Method::AdaGradNorm: return "adagrad_norm";
    default: return "sgd";
  }
}

struct OptimizerState {
  std::vector<double> w;
  std::vector<double> b_sq;  // AdaGrad-Norm keeps a scalar, broadcast over coordinates
  double eta = 1.0;
  double delta = 0.0;
  long t = 0;
  Method method = Method::AdaGrad;
};

inline OptimizerState make_state(Method m, const std::vector<double>& w0, double eta, double delta) {
  if (!(eta > 0.0)) throw std::invalid_argument("make_state: eta must be positive");
  if (delta < 0.0) throw std::invalid_argument("make_state: delta must be nonnegative");
  OptimizerState s;
  s.w = w0;
  s.b_sq.assign(w0.size(), 0.0);
  s.eta = eta;
  s.delta = delta;
  s.method = m;
  return s;
}

namespace detail {

inline void check_step_input(const OptimizerState& s, const std::vector<double>& g, Method want) {
  if (s.method != want) throw std::invalid_argument("step: method mismatch");
  if (g.size() != s.w.size()) throw std::invalid_argument("step: dimension mismatch");
  for (double v : g)
    if (!std::isfinite(v)) throw std::invalid_argument("step: non-finite gradient");
}

}  // namespace detail

// b^2_{t,i} += g_i^2 (accumulator includes the current gradient, starts at 0),
// then w_i -= eta * g_i / (sqrt(b^2_{t,i}) + delta).
inline OptimizerState adagrad_step(OptimizerState s, const std::vector<double>& g) {
  detail::check_step_input(s, g, Method::AdaGrad);
  for (std::size_t i = 0; i < g.size(); ++i) {
    s.b_sq[i] += g[i] * g[i];
    s.w[i] -= s.eta * g[i] / (std::sqrt(s.b_sq[i]) + s.delta);
  }
  s.t += 1;
  return s;
}

// Scalar accumulator b^2_t += ||g||_2^2, one step size for all coordinates.
inline OptimizerState adagrad_norm_step(OptimizerState s, const std::vector<double>& g) {
  detail::check_step_input(s, g, Method::AdaGradNorm);
  double nsq = 0.0;
  for (double v : g) nsq += v * v;
  const double b = s.b_sq[0] + nsq;
  const double denom = std::sqrt(b) + s.delta;
  for (std::size_t i = 0; i < g.size(); ++i) {
    s.b_sq[i] = b;
    s.w[i] -= s.eta * g[i] / denom;
  }
  s.t += 1;
  return s;
}

inline OptimizerState sgd_step(OptimizerState s, const std::vector<double>& g, double eta_const) {
  detail::check_step_input(s, g, Method::SGD);
  for (std::size_t i = 0; i < g.size(); ++i) s.w[i] -= eta_const * g[i];
  s.t += 1;
  return s;
}

// Constant step size min{1/L_inf, sqrt(2*delta1)/(sigma_l2*sqrt(L_inf*T))};
// the noiseless branch is 1/L_inf.
inline double sgd_tuned_eta(double L_inf, double sigma_l2, double delta1, long T) {
  if (!(L_inf > 0.0)) throw std::invalid_argument("sgd_tuned_eta: L_inf must be positive");
  if (T < 1) throw std::invalid_argument("sgd_tuned_eta: T must be >= 1");
  if (sigma_l2 == 0.0) return 1.0 / L_inf;
  const double noisy = std::sqrt(2.0 * delta1) / (sigma_l2 * std::sqrt(L_inf * static_cast<double>(T)));
  return std::min(1.0 / L_inf, noisy);
}

// Decorrelated step size: the current g_i^2 in the accumulator is replaced by
// sigma_i^2 + (grad_i F)^2, making the step size independent of the draw.
inline double decorrelated_stepsize(double b_sq_prev_i, double grad_i, double sigma_i,
                                    double eta, double delta) {
  return eta / (std::sqrt(b_sq_prev_i + sigma_i * sigma_i + grad_i * grad_i) + delta);
}

// Whole-horizon lower bound on the decorrelated step sizes.
inline double auxiliary_stepsize(double g_hist_sq_sum_i, double grad_sq_sum_i, double sigma_i,
                                 double eta, double delta) {
  return eta / (std::sqrt(g_hist_sq_sum_i + grad_sq_sum_i + sigma_i * sigma_i) + delta);
}

struct RecordFlags {
  bool trajectory = false;   // keep full per-step records
  bool diagnostics = false;  // decorrelated step sizes, descent ledger, growth tracking
  bool summary_only = true;
};

struct RunSpec {
  Method method = Method::AdaGrad;
  double eta = 1.0;
  double delta = 0.0;
  long T = 1;
  std::uint64_t seed = 0;
  RecordFlags record;
};

struct TrajectoryRecord {
  double f_value = 0.0;
  std::vector<double> w;
  std::vector<double> true_gradient;
  std::vector<double> stochastic_gradient;
  std::vector<double> step_sizes;  // applied eta_{t,i}
  std::vector<double> etahat;      // decorrelated step sizes (diagnostics)
};

struct RunSummary {
  double delta1 = 0.0;
  double grad1_l1 = 0.0, grad1_l2 = 0.0, grad1_linf = 0.0;
  double avg_grad_l1 = 0.0, avg_grad_l2 = 0.0;
  double min_grad_l1 = 0.0;
  long min_grad_t = 0;  // earliest iteration attaining the min
  double final_grad_l1 = 0.0;
  double final_f = 0.0;
  // diagnostics (populated when record.diagnostics is set)
  double corollary_lhs = 0.0;      // sum_t sum_i (etahat/2) * (grad_i F)^2
  double max_growth_step = 0.0;    // max consecutive increase of ||grad F||_2
  double max_step_increase = 0.0;  // max over t,i of eta_{t,i} - eta_{t-1,i}
  std::vector<double> g_sq_sum_head;  // sum_{t<=T-1} g_{t,i}^2
  std::vector<double> grad_sq_sum;    // sum_{t<=T} (grad_i F(w_t))^2
  std::vector<double> min_etahat;     // min over t of the decorrelated step size
  bool diverged = false;
  long steps_done = 0;
};

struct Trajectory {
  std::vector<TrajectoryRecord> records;
  RunSummary summary;
  Method method = Method::AdaGrad;
  double eta = 1.0, delta = 0.0;
  long T = 0;
  std::uint64_t seed = 0;
};

// Runs T steps from p.init_point, drawing one stochastic gradient per step.
// True gradients are available oracle-side (problems are synthetic), so the
// summary always carries exact gradient-norm statistics. Divergence to a
// non-finite iterate aborts the run and reports the last finite state.
inline Trajectory run(const Problem& p, const NoiseModel& nm, const RunSpec& rs) {
  if (rs.T < 1) throw std::invalid_argument("run: T must be >= 1");
  if (nm.sigma.size() != static_cast<std::size_t>(p.dim))
    throw std::invalid_argument("run: sigma dimension mismatch");
  const std::size_t d = static_cast<std::size_t>(p.dim);
  const bool diag = rs.record.diagnostics;

  Trajectory traj;
  traj.method = rs.method;
  traj.eta = rs.eta;
  traj.delta = rs.delta;
  traj.T = rs.T;
  traj.seed = rs.seed;

  OptimizerState s = make_state(rs.method, p.init_point, rs.eta, rs.delta);
  RunSummary& sm = traj.summary;
  sm.min_grad_l1 = std::numeric_limits<double>::infinity();
  if (diag) {
    sm.g_sq_sum_head.assign(d, 0.0);
    sm.grad_sq_sum.assign(d, 0.0);
    sm.min_etahat.assign(d, std::numeric_limits<double>::infinity());
  }

  std::vector<double> g(d), prev_steps;
  double sum_l1 = 0.0, sum_l2 = 0.0, prev_grad_l2 = 0.0;
  TrajectoryRecord rec;

  for (long t = 1; t <= rs.T; ++t) {
    const Eval e = eval(p, s.w);
    double l1 = 0.0, l2sq = 0.0, linf = 0.0;
    for (double v : e.gradient) {
      const double a = std::abs(v);
      l1 += a;
      l2sq += v * v;
      linf = std::max(linf, a);
    }
    const double l2 = std::sqrt(l2sq);
    if (t == 1) {
      sm.delta1 = e.value - p.f_star;
      sm.grad1_l1 = l1;
      sm.grad1_l2 = l2;
      sm.grad1_linf = linf;
    }
    sum_l1 += l1;
    sum_l2 += l2;
    if (l1 < sm.min_grad_l1) {
      sm.min_grad_l1 = l1;
      sm.min_grad_t = t;
    }
    sm.final_grad_l1 = l1;
    sm.final_f = e.value;
    if (diag && t > 1)
      sm.max_growth_step = std::max(sm.max_growth_step, l2 - prev_grad_l2);
    prev_grad_l2 = l2;

    std::vector<double> etahat_t;
    if (diag && rs.method != Method::SGD) {
      etahat_t.resize(d);
      for (std::size_t i = 0; i < d; ++i) {
        const double eh = decorrelated_stepsize(s.b_sq[i], e.gradient[i], nm.sigma[i], rs.eta, rs.delta);
        etahat_t[i] = eh;
        sm.corollary_lhs += 0.5 * eh * e.gradient[i] * e.gradient[i];
        if (eh < sm.min_etahat[i]) sm.min_etahat[i] = eh;
        sm.grad_sq_sum[i] += e.gradient[i] * e.gradient[i];
      }
    }

    for (std::size_t i = 0; i < d; ++i) g[i] = e.gradient[i] + noise_value(nm, rs.seed, static_cast<std::uint64_t>(t), i);
    if (diag && t <= rs.T - 1) {
      // mirrors what the method feeds its accumulator: per-coordinate squares
      // for AdaGrad, the squared norm broadcast for AdaGrad-Norm
      if (rs.method == Method::AdaGradNorm) {
        double nsq = 0.0;
        for (double v : g) nsq += v * v;
        for (std::size_t i = 0; i < d; ++i) sm.g_sq_sum_head[i] += nsq;
      } else {
        for (std::size_t i = 0; i < d; ++i) sm.g_sq_sum_head[i] += g[i] * g[i];
      }
    }

    const std::vector<double> w_before = rs.record.trajectory ? s.w : std::vector<double>();
    switch (rs.method) {
      case Method::AdaGrad: s = adagrad_step(std::move(s), g); break;
      case Method::AdaGradNorm: s = adagrad_norm_step(std::move(s), g); break;
      case Method::SGD: s = sgd_step(std::move(s), g, rs.eta); break;
    }

    if (rs.record.trajectory || diag) {
      std::vector<double> steps(d);
      for (std::size_t i = 0; i < d; ++i)
        steps[i] = rs.method == Method::SGD ? rs.eta : rs.eta / (std::sqrt(s.b_sq[i]) + rs.delta);
      if (diag && !prev_steps.empty())
        for (std::size_t i = 0; i < d; ++i)
          sm.max_step_increase = std::max(sm.max_step_increase, steps[i] - prev_steps[i]);
      if (rs.record.trajectory) {
        rec.f_value = e.value;
        rec.w = w_before;
        rec.true_gradient = e.gradient;
        rec.stochastic_gradient = g;
        rec.step_sizes = steps;
        rec.etahat = etahat_t;
        traj.records.push_back(rec);
      }
      prev_steps = std::move(steps);
    }

    sm.steps_done = t;
    bool finite = true;
    for (double v : s.w)
      if (!std::isfinite(v)) { finite = false; break; }
    if (!finite) {
      sm.diverged = true;
      break;
    }
  }

  sm.avg_grad_l1 = sum_l1 / static_cast<double>(sm.steps_done);
  sm.avg_grad_l2 = sum_l2 / static_cast<double>(sm.steps_done);
  return traj;
}

}  // namespace adalab
