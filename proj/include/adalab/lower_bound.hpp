#pragma once

// Adversarial lower-bound construction: a resisting first-order oracle that
// answers slope -eps_1d everywhere, then materializes into a consistent C^1,
// 1-smooth hard function p(x) = (1/d) sum_i f_i(sqrt(d) x_i) on which any
// deterministic method that asked fewer than d/(32 eps^2) gradients still has
// ||grad p||_1 >= eps at its final iterate.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace adalab {

// Knots closer than this in z-space merge to avoid zero-length segments.
inline constexpr double kKnotMergeTol = 1e-12;
// Cap on period shifts when reducing z >= 1/eps_1d; beyond this the iterate
// has left the meaningful region and the trial aborts.
inline constexpr long kShiftCap = 1000000;

struct BumpEval {
  double value = 0.0;
  double derivative = 0.0;
};

// C^1 connector on [y_lo, y_hi]: Phi(x) = -eps_1d (x - y_lo) + psi(x) with
// psi(x) = (x - y_lo)^2 / 2 up to the midpoint and l^2/4 - (y_hi - x)^2 / 2
// after it. Endpoint values 0 and l(l/4 - eps_1d), slope -eps_1d at both
// ends, |Phi''| <= 1.
inline BumpEval bump_phi(double y_lo, double y_hi, double eps_1d, double x) {
  if (!(y_lo < y_hi)) throw std::invalid_argument("bump_phi: y_lo must be < y_hi");
  if (x < y_lo - kKnotMergeTol || x > y_hi + kKnotMergeTol)
    throw std::invalid_argument("bump_phi: x outside segment");
  const double l = y_hi - y_lo;
  const double mid = 0.5 * (y_lo + y_hi);
  BumpEval e;
  if (x <= mid) {
    const double u = x - y_lo;
    e.value = -eps_1d * u + 0.5 * u * u;
    e.derivative = -eps_1d + u;
  } else {
    const double v = y_hi - x;
    e.value = -eps_1d * (x - y_lo) + 0.25 * l * l - 0.5 * v * v;
    e.derivative = -eps_1d + v;
  }
  return e;
}

struct ResistingOracle {
  int d = 1;
  double eps = 0.1;
  double eps_1d = 0.1;  // eps / sqrt(d), tolerance in the z = sqrt(d) x scale
  std::vector<std::vector<double>> query_log;  // per coordinate, sorted distinct interior z
  long query_count = 0;
};

inline ResistingOracle make_resisting_oracle(int d, double eps) {
  if (d < 1) throw std::invalid_argument("make_resisting_oracle: d must be >= 1");
  if (!(eps > 0.0)) throw std::invalid_argument("make_resisting_oracle: eps must be positive");
  ResistingOracle o;
  o.d = d;
  o.eps = eps;
  o.eps_1d = eps / std::sqrt(static_cast<double>(d));
  o.query_log.resize(static_cast<std::size_t>(d));
  return o;
}

namespace detail {

// Reduce z into the base period [0, 1/eps_1d) by the shift rule.
inline double reduce_z(double z, double period) {
  if (z < period) return z;
  const double k = std::floor(z / period);
  if (k > static_cast<double>(kShiftCap))
    throw std::runtime_error("resisting oracle: iterate beyond the shift cap");
  double r = z - k * period;
  if (r >= period) r = 0.0;  // fp edge when z is an exact multiple
  if (r < 0.0) r = 0.0;
  return r;
}

inline void insert_knot(std::vector<double>& knots, double z) {
  auto it = std::lower_bound(knots.begin(), knots.end(), z);
  if (it != knots.end() && std::abs(*it - z) < kKnotMergeTol) return;
  if (it != knots.begin() && std::abs(*(it - 1) - z) < kKnotMergeTol) return;
  knots.insert(it, z);
}

inline void log_coordinate(ResistingOracle& o, std::size_t i, double x_i) {
  if (!std::isfinite(x_i)) throw std::invalid_argument("resisting oracle: non-finite query");
  const double period = 1.0 / o.eps_1d;
  double z = std::sqrt(static_cast<double>(o.d)) * x_i;
  if (z <= 0.0) return;  // closed-form outer branch, no interior knot
  z = reduce_z(z, period);
  if (z <= kKnotMergeTol || z >= period - kKnotMergeTol) return;
  insert_knot(o.query_log[i], z);
}

}  // namespace detail

// Every answer is slope -eps_1d in z-space, i.e. gradient coordinate
// -eps_1d/sqrt(d) = -eps/d; the bookkeeping of where the method looked is
// what later shapes the materialized function. Counts one query per call.
inline std::vector<double> resisting_gradient(ResistingOracle& o, const std::vector<double>& x) {
  if (x.size() != static_cast<std::size_t>(o.d))
    throw std::invalid_argument("resisting_gradient: dimension mismatch");
  for (std::size_t i = 0; i < x.size(); ++i) detail::log_coordinate(o, i, x[i]);
  o.query_count += 1;
  const double gi = -o.eps_1d / std::sqrt(static_cast<double>(o.d));
  return std::vector<double>(x.size(), gi);
}

// Registers a point's knots without counting a query. Used for the final
// iterate so the materialized function is pinned down there as well.
inline void register_point(ResistingOracle& o, const std::vector<double>& x) {
  if (x.size() != static_cast<std::size_t>(o.d))
    throw std::invalid_argument("register_point: dimension mismatch");
  for (std::size_t i = 0; i < x.size(); ++i) detail::log_coordinate(o, i, x[i]);
}

struct HardCoordinate {
  std::vector<double> knots;     // y_0 = 0 < ... < y_{N+1} = 1/eps_1d
  std::vector<double> f_knots;   // f at each knot, f(0) = 1
  std::vector<bool> bump;        // per segment: bump (true) or linear (false)
};

struct HardInstance {
  int d = 1;
  double eps = 0.1;
  double eps_1d = 0.1;
  std::vector<HardCoordinate> coords;
};

// Per coordinate: boundary knots plus the logged interior ones; gaps shorter
// than 8 eps_1d become linear pieces (f drops by eps_1d * l), longer gaps
// become bumps (f rises by l(l/4 - eps_1d), which is what makes unqueried
// stretches expensive to skip).
inline HardInstance materialize(const ResistingOracle& o) {
  HardInstance h;
  h.d = o.d;
  h.eps = o.eps;
  h.eps_1d = o.eps_1d;
  const double period = 1.0 / o.eps_1d;
  h.coords.resize(static_cast<std::size_t>(o.d));
  for (std::size_t i = 0; i < h.coords.size(); ++i) {
    HardCoordinate& hc = h.coords[i];
    hc.knots.push_back(0.0);
    for (double z : o.query_log[i]) hc.knots.push_back(z);
    hc.knots.push_back(period);
    const std::size_t nseg = hc.knots.size() - 1;
    hc.f_knots.resize(hc.knots.size());
    hc.bump.resize(nseg);
    hc.f_knots[0] = 1.0;
    for (std::size_t k = 0; k < nseg; ++k) {
      const double l = hc.knots[k + 1] - hc.knots[k];
      if (l < 8.0 * o.eps_1d) {
        hc.bump[k] = false;
        hc.f_knots[k + 1] = hc.f_knots[k] - o.eps_1d * l;
      } else {
        hc.bump[k] = true;
        hc.f_knots[k + 1] = hc.f_knots[k] + l * (0.25 * l - o.eps_1d);
      }
    }
  }
  return h;
}

// f_i and f_i' at any z: linear branch left of 0, periodic shift extension
// right of 1/eps_1d, piecewise segments inside.
inline BumpEval f_eval_1d(const HardInstance& h, int i, double z) {
  const HardCoordinate& hc = h.coords[static_cast<std::size_t>(i)];
  const double period = 1.0 / h.eps_1d;
  BumpEval e;
  if (z < 0.0) {
    e.value = 1.0 - h.eps_1d * z;
    e.derivative = -h.eps_1d;
    return e;
  }
  double offset = 0.0;
  if (z >= period) {
    const double k = std::floor(z / period);
    if (k > static_cast<double>(kShiftCap))
      throw std::runtime_error("f_eval_1d: z beyond the shift cap");
    offset = k * (hc.f_knots.back() - hc.f_knots.front());
    z -= k * period;
    if (z >= period) z = 0.0;
    if (z < 0.0) z = 0.0;
  }
  auto it = std::upper_bound(hc.knots.begin(), hc.knots.end(), z);
  std::size_t seg = static_cast<std::size_t>(it - hc.knots.begin());
  seg = seg == 0 ? 0 : seg - 1;
  if (seg >= hc.bump.size()) seg = hc.bump.size() - 1;
  const double y_lo = hc.knots[seg], y_hi = hc.knots[seg + 1];
  if (hc.bump[seg]) {
    const BumpEval b = bump_phi(y_lo, y_hi, h.eps_1d, z);
    e.value = hc.f_knots[seg] + b.value + offset;
    e.derivative = b.derivative;
  } else {
    e.value = hc.f_knots[seg] - h.eps_1d * (z - y_lo) + offset;
    e.derivative = -h.eps_1d;
  }
  return e;
}

// p(x) = (1/d) sum_i f_i(sqrt(d) x_i); grad_i p = (1/sqrt(d)) f_i'(sqrt(d) x_i).
inline BumpEval hard_eval_coord(const HardInstance& h, int i, double x_i) {
  return f_eval_1d(h, i, std::sqrt(static_cast<double>(h.d)) * x_i);
}

struct HardEval {
  double value = 0.0;
  std::vector<double> gradient;
};

inline HardEval hard_eval(const HardInstance& h, const std::vector<double>& x) {
  if (x.size() != static_cast<std::size_t>(h.d))
    throw std::invalid_argument("hard_eval: dimension mismatch");
  const double sqd = std::sqrt(static_cast<double>(h.d));
  HardEval e;
  e.gradient.resize(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    const BumpEval fe = f_eval_1d(h, static_cast<int>(i), sqd * x[i]);
    e.value += fe.value / static_cast<double>(h.d);
    e.gradient[i] = fe.derivative / sqd;
  }
  return e;
}

struct VerifyReport {
  bool passed = false;
  double max_second_derivative = 0.0;  // finite-difference |f''| estimate
  double p0_minus_min = 0.0;           // p(0) - min sampled p
  double max_knot_residual = 0.0;      // C^1 continuity at knots
  double max_oracle_mismatch = 0.0;    // logged answers vs materialized f'
  std::string failure;
};

// Certifies the materialized instance: 1-smoothness by second differences on
// a dense grid, bounded suboptimality p(0) - inf <= 1, C^1 continuity at
// every knot (value and derivative), and agreement with the logged oracle
// answers. The sampling box is z in [-1, 1/eps_1d + 1] per coordinate, which
// covers the outer branches and the period seam.
inline VerifyReport verify_instance(const HardInstance& h, long n_samples,
                                    const std::vector<std::vector<double>>* logged = nullptr) {
  if (n_samples < 1000) throw std::invalid_argument("verify_instance: n_samples must be >= 1000");
  VerifyReport rep;
  const double period = 1.0 / h.eps_1d;
  const double z_lo = -1.0, z_hi = period + 1.0;
  const double step = (z_hi - z_lo) / static_cast<double>(n_samples);
  double min_p = 0.0;
  for (int i = 0; i < h.d; ++i) {
    double fmin = std::numeric_limits<double>::infinity();
    for (long k = 0; k <= n_samples; ++k) {
      const double z = z_lo + step * static_cast<double>(k);
      const double fm = f_eval_1d(h, i, z - step).value;
      const double f0 = f_eval_1d(h, i, z).value;
      const double fp = f_eval_1d(h, i, z + step).value;
      fmin = std::min(fmin, f0);
      const double second = std::abs(fm - 2.0 * f0 + fp) / (step * step);
      rep.max_second_derivative = std::max(rep.max_second_derivative, second);
    }
    min_p += fmin / static_cast<double>(h.d);

    const HardCoordinate& hc = h.coords[static_cast<std::size_t>(i)];
    for (std::size_t k = 1; k + 1 < hc.knots.size(); ++k) {
      const double z = hc.knots[k];
      // left piece at its right endpoint
      const double l_len = z - hc.knots[k - 1];
      double left_val, left_der;
      if (hc.bump[k - 1]) {
        const BumpEval b = bump_phi(hc.knots[k - 1], z, h.eps_1d, z);
        left_val = hc.f_knots[k - 1] + b.value;
        left_der = b.derivative;
      } else {
        left_val = hc.f_knots[k - 1] - h.eps_1d * l_len;
        left_der = -h.eps_1d;
      }
      // right piece at its left endpoint
      double right_val, right_der;
      if (hc.bump[k]) {
        const BumpEval b = bump_phi(z, hc.knots[k + 1], h.eps_1d, z);
        right_val = hc.f_knots[k] + b.value;
        right_der = b.derivative;
      } else {
        right_val = hc.f_knots[k];
        right_der = -h.eps_1d;
      }
      rep.max_knot_residual = std::max(rep.max_knot_residual, std::abs(left_val - right_val));
      rep.max_knot_residual = std::max(rep.max_knot_residual, std::abs(left_der - right_der));
      rep.max_knot_residual = std::max(rep.max_knot_residual, std::abs(left_val - hc.f_knots[k]));
    }
    if (logged) {
      for (double z : (*logged)[static_cast<std::size_t>(i)]) {
        const double mism = std::abs(f_eval_1d(h, i, z).derivative + h.eps_1d);
        rep.max_oracle_mismatch = std::max(rep.max_oracle_mismatch, mism);
      }
    }
  }
  rep.p0_minus_min = 1.0 - min_p;

  if (rep.max_second_derivative > 1.0 + 1e-3)
    rep.failure = "second derivative bound exceeded";
  else if (rep.p0_minus_min > 1.0 + 1e-6)
    rep.failure = "suboptimality gap exceeds 1";
  else if (rep.max_knot_residual > 1e-10)
    rep.failure = "knot continuity residual too large";
  else if (rep.max_oracle_mismatch > 1e-12)
    rep.failure = "materialized derivative disagrees with logged answer";
  rep.passed = rep.failure.empty();
  return rep;
}

enum class LbMethod { GradientDescent, AdaGrad, AdaGradNorm };

inline const char* lb_method_name(LbMethod m) {
  switch (m) {
    case LbMethod::GradientDescent: return "gd";
    case LbMethod::AdaGrad: return "adagrad";
    default: return "adagrad_norm";
  }
}

struct TrialResult {
  long queries_used = 0;
  double final_grad_l1 = 0.0;
  double threshold = 0.0;  // d / (32 eps^2)
  VerifyReport report;
  HardInstance instance;
};

// Runs a deterministic method from the origin against a fresh resisting
// oracle for `budget` queries, pins the final iterate into the instance,
// materializes, verifies, and measures ||grad p(x_hat)||_1.
inline TrialResult query_complexity_trial(LbMethod method, double eta, double delta,
                                          int d, double eps, long budget) {
  if (budget < 0) throw std::invalid_argument("query_complexity_trial: budget must be >= 0");
  ResistingOracle o = make_resisting_oracle(d, eps);
  std::vector<double> x(static_cast<std::size_t>(d), 0.0);
  std::vector<double> b_sq(static_cast<std::size_t>(d), 0.0);
  double b_norm = 0.0;
  for (long q = 0; q < budget; ++q) {
    const std::vector<double> g = resisting_gradient(o, x);
    switch (method) {
      case LbMethod::GradientDescent:
        for (std::size_t i = 0; i < x.size(); ++i) x[i] -= eta * g[i];
        break;
      case LbMethod::AdaGrad:
        for (std::size_t i = 0; i < x.size(); ++i) {
          b_sq[i] += g[i] * g[i];
          x[i] -= eta * g[i] / (std::sqrt(b_sq[i]) + delta);
        }
        break;
      case LbMethod::AdaGradNorm: {
        double nsq = 0.0;
        for (double v : g) nsq += v * v;
        b_norm += nsq;
        const double denom = std::sqrt(b_norm) + delta;
        for (std::size_t i = 0; i < x.size(); ++i) x[i] -= eta * g[i] / denom;
        break;
      }
    }
  }
  register_point(o, x);
  TrialResult tr;
  tr.queries_used = o.query_count;
  tr.threshold = static_cast<double>(d) / (32.0 * eps * eps);
  tr.instance = materialize(o);
  tr.report = verify_instance(tr.instance, 2000, &o.query_log);
  const HardEval he = hard_eval(tr.instance, x);
  double l1 = 0.0;
  for (double v : he.gradient) l1 += std::abs(v);
  tr.final_grad_l1 = l1;
  return tr;
}

}  // namespace adalab
