#pragma once

// Synthetic objectives with exactly known coordinate-wise smoothness and infimum.

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

namespace adalab {

enum class ProblemKind { Quadratic, SeparableNonconvex, SpikeProfile };
enum class ExtremeKind { DenseGradSparseCurv, SparseGradDenseCurv };

struct Problem {
  int dim = 0;
  ProblemKind kind = ProblemKind::Quadratic;
  std::vector<double> coeffs;      // per-coordinate scale c_i
  std::vector<double> smoothness;  // L_i, Lipschitz constant of the i-th partial
  double f_star = 0.0;
  std::vector<double> init_point;
};

struct Eval {
  double value = 0.0;
  std::vector<double> gradient;
};

namespace detail {

inline void check_coeffs(const std::vector<double>& c, const char* who) {
  if (c.empty()) throw std::invalid_argument(std::string(who) + ": empty coefficient vector");
  for (double v : c) {
    if (!(v >= 0.0)) throw std::invalid_argument(std::string(who) + ": negative coefficient");
  }
}

// 1-D primitive x^2/(1+x^2): bounded, non-convex, |f''| <= 2, infimum 0.
inline double sep_value(double x) {
  const double x2 = x * x;
  return x2 / (1.0 + x2);
}

inline double sep_slope(double x) {
  const double u = 1.0 + x * x;
  return 2.0 * x / (u * u);
}

}  // namespace detail

inline Problem make_quadratic(const std::vector<double>& L_vec) {
  detail::check_coeffs(L_vec, "make_quadratic");
  Problem p;
  p.dim = static_cast<int>(L_vec.size());
  p.kind = ProblemKind::Quadratic;
  p.coeffs = L_vec;
  p.smoothness = L_vec;
  p.f_star = 0.0;
  p.init_point.assign(p.dim, 1.0);
  return p;
}

inline Problem make_separable_nonconvex(const std::vector<double>& c_vec) {
  detail::check_coeffs(c_vec, "make_separable_nonconvex");
  Problem p;
  p.dim = static_cast<int>(c_vec.size());
  p.kind = ProblemKind::SeparableNonconvex;
  p.coeffs = c_vec;
  p.smoothness.resize(p.dim);
  for (int i = 0; i < p.dim; ++i) p.smoothness[i] = 2.0 * c_vec[i];
  p.f_star = 0.0;
  p.init_point.assign(p.dim, 1.0);
  return p;
}

namespace detail {

// Solve sep_slope(x) = target on a monotone bracket [lo, hi] by bisection.
inline double bisect_slope(double lo, double hi, double target, bool ascending) {
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    const double s = sep_slope(mid);
    const bool go_right = ascending ? (s < target) : (s > target);
    if (go_right) lo = mid; else hi = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace detail

// The two geometric extremes. DenseGradSparseCurv: one large-curvature
// coordinate among d-1 flat ones, init solved so all initial gradient
// magnitudes coincide. SparseGradDenseCurv: uniform curvature, init with a
// single active coordinate.
inline Problem make_extreme_case(ExtremeKind kind, int d, double scale) {
  if (d < 2) throw std::invalid_argument("make_extreme_case: d must be >= 2");
  if (!(scale > 0.0)) throw std::invalid_argument("make_extreme_case: scale must be positive");
  if (kind == ExtremeKind::SparseGradDenseCurv) {
    Problem p = make_separable_nonconvex(std::vector<double>(d, scale));
    p.init_point.assign(d, 0.0);
    p.init_point[0] = 1.0;
    return p;
  }
  std::vector<double> c(d, scale / d);
  c[0] = scale;
  Problem p = make_separable_nonconvex(c);
  p.kind = ProblemKind::SpikeProfile;
  // Equal initial gradient magnitudes: target half the peak slope of the flat
  // coordinates, reachable by every coordinate. Peak slope of sep is
  // 0.6495... at x = 1/sqrt(3); coordinate 1 sits on the ascending branch,
  // the flat coordinates on the descending branch.
  const double x_peak = 1.0 / std::sqrt(3.0);
  const double peak = detail::sep_slope(x_peak);
  const double target = 0.5 * peak * (scale / d);
  p.init_point.assign(d, 0.0);
  p.init_point[0] = detail::bisect_slope(0.0, x_peak, target / scale, true);
  const double x_flat = detail::bisect_slope(x_peak, 64.0, target / (scale / d), false);
  for (int i = 1; i < d; ++i) p.init_point[i] = x_flat;
  return p;
}

inline Eval eval(const Problem& p, const std::vector<double>& w) {
  if (static_cast<int>(w.size()) != p.dim)
    throw std::invalid_argument("eval: dimension mismatch");
  Eval e;
  e.gradient.resize(p.dim);
  if (p.kind == ProblemKind::Quadratic) {
    for (int i = 0; i < p.dim; ++i) {
      if (!std::isfinite(w[i])) throw std::invalid_argument("eval: non-finite input");
      e.value += 0.5 * p.coeffs[i] * w[i] * w[i];
      e.gradient[i] = p.coeffs[i] * w[i];
    }
  } else {
    for (int i = 0; i < p.dim; ++i) {
      if (!std::isfinite(w[i])) throw std::invalid_argument("eval: non-finite input");
      e.value += p.coeffs[i] * detail::sep_value(w[i]);
      e.gradient[i] = p.coeffs[i] * detail::sep_slope(w[i]);
    }
  }
  return e;
}

// Central finite differences vs. the analytic gradient; returns the maximum
// per-coordinate relative error with denominator max(|analytic|, 1e-8).
inline double check_gradient_fd(const Problem& p, const std::vector<double>& w, double h) {
  if (!(h > 0.0) || h > 1e-2) throw std::invalid_argument("check_gradient_fd: h out of (0, 1e-2]");
  const Eval e = eval(p, w);
  std::vector<double> wp = w;
  double worst = 0.0;
  for (int i = 0; i < p.dim; ++i) {
    wp[i] = w[i] + h;
    const double fp = eval(p, wp).value;
    wp[i] = w[i] - h;
    const double fm = eval(p, wp).value;
    wp[i] = w[i];
    const double fd = (fp - fm) / (2.0 * h);
    const double denom = std::max(std::abs(e.gradient[i]), 1e-8);
    worst = std::max(worst, std::abs(fd - e.gradient[i]) / denom);
  }
  return worst;
}

}  // namespace adalab
