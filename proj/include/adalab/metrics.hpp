#pragma once

// Norms, density functions, closed-form bound evaluators, helper-lemma
// checkers, and log-log rate fitting. Bound formulas use natural logarithms;
// only the rate fits are in base 10.

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <tuple>
#include <utility>
#include <vector>

namespace adalab {

struct Norms {
  double l1 = 0.0, l2 = 0.0, linf = 0.0;
};

inline Norms norms(const std::vector<double>& v) {
  Norms n;
  double sq = 0.0;
  for (double x : v) {
    const double a = std::abs(x);
    n.l1 += a;
    sq += x * x;
    if (a > n.linf) n.linf = a;
  }
  n.l2 = std::sqrt(sq);
  return n;
}

// phi(v) = ||v||_1^2 / (d ||v||_2^2), in [1/d, 1].
inline double density_phi(const std::vector<double>& v) {
  const Norms n = norms(v);
  if (n.l2 == 0.0) throw std::invalid_argument("density_phi: zero vector");
  return (n.l1 * n.l1) / (static_cast<double>(v.size()) * n.l2 * n.l2);
}

// phi_tilde(v) = ||v||_1 / (d ||v||_inf), in [1/d, 1].
inline double density_phi_tilde(const std::vector<double>& v) {
  const Norms n = norms(v);
  if (n.linf == 0.0) throw std::invalid_argument("density_phi_tilde: zero vector");
  return n.l1 / (static_cast<double>(v.size()) * n.linf);
}

struct BoundInputs {
  double delta1 = 0.0;     // F(w_1) - F*
  double eta = 1.0;
  double delta = 0.0;
  std::vector<double> sigma;
  std::vector<double> L;
  double grad1_l2 = 0.0;   // ||grad F(w_1)||_2
  long T = 1;
  int d = 1;
};

// h(T) = 1 + T ||sigma||_inf^2 / delta^2
//          + T (||grad F(w_1)||_2 + eta sqrt(d) ||L||_inf T)^2 / delta^2.
inline double bound_hT(const BoundInputs& in) {
  if (!(in.delta > 0.0)) throw std::invalid_argument("bound_hT: delta must be positive");
  const double s_inf = norms(in.sigma).linf;
  const double L_inf = norms(in.L).linf;
  const double T = static_cast<double>(in.T);
  const double dsq = in.delta * in.delta;
  const double drift = in.grad1_l2 + in.eta * std::sqrt(static_cast<double>(in.d)) * L_inf * T;
  return 1.0 + T * s_inf * s_inf / dsq + T * drift * drift / dsq;
}

// Per-coordinate variant with sigma_i and L_i in place of the sup norms.
inline double bound_hT_coord(const BoundInputs& in, int i) {
  if (!(in.delta > 0.0)) throw std::invalid_argument("bound_hT_coord: delta must be positive");
  if (i < 0 || i >= in.d) throw std::invalid_argument("bound_hT_coord: index out of range");
  const double T = static_cast<double>(in.T);
  const double dsq = in.delta * in.delta;
  const double drift = in.grad1_l2 + in.eta * std::sqrt(static_cast<double>(in.d)) * in.L[i] * T;
  return 1.0 + T * in.sigma[i] * in.sigma[i] / dsq + T * drift * drift / dsq;
}

// Q = delta1 + (2 eta ||sigma||_1 + eta^2 ||L||_1 / 2) * ln h(T).
inline double bound_Q(const BoundInputs& in) {
  const double h = bound_hT(in);
  const double s_l1 = norms(in.sigma).l1;
  const double L_l1 = norms(in.L).l1;
  return in.delta1 + (2.0 * in.eta * s_l1 + in.eta * in.eta * L_l1 / 2.0) * std::log(h);
}

inline bool theorem_hypothesis(double delta, int d) {
  return delta < 1.0 / static_cast<double>(d);
}

// RHS = 2 sqrt(3) Q / (eta sqrt(T)) + sqrt(2 Q / (eta T))
//       + 2 sqrt(||sigma||_1 Q / eta) / T^{1/4}.
inline double theorem_bound(double Q, double eta, long T, double sigma_l1) {
  if (Q < 0.0) throw std::invalid_argument("theorem_bound: Q must be nonnegative");
  if (T < 1) throw std::invalid_argument("theorem_bound: T must be >= 1");
  const double Td = static_cast<double>(T);
  return 2.0 * std::sqrt(3.0) * Q / (eta * std::sqrt(Td)) + std::sqrt(2.0 * Q / (eta * Td)) +
         2.0 * std::sqrt(sigma_l1 * Q / eta) / std::pow(Td, 0.25);
}

// Same with the pre-simplification middle term sqrt(2 d delta Q / (eta T));
// theorem_bound absorbs it via d*delta <= 1 under the delta < 1/d hypothesis.
inline double theorem_bound_presimplified(double Q, double eta, long T, double sigma_l1,
                                          int d, double delta) {
  const double Td = static_cast<double>(T);
  return 2.0 * std::sqrt(3.0) * Q / (eta * std::sqrt(Td)) +
         std::sqrt(2.0 * static_cast<double>(d) * delta * Q / (eta * Td)) +
         2.0 * std::sqrt(sigma_l1 * Q / eta) / std::pow(Td, 0.25);
}

// Asserts the delta < 1/d hypothesis before evaluating the theorem RHS.
inline double theorem_bound_checked(double Q, double eta, long T, double sigma_l1,
                                    double delta, int d) {
  if (!theorem_hypothesis(delta, d))
    throw std::invalid_argument("theorem_bound: hypothesis delta < 1/d violated");
  return theorem_bound(Q, eta, T, sigma_l1);
}

struct R1R2 {
  double r1 = 0.0, r2 = 0.0;
};

// R1 = sqrt(phi(grad F) / phi_tilde(L));
// R2 = sqrt(phi(grad F)) / (phi(sigma) * phi_tilde(L))^{1/4}.
inline R1R2 r1_r2(double phi_gradF, double phi_tilde_L, double phi_sigma) {
  if (!(phi_gradF > 0.0) || !(phi_tilde_L > 0.0) || !(phi_sigma > 0.0))
    throw std::invalid_argument("r1_r2: arguments must be positive");
  R1R2 r;
  r.r1 = std::sqrt(phi_gradF / phi_tilde_L);
  r.r2 = std::sqrt(phi_gradF) / std::pow(phi_sigma * phi_tilde_L, 0.25);
  return r;
}

struct LogSumCheck {
  double lhs = 0.0, rhs = 0.0;
  bool holds = false;
};

// sum_t a_t / (A_t + delta^2) <= ln(1 + A_T / delta^2), A_t = sum_{s<=t} a_s.
inline LogSumCheck log_sum_lemma_check(const std::vector<double>& a, double delta) {
  if (!(delta > 0.0)) throw std::invalid_argument("log_sum_lemma_check: delta must be positive");
  double A = 0.0;
  LogSumCheck c;
  for (double v : a) {
    if (v < 0.0) throw std::invalid_argument("log_sum_lemma_check: negative entry");
    A += v;
    c.lhs += v / (A + delta * delta);
  }
  c.rhs = std::log(1.0 + A / (delta * delta));
  c.holds = c.lhs <= c.rhs + 1e-12;
  return c;
}

struct RateFit {
  double alpha_d = 0.0;   // exponent of d
  double beta_T = 0.0;    // exponent of T
  double intercept = 0.0;
  double r_squared = 0.0;
};

namespace detail {

// Gaussian elimination with partial pivoting for tiny systems.
template <int N>
inline void solve_small(double A[N][N], double b[N], double out[N]) {
  for (int col = 0; col < N; ++col) {
    int piv = col;
    for (int r = col + 1; r < N; ++r)
      if (std::abs(A[r][col]) > std::abs(A[piv][col])) piv = r;
    for (int c = 0; c < N; ++c) std::swap(A[col][c], A[piv][c]);
    std::swap(b[col], b[piv]);
    if (A[col][col] == 0.0) throw std::invalid_argument("fit: singular design matrix");
    for (int r = col + 1; r < N; ++r) {
      const double f = A[r][col] / A[col][col];
      for (int c = col; c < N; ++c) A[r][c] -= f * A[col][c];
      b[r] -= f * b[col];
    }
  }
  for (int r = N - 1; r >= 0; --r) {
    double s = b[r];
    for (int c = r + 1; c < N; ++c) s -= A[r][c] * out[c];
    out[r] = s / A[r][r];
  }
}

inline int count_distinct(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  int n = v.empty() ? 0 : 1;
  for (std::size_t i = 1; i < v.size(); ++i)
    if (v[i] != v[i - 1]) ++n;
  return n;
}

}  // namespace detail

// OLS on log10(metric) = alpha * log10(d) + beta * log10(T) + c over a
// (d, T) grid; needs at least 3 distinct values on each axis.
inline RateFit fit_rate(const std::vector<std::tuple<double, double, double>>& samples) {
  std::vector<double> ds, Ts;
  for (const auto& [d, T, m] : samples) {
    if (!(m > 0.0)) throw std::invalid_argument("fit_rate: nonpositive metric value");
    ds.push_back(d);
    Ts.push_back(T);
  }
  if (detail::count_distinct(ds) < 3 || detail::count_distinct(Ts) < 3)
    throw std::invalid_argument("fit_rate: need >= 3 distinct d and >= 3 distinct T");
  double A[3][3] = {{0, 0, 0}, {0, 0, 0}, {0, 0, 0}};
  double b[3] = {0, 0, 0};
  for (const auto& [d, T, m] : samples) {
    const double x[3] = {std::log10(d), std::log10(T), 1.0};
    const double y = std::log10(m);
    for (int r = 0; r < 3; ++r) {
      for (int c = 0; c < 3; ++c) A[r][c] += x[r] * x[c];
      b[r] += x[r] * y;
    }
  }
  double coef[3];
  detail::solve_small<3>(A, b, coef);
  RateFit fit;
  fit.alpha_d = coef[0];
  fit.beta_T = coef[1];
  fit.intercept = coef[2];
  double ybar = 0.0;
  for (const auto& [d, T, m] : samples) ybar += std::log10(m);
  ybar /= static_cast<double>(samples.size());
  double ss_res = 0.0, ss_tot = 0.0;
  for (const auto& [d, T, m] : samples) {
    const double y = std::log10(m);
    const double pred = coef[0] * std::log10(d) + coef[1] * std::log10(T) + coef[2];
    ss_res += (y - pred) * (y - pred);
    ss_tot += (y - ybar) * (y - ybar);
  }
  fit.r_squared = ss_tot == 0.0 ? 1.0 : 1.0 - ss_res / ss_tot;
  return fit;
}

struct SlopeFit {
  double slope = 0.0, intercept = 0.0, r_squared = 0.0;
};

// Single-axis log10-log10 least squares, for fits where one of d or T is held fixed.
inline SlopeFit fit_loglog_1d(const std::vector<std::pair<double, double>>& xy) {
  if (xy.size() < 2) throw std::invalid_argument("fit_loglog_1d: need >= 2 points");
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (const auto& [x, y] : xy) {
    if (!(x > 0.0) || !(y > 0.0)) throw std::invalid_argument("fit_loglog_1d: nonpositive value");
    const double lx = std::log10(x), ly = std::log10(y);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  const double n = static_cast<double>(xy.size());
  const double denom = n * sxx - sx * sx;
  if (denom == 0.0) throw std::invalid_argument("fit_loglog_1d: degenerate x grid");
  SlopeFit f;
  f.slope = (n * sxy - sx * sy) / denom;
  f.intercept = (sy - f.slope * sx) / n;
  double ss_res = 0, ss_tot = 0;
  const double ybar = sy / n;
  for (const auto& [x, y] : xy) {
    const double ly = std::log10(y);
    const double pred = f.slope * std::log10(x) + f.intercept;
    ss_res += (ly - pred) * (ly - pred);
    ss_tot += (ly - ybar) * (ly - ybar);
  }
  f.r_squared = ss_tot == 0.0 ? 1.0 : 1.0 - ss_res / ss_tot;
  return f;
}

}  // namespace adalab
