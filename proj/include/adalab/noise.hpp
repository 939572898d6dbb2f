#pragma once

// Unbiased stochastic first-order oracle with exact per-coordinate variance.

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "problems.hpp"
#include "rng.hpp"

namespace adalab {

enum class NoiseDist { Rademacher, Gaussian };

struct NoiseModel {
  std::vector<double> sigma;
  NoiseDist distribution = NoiseDist::Rademacher;
};

inline std::vector<double> sigma_constant(int d, double s) {
  return std::vector<double>(static_cast<std::size_t>(d), s);
}

// Spike profile (s, s/d, ..., s/d): noise concentrated on coordinate 1.
inline std::vector<double> sigma_spike(int d, double s) {
  std::vector<double> v(static_cast<std::size_t>(d), s / d);
  v[0] = s;
  return v;
}

// Noise value xi_i for the (seed, t, i) counter; mean 0, variance sigma_i^2.
inline double noise_value(const NoiseModel& nm, std::uint64_t seed, std::uint64_t t, std::size_t i) {
  const double s = nm.sigma[i];
  if (s == 0.0) return 0.0;
  if (nm.distribution == NoiseDist::Rademacher) return s * rademacher_draw(seed, t, i);
  return s * normal_draw(seed, t, i);
}

// g = grad F(w) + xi, one full-vector draw per (seed, t).
inline std::vector<double> sample_gradient(const Problem& p, const NoiseModel& nm,
                                           const std::vector<double>& w,
                                           std::uint64_t seed, std::uint64_t t) {
  if (nm.sigma.size() != static_cast<std::size_t>(p.dim))
    throw std::invalid_argument("sample_gradient: sigma dimension mismatch");
  Eval e = eval(p, w);
  for (std::size_t i = 0; i < e.gradient.size(); ++i)
    e.gradient[i] += noise_value(nm, seed, t, i);
  return e.gradient;
}

struct NoiseStats {
  std::vector<double> mean_error;  // per-coordinate mean of g - grad F
  std::vector<double> variance;    // per-coordinate sample variance
};

// n independent draws at fixed w; verifies unbiasedness and exact variance.
inline NoiseStats estimate_noise_stats(const Problem& p, const NoiseModel& nm,
                                       const std::vector<double>& w, long n,
                                       std::uint64_t seed = 0) {
  if (n < 100) throw std::invalid_argument("estimate_noise_stats: n must be >= 100");
  const Eval e = eval(p, w);
  const std::size_t d = e.gradient.size();
  std::vector<double> sum(d, 0.0), sumsq(d, 0.0);
  for (long t = 1; t <= n; ++t) {
    for (std::size_t i = 0; i < d; ++i) {
      const double xi = noise_value(nm, seed, static_cast<std::uint64_t>(t), i);
      sum[i] += xi;
      sumsq[i] += xi * xi;
    }
  }
  NoiseStats st;
  st.mean_error.resize(d);
  st.variance.resize(d);
  for (std::size_t i = 0; i < d; ++i) {
    const double m = sum[i] / static_cast<double>(n);
    st.mean_error[i] = m;
    st.variance[i] = (sumsq[i] - static_cast<double>(n) * m * m) / static_cast<double>(n - 1);
  }
  return st;
}

}  // namespace adalab
