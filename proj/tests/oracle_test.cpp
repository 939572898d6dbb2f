#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "adalab/noise.hpp"
#include "adalab/problems.hpp"

using namespace adalab;

TEST(Oracle, ZeroNoiseIsExact) {
  const Problem p = make_separable_nonconvex({1.0, 2.0});
  const NoiseModel nm{sigma_constant(2, 0.0), NoiseDist::Rademacher};
  const std::vector<double> w = {0.4, -1.0};
  EXPECT_EQ(sample_gradient(p, nm, w, 1, 1), eval(p, w).gradient);
}

TEST(Oracle, RademacherTwoPointSupport) {
  const Problem p = make_quadratic({1.0});
  const NoiseModel nm{sigma_constant(1, 1.0), NoiseDist::Rademacher};
  for (std::uint64_t t = 1; t <= 64; ++t) {
    const double g = sample_gradient(p, nm, {0.0}, 5, t)[0];
    EXPECT_TRUE(g == 1.0 || g == -1.0) << g;
  }
}

TEST(Oracle, RademacherMonteCarloMoments) {
  const Problem p = make_quadratic({1.0});
  const NoiseModel nm{sigma_constant(1, 1.0), NoiseDist::Rademacher};
  const long n = 100000;
  double sum = 0.0, sumsq = 0.0;
  const double g0 = eval(p, {0.7}).gradient[0];
  for (long t = 1; t <= n; ++t) {
    const double e = sample_gradient(p, nm, {0.7}, 11, static_cast<std::uint64_t>(t))[0] - g0;
    sum += e;
    sumsq += e * e;
  }
  const double mean = sum / n;
  const double var = (sumsq - n * mean * mean) / (n - 1);
  EXPECT_LE(std::abs(mean), 4.0 / std::sqrt(static_cast<double>(n)));
  EXPECT_GE(var, 0.95);
  EXPECT_LE(var, 1.05);
}

TEST(Oracle, StatsZeroSigma) {
  const Problem p = make_quadratic({1.0, 1.0});
  const NoiseModel nm{sigma_constant(2, 0.0), NoiseDist::Gaussian};
  const NoiseStats st = estimate_noise_stats(p, nm, {1.0, 2.0}, 500);
  EXPECT_EQ(st.mean_error, (std::vector<double>{0.0, 0.0}));
  EXPECT_EQ(st.variance, (std::vector<double>{0.0, 0.0}));
}

TEST(Oracle, StatsRademacherVariance) {
  const Problem p = make_quadratic({1.0});
  const NoiseModel nm{sigma_constant(1, 2.0), NoiseDist::Rademacher};
  const NoiseStats st = estimate_noise_stats(p, nm, {0.0}, 100000, 7);
  EXPECT_GE(st.variance[0], 3.8);
  EXPECT_LE(st.variance[0], 4.2);
}

TEST(Oracle, StatsGaussianMean) {
  const Problem p = make_quadratic({1.0});
  const NoiseModel nm{sigma_constant(1, 1.0), NoiseDist::Gaussian};
  const NoiseStats st = estimate_noise_stats(p, nm, {0.0}, 100000, 13);
  EXPECT_LE(std::abs(st.mean_error[0]), 0.013);
}

TEST(Oracle, StatsErrors) {
  const Problem p = make_quadratic({1.0});
  const NoiseModel nm{sigma_constant(1, 1.0), NoiseDist::Rademacher};
  EXPECT_THROW(estimate_noise_stats(p, nm, {0.0}, 99), std::invalid_argument);
  const NoiseModel bad{sigma_constant(2, 1.0), NoiseDist::Rademacher};
  EXPECT_THROW(sample_gradient(p, bad, {0.0}, 1, 1), std::invalid_argument);
}

TEST(Oracle, UnbiasednessBothDistributions) {
  const long n = 100000;
  for (const NoiseDist dist : {NoiseDist::Rademacher, NoiseDist::Gaussian}) {
    const Problem p = make_separable_nonconvex({1.0, 0.5, 2.0});
    const std::vector<double> sigma = {0.5, 1.0, 2.0};
    const NoiseModel nm{sigma, dist};
    for (std::uint64_t rep = 0; rep < 5; ++rep) {
      std::vector<double> w(3);
      for (int i = 0; i < 3; ++i)
        w[i] = (uniform_open01(counter_hash(31, rep, i)) - 0.5) * 4.0;
      const NoiseStats st = estimate_noise_stats(p, nm, w, n, 1000 + rep);
      for (int i = 0; i < 3; ++i) {
        EXPECT_LE(std::abs(st.mean_error[i]), 4.0 * sigma[i] / std::sqrt(static_cast<double>(n)));
        EXPECT_LE(std::abs(st.variance[i] - sigma[i] * sigma[i]), 0.05 * sigma[i] * sigma[i]);
      }
    }
  }
}

TEST(Oracle, DeterministicStreams) {
  const Problem p = make_quadratic({1.0, 2.0, 3.0});
  const NoiseModel nm{sigma_constant(3, 1.5), NoiseDist::Gaussian};
  const std::vector<double> w = {0.1, 0.2, 0.3};
  for (std::uint64_t t = 1; t <= 100; ++t) {
    const auto a = sample_gradient(p, nm, w, 99, t);
    const auto b = sample_gradient(p, nm, w, 99, t);
    ASSERT_EQ(a, b);
  }
  // different seeds or steps give different draws
  EXPECT_NE(sample_gradient(p, nm, w, 99, 1), sample_gradient(p, nm, w, 98, 1));
  EXPECT_NE(sample_gradient(p, nm, w, 99, 1), sample_gradient(p, nm, w, 99, 2));
}

TEST(Oracle, SpikeProfileShape) {
  const auto s = sigma_spike(8, 0.4);
  EXPECT_DOUBLE_EQ(s[0], 0.4);
  for (int i = 1; i < 8; ++i) EXPECT_DOUBLE_EQ(s[i], 0.05);
}
