#include <gtest/gtest.h>

#include <cmath>
#include <stdexcept>
#include <tuple>
#include <utility>
#include <vector>

#include "adalab/metrics.hpp"
#include "adalab/noise.hpp"
#include "adalab/optimizers.hpp"
#include "adalab/problems.hpp"
#include "adalab/rng.hpp"

namespace {

using namespace adalab;

double u01(std::uint64_t seed, std::uint64_t t, std::uint64_t i) {
  return uniform_open01(counter_hash(seed, t, i));
}

}  // namespace

TEST(Norms, Examples) {
  const Norms a = norms({3.0, -4.0});
  EXPECT_DOUBLE_EQ(a.l1, 7.0);
  EXPECT_DOUBLE_EQ(a.l2, 5.0);
  EXPECT_DOUBLE_EQ(a.linf, 4.0);

  const Norms z = norms({0.0, 0.0, 0.0});
  EXPECT_DOUBLE_EQ(z.l1, 0.0);
  EXPECT_DOUBLE_EQ(z.l2, 0.0);
  EXPECT_DOUBLE_EQ(z.linf, 0.0);

  const Norms o = norms(std::vector<double>(4, 1.0));
  EXPECT_DOUBLE_EQ(o.l1, 4.0);
  EXPECT_DOUBLE_EQ(o.l2, 2.0);
  EXPECT_DOUBLE_EQ(o.linf, 1.0);
}

TEST(Density, Examples) {
  const std::vector<double> ones(8, 1.0);
  EXPECT_DOUBLE_EQ(density_phi(ones), 1.0);
  EXPECT_DOUBLE_EQ(density_phi_tilde(ones), 1.0);

  std::vector<double> spike(8, 0.0);
  spike[0] = 3.5;
  EXPECT_DOUBLE_EQ(density_phi(spike), 1.0 / 8.0);
  EXPECT_DOUBLE_EQ(density_phi_tilde(spike), 1.0 / 8.0);

  const std::vector<double> v{3.0, 4.0};
  EXPECT_DOUBLE_EQ(density_phi(v), 0.98);
  EXPECT_DOUBLE_EQ(density_phi_tilde(v), 0.875);

  EXPECT_THROW(density_phi({0.0, 0.0}), std::invalid_argument);
  EXPECT_THROW(density_phi_tilde({0.0}), std::invalid_argument);
}

TEST(Density, RangeAndNormIdentity) {
  // phi and phi_tilde live in [1/d, 1]; phi also links the l1 and l2 norms:
  // ||v||_1 = sqrt(d phi(v)) ||v||_2.
  for (int rep = 0; rep < 10000; ++rep) {
    const std::uint64_t seed = 7000 + static_cast<std::uint64_t>(rep);
    const int d = 1 + static_cast<int>(u01(seed, 0, 0) * 512.0);
    std::vector<double> v(d);
    bool nonzero = false;
    for (int i = 0; i < d; ++i) {
      v[i] = (u01(seed, 1, i) - 0.5) * 20.0;
      if (u01(seed, 2, i) < 0.3) v[i] = 0.0;  // encourage sparsity
      if (v[i] != 0.0) nonzero = true;
    }
    if (!nonzero) v[0] = 1.0;
    const double phi = density_phi(v);
    const double phit = density_phi_tilde(v);
    const double inv_d = 1.0 / static_cast<double>(d);
    EXPECT_GE(phi, inv_d - 1e-15);
    EXPECT_LE(phi, 1.0 + 1e-15);
    EXPECT_GE(phit, inv_d - 1e-15);
    EXPECT_LE(phit, 1.0 + 1e-15);

    const Norms n = norms(v);
    const double rebuilt = std::sqrt(static_cast<double>(d) * phi) * n.l2;
    EXPECT_NEAR(rebuilt, n.l1, 1e-12 * n.l1);
  }
}

TEST(BoundHT, PlugIn) {
  BoundInputs in;
  in.T = 1;
  in.sigma = {1.0};
  in.L = {1.0};
  in.delta = 1.0;
  in.eta = 1.0;
  in.grad1_l2 = 0.0;
  in.d = 1;
  EXPECT_DOUBLE_EQ(bound_hT(in), 3.0);

  // 1 + 10*4/0.25 + 10*(1 + 0.1*2*10)^2/0.25 = 521
  BoundInputs b;
  b.T = 10;
  b.sigma = {2.0, 0.5, 0.0, 1.0};
  b.L = {1.0, 0.25, 0.5, 1.0};
  b.delta = 0.5;
  b.eta = 0.1;
  b.grad1_l2 = 1.0;
  b.d = 4;
  EXPECT_DOUBLE_EQ(bound_hT(b), 521.0);

  BoundInputs t0 = b;
  t0.T = 0;
  EXPECT_DOUBLE_EQ(bound_hT(t0), 1.0);

  BoundInputs bad = b;
  bad.delta = 0.0;
  EXPECT_THROW(bound_hT(bad), std::invalid_argument);
}

TEST(BoundHT, CoordinateVariant) {
  BoundInputs in;
  in.T = 50;
  in.sigma = {2.0, 0.5, 0.1, 1.0};
  in.L = {1.0, 0.25, 0.5, 1.0};
  in.delta = 0.25;
  in.eta = 0.3;
  in.grad1_l2 = 1.5;
  in.d = 4;
  const double h = bound_hT(in);
  // coordinate 0 carries both sup norms, so its h_i matches the global h
  EXPECT_DOUBLE_EQ(bound_hT_coord(in, 0), h);
  for (int i = 0; i < in.d; ++i) EXPECT_LE(bound_hT_coord(in, i), h + 1e-9);
  EXPECT_THROW(bound_hT_coord(in, -1), std::invalid_argument);
  EXPECT_THROW(bound_hT_coord(in, 4), std::invalid_argument);
}

TEST(BoundQ, NoiselessFlatIsDelta1) {
  BoundInputs in;
  in.delta1 = 2.75;
  in.T = 1000;
  in.sigma = {0.0, 0.0};
  in.L = {0.0, 0.0};
  in.delta = 0.125;
  in.eta = 0.9;
  in.grad1_l2 = 0.0;
  in.d = 2;
  EXPECT_DOUBLE_EQ(bound_Q(in), 2.75);
}

TEST(BoundQ, UnitLogCase) {
  // delta chosen so h(T) = e exactly: coefficient * ln h collapses to
  // 2 eta ||sigma||_1 + eta^2 ||L||_1 / 2 = 2*1 + 1 = 3.
  BoundInputs in;
  in.delta1 = 1.0;
  in.T = 1;
  in.sigma = {0.5, 0.5};
  in.L = {1.0, 1.0};
  in.eta = 1.0;
  in.grad1_l2 = 0.0;
  in.d = 2;
  in.delta = std::sqrt(2.25 / (std::exp(1.0) - 1.0));
  EXPECT_NEAR(bound_hT(in), std::exp(1.0), 1e-12);
  EXPECT_NEAR(bound_Q(in), 4.0, 1e-12);
}

TEST(BoundQ, FrozenWorstCase) {
  BoundInputs in;
  in.delta1 = 8.0;
  in.T = 1000;
  in.sigma.assign(16, 0.1);
  in.L.assign(16, 1.0);
  in.eta = 0.25;
  in.delta = 1.0 / 32.0;
  in.grad1_l2 = 4.0;
  in.d = 16;
  const double h = bound_hT(in);
  EXPECT_DOUBLE_EQ(h, 1032208394241.0);
  EXPECT_NEAR(std::log(h), 27.6627216950064, 1e-12);
  EXPECT_NEAR(bound_Q(in), 43.9615382035083, 1e-11);
}

TEST(TheoremBound, Frozen) {
  EXPECT_NEAR(theorem_bound(1.0, 1.0, 16, 1.0), 2.21957879437771, 1e-13);
  EXPECT_DOUBLE_EQ(theorem_bound(0.0, 1.0, 100, 1.0), 0.0);

  // zero sigma_l1 leaves only the deterministic terms
  const double Q = 2.0, eta = 0.5;
  const long T = 4;
  const double expected =
      2.0 * std::sqrt(3.0) * Q / (eta * 2.0) + std::sqrt(2.0 * Q / (eta * 4.0));
  EXPECT_DOUBLE_EQ(theorem_bound(Q, eta, T, 0.0), expected);

  EXPECT_THROW(theorem_bound(-1.0, 1.0, 10, 1.0), std::invalid_argument);
  EXPECT_THROW(theorem_bound(1.0, 1.0, 0, 1.0), std::invalid_argument);
}

TEST(TheoremBound, HypothesisGate) {
  EXPECT_TRUE(theorem_hypothesis(0.2, 4));
  EXPECT_FALSE(theorem_hypothesis(0.25, 4));
  EXPECT_NO_THROW(theorem_bound_checked(1.0, 1.0, 16, 1.0, 0.2499, 4));
  EXPECT_THROW(theorem_bound_checked(1.0, 1.0, 16, 1.0, 0.25, 4), std::invalid_argument);
  EXPECT_THROW(theorem_bound_checked(1.0, 1.0, 16, 1.0, 0.3, 4), std::invalid_argument);
}

TEST(TheoremBound, PresimplifiedOrdering) {
  // with d*delta = 1 both forms agree; with d*delta < 1 the displayed
  // (simplified) bound dominates the pre-simplification middle term
  const double Q = 3.0, eta = 0.7, s1 = 2.0;
  const long T = 256;
  EXPECT_DOUBLE_EQ(theorem_bound_presimplified(Q, eta, T, s1, 4, 0.25),
                   theorem_bound(Q, eta, T, s1));
  EXPECT_LE(theorem_bound_presimplified(Q, eta, T, s1, 4, 0.01),
            theorem_bound(Q, eta, T, s1));
}

TEST(TheoremBound, Monotonicity) {
  const double Q = 3.0, eta = 0.7, s1 = 2.0;
  double prev = theorem_bound(Q, eta, 1, s1);
  for (long T = 2; T <= (1L << 20); T *= 2) {
    const double cur = theorem_bound(Q, eta, T, s1);
    EXPECT_LT(cur, prev);
    prev = cur;
  }
  double prev_q = theorem_bound(0.0, eta, 100, s1);
  for (int k = 1; k <= 10; ++k) {
    const double cur = theorem_bound(static_cast<double>(k), eta, 100, s1);
    EXPECT_GT(cur, prev_q);
    prev_q = cur;
  }
}

TEST(RatioPredictors, Examples) {
  const R1R2 a = r1_r2(1.0, 1.0 / 16.0, 1.0 / 16.0);
  EXPECT_DOUBLE_EQ(a.r1, 4.0);
  EXPECT_DOUBLE_EQ(a.r2, 4.0);

  const int d = 9;
  const R1R2 b = r1_r2(1.0 / d, 1.0, 1.0);
  EXPECT_DOUBLE_EQ(b.r1, 1.0 / 3.0);
  EXPECT_DOUBLE_EQ(b.r2, 1.0 / 3.0);

  const R1R2 c = r1_r2(1.0, 1.0, 1.0);
  EXPECT_DOUBLE_EQ(c.r1, 1.0);
  EXPECT_DOUBLE_EQ(c.r2, 1.0);

  EXPECT_THROW(r1_r2(0.0, 1.0, 1.0), std::invalid_argument);
  EXPECT_THROW(r1_r2(1.0, -0.5, 1.0), std::invalid_argument);
  EXPECT_THROW(r1_r2(1.0, 1.0, 0.0), std::invalid_argument);
}

TEST(LogSumLemma, Examples) {
  const LogSumCheck empty = log_sum_lemma_check({}, 1.0);
  EXPECT_DOUBLE_EQ(empty.lhs, 0.0);
  EXPECT_DOUBLE_EQ(empty.rhs, 0.0);
  EXPECT_TRUE(empty.holds);

  const LogSumCheck zeros = log_sum_lemma_check({0.0, 0.0, 0.0}, 0.5);
  EXPECT_DOUBLE_EQ(zeros.lhs, 0.0);
  EXPECT_DOUBLE_EQ(zeros.rhs, 0.0);
  EXPECT_TRUE(zeros.holds);

  const LogSumCheck two = log_sum_lemma_check({1.0, 1.0}, 1.0);
  EXPECT_DOUBLE_EQ(two.lhs, 5.0 / 6.0);
  EXPECT_NEAR(two.rhs, 1.09861228866811, 1e-13);
  EXPECT_TRUE(two.holds);

  EXPECT_THROW(log_sum_lemma_check({1.0, -0.1}, 1.0), std::invalid_argument);
  EXPECT_THROW(log_sum_lemma_check({1.0}, 0.0), std::invalid_argument);
}

TEST(LogSumLemma, RandomSequences) {
  for (int rep = 0; rep < 1000; ++rep) {
    const std::uint64_t seed = 8100 + static_cast<std::uint64_t>(rep);
    const int n = 1 + static_cast<int>(u01(seed, 0, 0) * 100.0);
    std::vector<double> a(n);
    for (int i = 0; i < n; ++i) a[i] = u01(seed, 1, i) * 10.0;
    const double delta = 0.01 + u01(seed, 2, 0) * 9.99;
    const LogSumCheck c = log_sum_lemma_check(a, delta);
    EXPECT_TRUE(c.holds) << "rep " << rep << " lhs=" << c.lhs << " rhs=" << c.rhs;
  }
}

TEST(RateFit, ExactPowerLaws) {
  std::vector<std::tuple<double, double, double>> samples;
  for (double d : {2.0, 4.0, 8.0, 16.0})
    for (double T : {10.0, 100.0, 1000.0})
      samples.emplace_back(d, T, std::sqrt(d) / std::sqrt(T));
  const RateFit f = fit_rate(samples);
  EXPECT_NEAR(f.alpha_d, 0.5, 1e-10);
  EXPECT_NEAR(f.beta_T, -0.5, 1e-10);
  EXPECT_NEAR(f.intercept, 0.0, 1e-10);
  EXPECT_NEAR(f.r_squared, 1.0, 1e-12);

  samples.clear();
  for (double d : {3.0, 9.0, 27.0})
    for (double T : {8.0, 64.0, 512.0})
      samples.emplace_back(d, T, 5.0 * d / std::pow(T, 0.25));
  const RateFit g = fit_rate(samples);
  EXPECT_NEAR(g.alpha_d, 1.0, 1e-10);
  EXPECT_NEAR(g.beta_T, -0.25, 1e-10);
  EXPECT_NEAR(g.intercept, std::log10(5.0), 1e-10);
}

TEST(RateFit, Errors) {
  std::vector<std::tuple<double, double, double>> thin;
  for (double d : {2.0, 4.0})
    for (double T : {10.0, 100.0, 1000.0})
      thin.emplace_back(d, T, 1.0);
  EXPECT_THROW(fit_rate(thin), std::invalid_argument);

  std::vector<std::tuple<double, double, double>> bad;
  for (double d : {2.0, 4.0, 8.0})
    for (double T : {10.0, 100.0, 1000.0})
      bad.emplace_back(d, T, 0.0);
  EXPECT_THROW(fit_rate(bad), std::invalid_argument);
}

TEST(SlopeFit, ExactAndErrors) {
  std::vector<std::pair<double, double>> xy;
  for (double x : {10.0, 100.0, 1000.0, 10000.0})
    xy.emplace_back(x, 3.0 * std::pow(x, -0.7));
  const SlopeFit f = fit_loglog_1d(xy);
  EXPECT_NEAR(f.slope, -0.7, 1e-10);
  EXPECT_NEAR(f.intercept, std::log10(3.0), 1e-10);
  EXPECT_NEAR(f.r_squared, 1.0, 1e-12);

  EXPECT_THROW(fit_loglog_1d({{10.0, 1.0}}), std::invalid_argument);
  EXPECT_THROW(fit_loglog_1d({{10.0, 1.0}, {10.0, 2.0}}), std::invalid_argument);
  EXPECT_THROW(fit_loglog_1d({{10.0, 1.0}, {100.0, 0.0}}), std::invalid_argument);
}

TEST(TheoremBound, HoldsOnSimulatedRuns) {
  // adagrad on a noisy quadratic: the seed-averaged gradient l1 metric must
  // sit below the closed-form RHS evaluated at the same inputs
  const int d = 8;
  const long T = 400;
  Problem p = make_quadratic(std::vector<double>(d, 1.0));
  NoiseModel nm;
  nm.sigma = sigma_constant(d, 0.2);
  nm.distribution = NoiseDist::Rademacher;

  RunSpec rs;
  rs.method = Method::AdaGrad;
  rs.eta = 1.0 / std::sqrt(static_cast<double>(d));
  rs.delta = 1e-8;
  rs.T = T;

  double mean_metric = 0.0;
  const int n_seeds = 100;
  for (int s = 1; s <= n_seeds; ++s) {
    rs.seed = static_cast<std::uint64_t>(s);
    mean_metric += run(p, nm, rs).summary.avg_grad_l1;
  }
  mean_metric /= n_seeds;

  const Eval e1 = eval(p, p.init_point);
  BoundInputs in;
  in.delta1 = e1.value - p.f_star;
  in.eta = rs.eta;
  in.delta = rs.delta;
  in.sigma = nm.sigma;
  in.L = p.smoothness;
  in.grad1_l2 = norms(e1.gradient).l2;
  in.T = T;
  in.d = d;
  const double rhs = theorem_bound_checked(bound_Q(in), in.eta, T, norms(in.sigma).l1,
                                           in.delta, d);
  EXPECT_LE(mean_metric, rhs);
}
