#include <gtest/gtest.h>

#include <Eigen/Dense>

#include <random>

#include "ffcc/smoother.hpp"

using namespace ffcc;

namespace {

BvmPosterior post(double u, double v, double suu, double suv, double svv) {
  BvmPosterior p;
  p.mu = {u, v};
  p.sigma << suu, suv, suv, svv;
  return p;
}

Eigen::Matrix2d random_spd(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> d(-1, 1);
  Eigen::Matrix2d a;
  a << d(rng), d(rng), d(rng), d(rng);
  return a * a.transpose() + 0.01 * Eigen::Matrix2d::Identity();
}

}  // namespace

TEST(Smoother, InitCopiesObservation) {
  const BvmPosterior o = post(0.1, -0.2, 0.3, 0.05, 0.2);
  const SmootherState s = init_state(o, 0.25);
  EXPECT_EQ(s.mu, o.mu);
  EXPECT_EQ(s.sigma, o.sigma);
  EXPECT_EQ(s.alpha, 0.25);
  EXPECT_EQ(smooth_update(s, o).alpha, 0.25);
}

TEST(Smoother, RepeatedObservationHalvesDeterminant) {
  const BvmPosterior o = post(0.1, -0.2, 0.3, 0.05, 0.2);
  const SmootherState s = smooth_update(init_state(o, 0.0), o);
  EXPECT_LT(s.sigma.determinant(), o.sigma.determinant());
}

TEST(Smoother, PrecisionAddition) {
  const double s2 = 0.04;
  const BvmPosterior o = post(0.3, 0.1, s2, 0.0, s2);
  SmootherState s = init_state(o, 0.0);
  for (int k = 1; k <= 10; ++k) {
    s = smooth_update(s, o);
    EXPECT_NEAR(s.sigma(0, 0), s2 / (k + 1), 1e-9);
    EXPECT_NEAR(s.sigma(1, 1), s2 / (k + 1), 1e-9);
    EXPECT_NEAR(s.sigma(0, 1), 0.0, 1e-9);
    EXPECT_EQ(s.mu, o.mu);
  }
}

TEST(Smoother, HugeObservationCovarianceIsIgnored) {
  const SmootherState s = init_state(post(0.2, 0.3, 0.01, 0.002, 0.02), 0.005);
  const SmootherState n = smooth_update(s, post(0.5, -0.4, 1e12, 0, 1e12));
  EXPECT_NEAR(n.mu.u, 0.2, 1e-9);
  EXPECT_NEAR(n.mu.v, 0.3, 1e-9);
  EXPECT_NEAR(n.sigma(0, 0), 0.015, 1e-9);
  EXPECT_NEAR(n.sigma(0, 1), 0.002, 1e-9);
  EXPECT_NEAR(n.sigma(1, 1), 0.025, 1e-9);
}

TEST(Smoother, HugePriorCovarianceIsIgnored) {
  const SmootherState s = init_state(post(0.2, 0.3, 1e12, 0, 1e12), 0.0);
  const SmootherState n = smooth_update(s, post(0.5, -0.4, 0.01, 0.003, 0.02));
  EXPECT_NEAR(n.mu.u, 0.5, 1e-9);
  EXPECT_NEAR(n.mu.v, -0.4, 1e-9);
  EXPECT_NEAR(n.sigma(0, 0), 0.01, 1e-9);
  EXPECT_NEAR(n.sigma(0, 1), 0.003, 1e-9);
  EXPECT_NEAR(n.sigma(1, 1), 0.02, 1e-9);
}

TEST(Smoother, MatchesDirectSolveAndLoewnerOrder) {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> d(-0.5, 0.5), a(0.0, 0.1);
  for (int t = 0; t < 1000; ++t) {
    SmootherState s;
    s.mu = {d(rng), d(rng)};
    s.sigma = random_spd(rng);
    s.alpha = a(rng);
    BvmPosterior o;
    o.mu = {d(rng), d(rng)};
    o.sigma = random_spd(rng);
    const SmootherState n = smooth_update(s, o);
    const Eigen::Matrix2d pred = s.sigma + s.alpha * Eigen::Matrix2d::Identity();
    const Eigen::Matrix2d prec = pred.inverse() + o.sigma.inverse();
    const Eigen::Vector2d rhs = pred.inverse() * Eigen::Vector2d(s.mu.u, s.mu.v) +
                                o.sigma.inverse() * Eigen::Vector2d(o.mu.u, o.mu.v);
    const Eigen::Vector2d mu = prec.fullPivLu().solve(rhs);
    EXPECT_NEAR(n.mu.u, mu(0), 1e-9 * std::max(1.0, mu.norm()));
    EXPECT_NEAR(n.mu.v, mu(1), 1e-9 * std::max(1.0, mu.norm()));
    const Eigen::Matrix2d diff = pred - n.sigma;
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es(diff);
    EXPECT_GE(es.eigenvalues().minCoeff(), -1e-12);
  }
}

TEST(Smoother, FixedPointMean) {
  const SmootherState s = init_state(post(0.123, -0.456, 0.02, 0.01, 0.03), 0.01);
  const SmootherState n = smooth_update(s, post(0.123, -0.456, 0.5, -0.1, 0.2));
  EXPECT_EQ(n.mu, s.mu);
}

TEST(Smoother, ResponsiveWithLargeAlpha) {
  const SmootherState s = init_state(post(0.0, 0.0, 0.01, 0, 0.01), 1e6);
  const SmootherState n = smooth_update(s, post(0.4, -0.3, 0.01, 0, 0.01));
  EXPECT_NEAR(n.mu.u, 0.4, 1e-6);
  EXPECT_NEAR(n.mu.v, -0.3, 1e-6);
}

TEST(Smoother, StableWithZeroAlpha) {
  const BvmPosterior o = post(0.1, 0.1, 0.02, 0.005, 0.01);
  SmootherState s = init_state(o, 0.0);
  double prev = s.sigma.determinant();
  for (int k = 0; k < 50; ++k) {
    s = smooth_update(s, o);
    EXPECT_LT(s.sigma.determinant(), prev);
    prev = s.sigma.determinant();
  }
  EXPECT_LT(s.sigma.norm(), 1e-3);
}

TEST(Smoother, AliasedObservationIsRemapped) {
  const SmootherState s = init_state(post(0.9, 0.0, 0.01, 0, 0.01), 0.0, 2.0);
  const SmootherState n = smooth_update(s, post(-1.05, 0.0, 0.01, 0, 0.01));
  // -1.05 + 2 = 0.95, so the fused mean is halfway between 0.9 and 0.95.
  EXPECT_NEAR(n.mu.u, 0.925, 1e-12);
}

TEST(Smoother, RejectsNonPositiveDefinite) {
  const SmootherState s = init_state(post(0, 0, 0.01, 0, 0.01), 0.0);
  EXPECT_THROW(smooth_update(s, post(0, 0, 1, 2, 1)), Error);
  EXPECT_THROW(smooth_update(s, post(0, 0, -1, 0, 1)), Error);
  EXPECT_THROW(init_state(post(0, 0, 0, 0, 1), 0.0), Error);
  EXPECT_THROW(init_state(post(0, 0, 1, 0, 1), -1.0), Error);
}
