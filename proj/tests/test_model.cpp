#include <gtest/gtest.h>

#include <chrono>
#include <cmath>
#include <random>

#include <Eigen/Eigenvalues>
#include <Eigen/LU>

#include "ffcc/model.hpp"
#include "oracles.hpp"

using namespace ffcc;

namespace {

const HistogramGeometry kGeom{64, 1.0 / 32, -1.0, -1.0};

std::pair<int, int> argmax(const Grid& g) {
  std::pair<int, int> best{0, 0};
  for (int i = 0; i < g.n(); ++i)
    for (int j = 0; j < g.n(); ++j)
      if (g(i, j) > g(best.first, best.second)) best = {i, j};
  return best;
}

LinearImage random_image(int w, int h, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> d(0.05, 0.9);
  LinearImage img(w, h);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) img.set(x, y, {d(rng), d(rng), d(rng)});
  return img;
}

}  // namespace

TEST(Softmax, ConstantIsUniform) {
  const Grid p = softmax2d(Grid(8, 3.0));
  for (double v : p.values()) EXPECT_NEAR(v, 1.0 / 64, 1e-15);
}

TEST(Softmax, ShiftInvariantAndNormalized) {
  std::mt19937_64 rng(1);
  Grid z = oracle::random_grid(8, rng, -5, 5);
  const Grid a = softmax2d(z);
  for (double& v : z.values()) v += 123.0;
  const Grid b = softmax2d(z);
  EXPECT_NEAR(a.sum(), 1.0, 1e-12);
  for (std::size_t k = 0; k < a.size(); ++k) EXPECT_NEAR(a.values()[k], b.values()[k], 1e-15);
}

TEST(Softmax, TwoBins) {
  Grid z(4, -1e4);
  z(0, 0) = std::log(3.0);
  z(2, 1) = 0.0;
  const Grid p = softmax2d(z);
  EXPECT_NEAR(p(0, 0), 0.75, 1e-15);
  EXPECT_NEAR(p(2, 1), 0.25, 1e-15);
}

TEST(Forward, ZeroModelIsUniform) {
  std::mt19937_64 rng(2);
  const HistogramStack s = build_stack(random_image(10, 10, rng), kGeom);
  const Grid p = forward(s, ModelParams::zeros(kGeom));
  for (double v : p.values()) EXPECT_NEAR(v, 1.0 / 4096, 1e-15);
}

TEST(Forward, LargeBiasDominates) {
  std::mt19937_64 rng(3);
  const HistogramStack s = build_stack(random_image(10, 10, rng), kGeom);
  ModelParams m = ModelParams::zeros(kGeom);
  m.bias(17, 44) = 50.0;
  EXPECT_GT(forward(s, m)(17, 44), 1.0 - 1e-15);
}

TEST(Forward, DeltaFilterPeaksAtHistogramBin) {
  LinearImage img(4, 4);
  for (int y = 0; y < 4; ++y)
    for (int x = 0; x < 4; ++x) img.set(x, y, {0.5, 0.6, 0.7});
  const HistogramStack s = build_stack(img, kGeom);
  ModelParams m = ModelParams::zeros(kGeom);
  m.filters[0](0, 0) = 5.0;
  const auto [i, j] = chroma_bin(*compute_uv({0.5, 0.6, 0.7}), kGeom);
  EXPECT_EQ(argmax(forward(s, m)), std::make_pair(i, j));
}

TEST(Forward, MatchesDirectConvolution) {
  std::mt19937_64 rng(4);
  const HistogramGeometry g{8, 0.25, -1.0, -1.0};
  const HistogramStack s = build_stack(random_image(12, 12, rng), g);
  ModelParams m = ModelParams::zeros(g);
  m.filters[0] = oracle::random_grid(8, rng);
  m.filters[1] = oracle::random_grid(8, rng);
  m.gain_log = oracle::random_grid(8, rng, -0.5, 0.5);
  m.bias = oracle::random_grid(8, rng);
  const Grid logits = forward_logits(s, m);
  const Grid c0 = oracle::direct_convolve(s.channels[0], m.filters[0]);
  const Grid c1 = oracle::direct_convolve(s.channels[1], m.filters[1]);
  for (std::size_t k = 0; k < logits.size(); ++k) {
    const double expected =
        m.bias.values()[k] + std::exp(m.gain_log.values()[k]) * (c0.values()[k] + c1.values()[k]);
    EXPECT_NEAR(logits.values()[k], expected, 1e-12);
  }
}

TEST(Forward, GeometryMismatch) {
  std::mt19937_64 rng(5);
  const HistogramStack s = build_stack(random_image(4, 4, rng), {64, 1.0 / 32, 0.0, 0.0});
  EXPECT_THROW(forward(s, ModelParams::zeros(kGeom)), Error);
}

TEST(Forward, TintShiftsArgmaxWithoutGainBias) {
  std::mt19937_64 rng(6);
  const LinearImage img = random_image(24, 24, rng);
  ModelParams m = ModelParams::zeros(kGeom);
  m.filters[0] = oracle::random_grid(64, rng);
  m.filters[1] = oracle::random_grid(64, rng);
  const double h = kGeom.bin_size;
  const auto [i0, j0] = argmax(forward(build_stack(img, kGeom), m));
  const auto [i1, j1] = argmax(forward(build_stack(img.scaled({std::exp(-4 * h), 1.0, std::exp(2 * h)}), kGeom), m));
  EXPECT_EQ((i1 - i0 + 64) % 64, 4);
  EXPECT_EQ((j1 - j0 + 64) % 64, 62);
}

TEST(Dealias, GrayLightIsIdentity) {
  const Chroma mu{0.9, -0.99};
  EXPECT_EQ(dealias_gray_light(mu, kGeom), mu);
}

TEST(Dealias, GrayWorld) {
  const Chroma mean{0.1, -0.2};
  EXPECT_EQ(dealias_gray_world(mean, mean, kGeom), mean);
  const Chroma far{mean.u + kGeom.period(), mean.v};
  EXPECT_NEAR(dealias_gray_world(far, mean, kGeom).u, mean.u, 1e-15);
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> d(-10, 10);
  for (int t = 0; t < 1000; ++t) {
    const Chroma mu{d(rng), d(rng)}, m{d(rng), d(rng)};
    const Chroma out = dealias_gray_world(mu, m, kGeom);
    EXPECT_LE(std::abs(out.u - m.u), kGeom.period() / 2 + 1e-12);
    EXPECT_LE(std::abs(out.v - m.v), kGeom.period() / 2 + 1e-12);
    const double k = (out.u - mu.u) / kGeom.period();
    EXPECT_NEAR(k, std::round(k), 1e-9);
  }
}

TEST(IlluminantRgb, Values) {
  const Rgb n = illuminant_rgb({0, 0});
  EXPECT_NEAR(n.r, 1 / std::sqrt(3.0), 1e-15);
  EXPECT_NEAR(n.g, 1 / std::sqrt(3.0), 1e-15);
  const Rgb a = illuminant_rgb({std::log(2.0), 0});
  EXPECT_NEAR(a.r, 1.0 / 3, 1e-15);
  EXPECT_NEAR(a.g, 2.0 / 3, 1e-15);
  EXPECT_NEAR(a.b, 2.0 / 3, 1e-15);
  for (const Chroma c : {Chroma{0.3, -0.7}, Chroma{-1.2, 0.4}}) {
    const Rgb rgb = illuminant_rgb(c);
    EXPECT_NEAR(std::sqrt(rgb.r * rgb.r + rgb.g * rgb.g + rgb.b * rgb.b), 1.0, 1e-12);
    const auto back = compute_uv(rgb);
    EXPECT_NEAR(back->u, c.u, 1e-12);
    EXPECT_NEAR(back->v, c.v, 1e-12);
  }
}

TEST(Estimate, ZeroModelIsDegenerate) {
  std::mt19937_64 rng(8);
  EXPECT_THROW(estimate(random_image(8, 8, rng), ModelParams::zeros(kGeom)), DegenerateConcentration);
}

TEST(Estimate, NeutralPriorOnWhiteImage) {
  LinearImage img(6, 6);
  for (int y = 0; y < 6; ++y)
    for (int x = 0; x < 6; ++x) img.set(x, y, {0.5, 0.5, 0.5});
  ModelParams m = ModelParams::zeros(kGeom);
  // Bias peaked at the neutral bin (32, 32).
  for (int i = 0; i < 64; ++i)
    for (int j = 0; j < 64; ++j) {
      const double di = i - 32, dj = j - 32;
      m.bias(i, j) = -(di * di + dj * dj) / 8.0;
    }
  const IlluminantEstimate e = estimate(img, m);
  const double s = 1 / std::sqrt(3.0);
  EXPECT_NEAR(e.rgb.r, s, 1e-6);
  EXPECT_NEAR(e.rgb.g, s, 1e-6);
  EXPECT_NEAR(e.rgb.b, s, 1e-6);
  EXPECT_NEAR(e.entropy, 0.5 * std::log(e.posterior.sigma.determinant()), 1e-15);
}

TEST(Estimate, Deterministic) {
  std::mt19937_64 rng(9);
  const LinearImage img = random_image(30, 20, rng);
  ModelParams m = ModelParams::zeros(kGeom);
  m.filters[0] = oracle::random_grid(64, rng);
  m.bias = oracle::random_grid(64, rng);
  const IlluminantEstimate a = estimate(img, m), b = estimate(img, m);
  EXPECT_EQ(a.posterior.mu, b.posterior.mu);
  EXPECT_EQ(a.posterior.sigma, b.posterior.sigma);
  EXPECT_EQ(a.rgb, b.rgb);
}

TEST(Estimate, ThumbnailTiming) {
  std::mt19937_64 rng(10);
  const LinearImage img = random_image(48, 32, rng);
  ModelParams m = ModelParams::zeros(kGeom);
  m.filters[0] = oracle::random_grid(64, rng);
  m.filters[1] = oracle::random_grid(64, rng);
  const Estimator est(m);
  est.estimate(img, DealiasMode::kGrayLight);
  const auto t0 = std::chrono::steady_clock::now();
  for (int k = 0; k < 20; ++k) est.estimate(img, DealiasMode::kGrayLight);
  const double ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count() / 20;
  EXPECT_LT(ms, 5.0);
}
