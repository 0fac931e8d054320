#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "ffcc/config_io.hpp"
#include "ffcc/search.hpp"
#include "ffcc/trainer.hpp"
#include "oracles.hpp"
#include "toy_problem.hpp"

using namespace ffcc;

namespace {

const HistogramGeometry kSmall{8, 0.25, -1.0, -1.0};

TrainConfig small_config() {
  TrainConfig c;
  c.n = 8;
  c.bin_size = 0.25;
  c.u_lo = -1.0;
  c.v_lo = -1.0;
  c.filter = {1e-2, 0.5};
  c.gain = {1e-1, 0.3};
  c.bias = {1e-2, 0.2};
  c.pretrain_iters = 8;
  c.refine_iters = 8;
  return c;
}

SyntheticOptions small_scenes() {
  SyntheticOptions o;
  o.width = 16;
  o.height = 12;
  o.patches = 5;
  return o;
}

struct GradientStats {
  double fraction_within_1e4 = 0.0;
  double worst = 0.0;
};

GradientStats check_gradient(const TrainingObjective& obj, const std::vector<double>& x) {
  std::vector<double> g(x.size());
  obj(x, g);
  double gmax = 0.0;
  for (double v : g) gmax = std::max(gmax, std::abs(v));
  const auto f = [&](const std::vector<double>& y) {
    std::vector<double> scratch(y.size());
    return obj(y, scratch);
  };
  GradientStats s;
  int good = 0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    const double fd = oracle::central_difference(f, x, k, 1e-5);
    const double rel = oracle::relative_error(g[k], fd, 1e-6 * gmax);
    good += rel <= 1e-4;
    s.worst = std::max(s.worst, rel);
  }
  s.fraction_within_1e4 = static_cast<double>(good) / x.size();
  return s;
}

}  // namespace

TEST(LogisticLoss, DeltaAndUniform) {
  Grid p(8);
  p(3, 4) = 1.0;
  const Chroma target{kSmall.u_lo + 3.5 * kSmall.bin_size, kSmall.v_lo + 4.2 * kSmall.bin_size};
  EXPECT_NEAR(logistic_loss(p, target, kSmall).loss, 0.0, 1e-15);
  const HistogramGeometry g64{64, 1.0 / 32, 0, 0};
  EXPECT_NEAR(logistic_loss(Grid(64, 1.0 / 4096), {0.3, 0.3}, g64).loss, std::log(4096.0), 1e-12);
  EXPECT_NEAR(std::log(4096.0), 8.3178, 1e-4);
  EXPECT_THROW(logistic_loss(p, {NAN, 0.0}, kSmall), Error);
}

TEST(LogisticLoss, GradientMatchesFiniteDifferences) {
  std::mt19937_64 rng(1);
  const Grid z = oracle::random_grid(8, rng, -2, 2);
  const Chroma target{0.1, -0.3};
  const LogisticLoss l = logistic_loss(softmax2d(z), target, kSmall);
  const auto f = [&](const std::vector<double>& x) {
    Grid t(8);
    std::copy(x.begin(), x.end(), t.values().begin());
    return logistic_loss(softmax2d(t), target, kSmall).loss;
  };
  const std::vector<double> x(z.values().begin(), z.values().end());
  for (std::size_t k = 0; k < x.size(); ++k) {
    EXPECT_NEAR(l.d_logits.values()[k], oracle::central_difference(f, x, k, 1e-5), 1e-6);
  }
}

TEST(Objective, ZeroParametersPretrain) {
  const auto ex = toy::examples(3, 1, kSmall, small_scenes());
  const TrainingObjective obj(ex, kSmall, small_config(), Stage::kPretrain);
  const std::vector<double> x(obj.dimension(), 0.0);
  std::vector<double> g(x.size());
  EXPECT_NEAR(obj.data_loss(x, g), 3 * std::log(64.0), 1e-12);
  EXPECT_GT(*std::max_element(g.begin(), g.end()), 0.0);
  EXPECT_EQ(obj.dimension(), 4u * 64);
}

TEST(Objective, DuplicateSampleDoublesContribution) {
  auto ex = toy::examples(2, 2, kSmall, small_scenes());
  const TrainConfig c = small_config();
  const std::vector<double> x = toy::random_vector(4 * 64, 3, 0.5);
  std::vector<double> g(x.size());
  for (Stage stage : {Stage::kPretrain, Stage::kRefine}) {
    const double base = TrainingObjective(ex, kSmall, c, stage).data_loss(x, g);
    const double single = TrainingObjective(std::vector{ex[0]}, kSmall, c, stage).data_loss(x, g);
    auto dup = ex;
    dup.push_back(ex[0]);
    EXPECT_NEAR(TrainingObjective(dup, kSmall, c, stage).data_loss(x, g), base + single, 1e-9 * std::abs(base));
  }
}

TEST(Objective, PackUnpackRoundTrip) {
  for (Parameterization p : {Parameterization::kPreconditioned, Parameterization::kTimeDomain}) {
    TrainConfig c = small_config();
    c.parameterization = p;
    const TrainingObjective obj(toy::examples(1, 4, kSmall, small_scenes()), kSmall, c, Stage::kPretrain);
    const std::vector<double> x = toy::random_vector(obj.dimension(), 5, 1.0);
    const auto back = obj.pack(obj.unpack(x));
    for (std::size_t k = 0; k < x.size(); ++k) EXPECT_NEAR(back[k], x[k], 1e-12);
  }
}

TEST(Objective, ParameterizationsAgree) {
  const auto ex = toy::examples(3, 6, kSmall, small_scenes());
  TrainConfig pc = small_config(), tc = small_config();
  tc.parameterization = Parameterization::kTimeDomain;
  for (Stage stage : {Stage::kPretrain, Stage::kRefine}) {
    const TrainingObjective a(ex, kSmall, pc, stage), b(ex, kSmall, tc, stage);
    const std::vector<double> xa = toy::random_vector(a.dimension(), 7, 0.3);
    const std::vector<double> xb = b.pack(a.unpack(xa));
    std::vector<double> ga(xa.size()), gb(xb.size());
    EXPECT_NEAR(a(xa, ga), b(xb, gb), 1e-9 * std::abs(a(xa, ga)));
  }
}

TEST(Objective, FullChainGradient) {
  const auto ex = toy::examples(3, 8, kSmall, small_scenes());
  for (Parameterization p : {Parameterization::kPreconditioned, Parameterization::kTimeDomain}) {
    TrainConfig c = small_config();
    c.parameterization = p;
    for (Stage stage : {Stage::kPretrain, Stage::kRefine}) {
      const TrainingObjective obj(ex, kSmall, c, stage);
      const double scale = p == Parameterization::kPreconditioned ? 1.0 : 0.3;
      const GradientStats s = check_gradient(obj, toy::random_vector(obj.dimension(), 9, scale));
      EXPECT_GE(s.fraction_within_1e4, 0.95);
      EXPECT_LE(s.worst, 1e-3);
      EXPECT_EQ(obj.last_skipped(), 0u);
    }
  }
}

TEST(Objective, PretrainIsConvex) {
  const auto ex = toy::examples(3, 10, kSmall, small_scenes());
  const TrainingObjective obj(ex, kSmall, small_config(), Stage::kPretrain);
  std::vector<double> g(obj.dimension());
  for (int t = 0; t < 20; ++t) {
    const auto x = toy::random_vector(obj.dimension(), 100 + t, 2.0);
    const auto y = toy::random_vector(obj.dimension(), 200 + t, 2.0);
    const double fx = obj(x, g), fy = obj(y, g);
    for (double theta : {0.1, 0.5, 0.8}) {
      std::vector<double> z(x.size());
      for (std::size_t k = 0; k < z.size(); ++k) z[k] = theta * x[k] + (1 - theta) * y[k];
      EXPECT_LE(obj(z, g), theta * fx + (1 - theta) * fy + 1e-9);
    }
  }
}

TEST(Train, EmptyDatasetRejected) {
  EXPECT_THROW(train(std::vector<TrainingExample>{}, small_config()), Error);
}

TEST(Train, SingleSampleArgmaxAtLabel) {
  const auto ex = toy::examples(1, 11, kSmall, small_scenes());
  const TrainResult r = train(ex, small_config());
  const Grid p = forward(rebase_stack(ex[0].stack, r.params.geometry), r.params);
  const auto best = std::max_element(p.values().begin(), p.values().end()) - p.values().begin();
  const auto [i, j] = chroma_bin(ex[0].target, r.params.geometry);
  EXPECT_EQ(best, i * 8 + j);
}

TEST(Train, Deterministic) {
  const auto ex = toy::examples(12, 12, kSmall, small_scenes());
  const TrainResult a = train(ex, small_config());
  const TrainResult b = train(ex, small_config());
  EXPECT_EQ(a.params, b.params);
  ASSERT_FALSE(a.refine_trace.empty());
  EXPECT_EQ(a.refine_trace.back().loss, b.refine_trace.back().loss);
}

TEST(Train, TracesAreMonotone) {
  const auto ex = toy::examples(6, 13, kSmall, small_scenes());
  const TrainResult r = train(ex, small_config());
  for (const auto* trace : {&r.pretrain_trace, &r.refine_trace}) {
    ASSERT_GE(trace->size(), 2u);
    for (std::size_t k = 1; k < trace->size(); ++k) EXPECT_LE((*trace)[k].loss, (*trace)[k - 1].loss);
  }
}

TEST(CrossValidate, FoldAssignment) {
  const auto f = fold_assignment(9, 3);
  EXPECT_EQ(f, (std::vector<int>{0, 0, 0, 1, 1, 1, 2, 2, 2}));
  EXPECT_EQ(fold_assignment(10, 3), fold_assignment(10, 3));
  EXPECT_THROW(fold_assignment(2, 3), Error);
  EXPECT_THROW(fold_assignment(5, 1), Error);
}

TEST(CrossValidate, AggregatesHeldOutPredictions) {
  const auto ex = toy::examples(9, 14, kSmall, small_scenes());
  TrainConfig c = small_config();
  c.u_lo.reset();
  c.v_lo.reset();
  const CvResult r = cross_validate(ex, 3, c);
  ASSERT_EQ(r.predictions.size(), 9u);
  ASSERT_EQ(r.fold_metrics.size(), 3u);
  std::vector<double> errors;
  for (std::size_t k = 0; k < 9; ++k) {
    EXPECT_EQ(r.predictions[k].name, ex[k].name);
    EXPECT_EQ(r.predictions[k].fold, static_cast<int>(k / 3));
    errors.push_back(r.predictions[k].error);
  }
  EXPECT_EQ(r.overall.mean, summarize(errors).mean);
}

TEST(Config, RoundTrip) {
  TrainConfig c = small_config();
  c.dealias = DealiasMode::kGrayWorld;
  c.filter.lambda0 = 0.1 + 0.2;
  std::istringstream in(format_config(c));
  EXPECT_EQ(parse_config(in), c);
}

TEST(Config, Errors) {
  std::istringstream unknown("lambda0_filter = 1\nbogus = 2\n");
  EXPECT_THROW(parse_config(unknown), Error);
  std::istringstream bad("pretrain_iters = 0\n");
  EXPECT_THROW(parse_config(bad), Error);
  std::istringstream neg("lambda0_bias = -1\n");
  EXPECT_THROW(parse_config(neg), Error);
  std::istringstream ok("# comment\n\n  refine_iters = 3  \n");
  EXPECT_EQ(parse_config(ok).refine_iters, 3);
}

TEST(Search, SingleCandidateUnchanged) {
  SearchGrid grid;
  grid.axes = {{"lambda0_filter", {0.5}}};
  TrainConfig base;
  base.filter.lambda0 = 0.5;
  int calls = 0;
  const SearchResult r = coordinate_descent(grid, base, [&](const TrainConfig&) { return ++calls, 1.0; });
  EXPECT_EQ(r.best, base);
  EXPECT_EQ(calls, 1);
}

TEST(Search, ReturnsArgmin) {
  SearchGrid grid;
  grid.axes = {{"lambda1_gain", {1e-2, 1.0, 1e2}}};
  const auto score = [](const TrainConfig& c) { return std::abs(std::log10(c.gain.lambda1) - 1.8); };
  const SearchResult r = coordinate_descent(grid, TrainConfig{}, score);
  EXPECT_EQ(r.best.gain.lambda1, 1e2);
}

TEST(Search, BestNeverIncreases) {
  std::istringstream in("sweeps = 3\nlambda0_filter = 1e-3, 1e-2, 1e-1\nlambda1_bias = 0.1, 1, 10\n");
  const SearchGrid grid = parse_search_grid(in);
  ASSERT_EQ(grid.sweeps, 3);
  const auto score = [](const TrainConfig& c) {
    const double a = std::log10(c.filter.lambda0) + 2, b = std::log10(c.bias.lambda1);
    return a * a + b * b + 0.5 * a * b;
  };
  const SearchResult r = coordinate_descent(grid, TrainConfig{}, score);
  double best = r.history.front().score;
  for (const SearchStep& s : r.history) best = std::min(best, s.score);
  EXPECT_EQ(r.best_score, best);
  EXPECT_LE(r.best_score, r.history.front().score);
  std::istringstream bad("nonsense = 1, 2\n");
  EXPECT_THROW(parse_search_grid(bad), Error);
}

TEST(Search, CrossValidatedScore) {
  const auto ex = toy::examples(6, 15, kSmall, small_scenes());
  SearchGrid grid;
  grid.axes = {{"lambda0_bias", {1e-2, 1.0}}};
  grid.sweeps = 1;
  TrainConfig base = small_config();
  base.pretrain_iters = 3;
  base.refine_iters = 3;
  const SearchResult r = hyperparam_search(ex, grid, base, 2);
  EXPECT_EQ(r.history.size(), 2u);
  EXPECT_EQ(r.best_score, std::min(r.history[0].score, r.history[1].score));
}
