#include <gtest/gtest.h>

#include "test_helpers.hpp"

using namespace suction;

namespace {

ConditionFeatures random_features(Rng& rng, size_t rows) {
  ConditionFeatures f;
  f.rows = rows;
  f.data.resize(rows * ConditionFeatures::kCount);
  for (auto& v : f.data) v = rng.uniform(0.0, 1.0);
  return f;
}

// Synthetic scenes whose scores are a smooth function of the features, so a
// conditional model can actually fit them.
std::vector<TrainScene> toy_dataset(Rng& rng, int scenes, int points) {
  std::vector<TrainScene> data;
  for (int s = 0; s < scenes; ++s) {
    TrainScene ts;
    ts.features = random_features(rng, points);
    ts.scores.resize(points);
    for (int i = 0; i < points; ++i) {
      ts.scores[i] =
          clamp01(0.4 * ts.features.at(i, 0) + 0.4 * ts.features.at(i, 4) +
                  0.2 * ts.features.at(i, 2));
    }
    data.push_back(std::move(ts));
  }
  return data;
}

}  // namespace

TEST(Train, OracleDenoiserHasZeroLossForAllSteps) {
  Rng rng(3);
  const DiffusionSchedule sched = cosine_schedule(20);
  ScoreMap truth(64);
  for (auto& v : truth) v = rng.uniform01();
  const ScoreMap target = scale_signal(truth, sched.scale);

  for (int t = 1; t <= 20; ++t) {
    ScoreMap eps(truth.size());
    for (auto& e : eps) e = rng.gaussian();
    const ScoreMap x_t = forward_sample(target, t, sched, eps);
    // oracle: a predictor hardcoded to the true scaled x0
    const ScoreMap pred = target;
    EXPECT_DOUBLE_EQ(mse(target, pred), 0.0) << "t=" << t;
    (void)x_t;
  }
}

TEST(Train, ZeroWeightLossMatchesMonteCarloOracle) {
  Rng rng(5);
  const DiffusionSchedule sched = cosine_schedule(20);
  const size_t n = 64;
  ScoreMap truth(n);
  for (auto& v : truth) v = rng.uniform01();
  const ScoreMap target = scale_signal(truth, sched.scale);
  const ConditionFeatures feats = random_features(rng, n);
  const DenoiserParams zero = DenoiserParams::zeros();

  // At t = T the zero-weight model predicts x_t ~= eps, so the expected loss
  // per element is x0^2 + 1.
  double expected = 1.0;
  for (double v : target) expected += v * v / static_cast<double>(n);

  const int draws = 4000;
  double sum = 0.0, sum_sq = 0.0;
  ScoreMap eps(n);
  for (int d = 0; d < draws; ++d) {
    for (auto& e : eps) e = rng.gaussian();
    const ScoreMap x_t = forward_sample(target, 20, sched, eps);
    const double loss = training_loss(zero, feats, x_t, 20, target);
    sum += loss;
    sum_sq += loss * loss;
  }
  const double mean = sum / draws;
  const double se = std::sqrt((sum_sq / draws - mean * mean) / draws);
  EXPECT_LT(std::abs(mean - expected), 4.0 * se + 1e-3);
}

TEST(Train, AnalyticGradientMatchesFiniteDifferences) {
  Rng rng(7);
  const DiffusionSchedule sched = cosine_schedule(20);
  const size_t n = 48;
  ScoreMap truth(n);
  for (auto& v : truth) v = rng.uniform01();
  const ScoreMap target = scale_signal(truth, sched.scale);
  const ConditionFeatures feats = random_features(rng, n);

  DenoiserParams params = DenoiserParams::random_init(rng);
  ScoreMap eps(n);
  for (auto& e : eps) e = rng.gaussian();
  const ScoreMap x_t = forward_sample(target, 10, sched, eps);

  const auto [loss, grad] = loss_and_grad(params, feats, x_t, 10, target);
  EXPECT_GT(loss, 0.0);

  const double h = 1e-5;
  for (int trial = 0; trial < 100; ++trial) {
    const size_t ci = rng.uniform_index(params.parameter_count());
    DenoiserParams plus = params, minus = params;
    plus.param(ci) += h;
    minus.param(ci) -= h;
    const double fd = (training_loss(plus, feats, x_t, 10, target) -
                       training_loss(minus, feats, x_t, 10, target)) /
                      (2.0 * h);
    const double g = grad.param(ci);
    const double rel = std::abs(g - fd) / std::max({std::abs(g), std::abs(fd), 1e-6});
    EXPECT_LT(rel, 1e-4) << "coordinate " << ci;
  }
}

TEST(Train, LossDropsBelowQuarterOnToySet) {
  Rng rng(11);
  const auto data = toy_dataset(rng, 20, 96);
  TrainConfig cfg;
  cfg.epochs = 200;
  cfg.seed = 4;
  const TrainResult result = train(data, cfg);
  ASSERT_EQ(result.loss_curve.size(), 200u);
  for (double l : result.loss_curve) EXPECT_TRUE(std::isfinite(l));
  EXPECT_LT(result.loss_curve.back(), 0.25 * result.loss_curve.front());
}

TEST(Train, DeterministicGivenSeed) {
  Rng rng(13);
  const auto data = toy_dataset(rng, 4, 32);
  TrainConfig cfg;
  cfg.epochs = 10;
  cfg.seed = 21;
  cfg.hidden = 16;
  const TrainResult a = train(data, cfg);
  const TrainResult b = train(data, cfg);
  EXPECT_EQ(a.loss_curve, b.loss_curve);
  for (size_t i = 0; i < a.params.parameter_count(); ++i) {
    ASSERT_EQ(a.params.param(i), b.params.param(i)) << "param " << i;
  }
}

TEST(Train, BatchedUpdatesConverge) {
  Rng rng(17);
  const auto data = toy_dataset(rng, 8, 48);
  TrainConfig cfg;
  cfg.epochs = 120;
  cfg.batch_scenes = 4;
  cfg.seed = 2;
  cfg.hidden = 32;
  const TrainResult result = train(data, cfg);
  EXPECT_LT(result.loss_curve.back(), result.loss_curve.front());
}

TEST(Train, EmptyDatasetThrows) {
  EXPECT_THROW(train({}, TrainConfig{}), EmptyDataset);
}

TEST(Train, GroundTruthRangeEnforced) {
  Rng rng(23);
  auto data = toy_dataset(rng, 1, 16);
  data[0].scores[3] = 1.5;
  TrainConfig cfg;
  cfg.epochs = 1;
  EXPECT_THROW(train(data, cfg), OutOfRange);
}
