#include <gtest/gtest.h>

#include <numeric>

#include "test_helpers.hpp"

using namespace suction;

TEST(Schedule, CosineEndpointsAndMonotonicity) {
  const DiffusionSchedule sched = cosine_schedule(20);
  ASSERT_EQ(sched.alpha_bar.size(), 21u);
  EXPECT_DOUBLE_EQ(sched.alpha_bar[0], 1.0);
  for (int t = 1; t <= 20; ++t) EXPECT_LT(sched.alpha_bar[t], sched.alpha_bar[t - 1]);
  EXPECT_LT(sched.alpha_bar[20], 1e-3);
  EXPECT_GT(sched.alpha_bar[20], 0.0);
  EXPECT_THROW(cosine_schedule(0), BadT);
}

TEST(Schedule, TransitionVarianceAlgebra) {
  const DiffusionSchedule sched = cosine_schedule(20);
  // beta~_1 vanishes because alpha_bar_0 = 1
  EXPECT_DOUBLE_EQ(transition_variance(sched, 1), 0.0);
  for (int t = 1; t <= 20; ++t) {
    const double beta = 1.0 - sched.alpha_bar[t] / sched.alpha_bar[t - 1];
    EXPECT_NEAR(step_beta(sched, t), beta, 1e-15);
    const double expected =
        (1.0 - sched.alpha_bar[t - 1]) / (1.0 - sched.alpha_bar[t]) * beta;
    EXPECT_NEAR(transition_variance(sched, t), expected, 1e-15);
    EXPECT_GE(transition_variance(sched, t), 0.0);
    EXPECT_LT(transition_variance(sched, t), 1.0);
  }
  EXPECT_THROW(step_beta(sched, 0), BadSteps);
  EXPECT_THROW(transition_variance(sched, 21), BadSteps);
}

TEST(ScaleSignal, KnownValues) {
  EXPECT_DOUBLE_EQ(scale_signal({0.0}, 0.5)[0], 0.0);
  // (2 * sigmoid(1) - 1) / 2
  EXPECT_NEAR(scale_signal({1.0}, 0.5)[0], 0.23105857863000487, 1e-12);
  const double big = scale_signal({20.0}, 0.5)[0];
  EXPECT_LT(big, 0.5);
  EXPECT_NEAR(big, 0.5, 1e-8);
  // the asymptote is attained at double precision for very large inputs
  EXPECT_DOUBLE_EQ(scale_signal({50.0}, 0.5)[0], 0.5);
}

TEST(ScaleSignal, ExactInverse) {
  for (int i = 0; i <= 20; ++i) {
    const double s = i / 20.0;
    const ScoreMap back = inverse_scale_signal(scale_signal({s}, 0.5), 0.5);
    EXPECT_NEAR(back[0], s, 1e-9);
  }
  // out-of-range latents clamp into [0, 1]
  EXPECT_DOUBLE_EQ(inverse_scale_signal({-2.0}, 0.5)[0], 0.0);
  EXPECT_DOUBLE_EQ(inverse_scale_signal({2.0}, 0.5)[0], 1.0);
}

TEST(ForwardSample, EndpointBehavior) {
  const DiffusionSchedule sched = cosine_schedule(20);
  Rng rng(5);
  ScoreMap x0(16), eps(16);
  for (auto& v : x0) v = rng.uniform(-0.4, 0.4);
  for (auto& v : eps) v = rng.gaussian();

  EXPECT_EQ(forward_sample(x0, 0, sched, eps), x0);  // alpha_bar_0 = 1

  const ScoreMap tail = forward_sample(x0, 20, sched, eps);
  for (size_t i = 0; i < tail.size(); ++i) EXPECT_NEAR(tail[i], eps[i], 1e-3);

  EXPECT_THROW(forward_sample(x0, 5, sched, ScoreMap(4)), ShapeMismatch);
  EXPECT_THROW(forward_sample(x0, 21, sched, eps), BadSteps);
}

TEST(ForwardSample, MonteCarloMoments) {
  const DiffusionSchedule sched = cosine_schedule(20);
  Rng rng(7);
  const int draws = 10000;
  ScoreMap x0(8);
  for (auto& v : x0) v = rng.uniform(-0.4, 0.4);

  for (int t : {5, 10, 15}) {
    const double a = sched.alpha_bar[t];
    double sum = 0.0, sum_sq = 0.0;
    const size_t n_samples = static_cast<size_t>(draws) * x0.size();
    ScoreMap eps(x0.size());
    for (int d = 0; d < draws; ++d) {
      for (auto& e : eps) e = rng.gaussian();
      const ScoreMap xt = forward_sample(x0, t, sched, eps);
      for (size_t i = 0; i < xt.size(); ++i) {
        const double resid = xt[i] - std::sqrt(a) * x0[i];
        sum += resid;
        sum_sq += resid * resid;
      }
    }
    const double mean = sum / n_samples;
    const double var = sum_sq / n_samples - mean * mean;
    const double se = std::sqrt((1.0 - a) / n_samples);
    EXPECT_LT(std::abs(mean), 3.0 * se) << "t=" << t;
    EXPECT_NEAR(var, 1.0 - a, 0.05 * (1.0 - a)) << "t=" << t;
  }
}

// ---------------------------------------------------------------------------
// Condition features
// ---------------------------------------------------------------------------

TEST(Features, FlatPlateValues) {
  PointCloud cloud;
  for (int y = 0; y < 20; ++y) {
    for (int x = 0; x < 20; ++x) {
      cloud.points.push_back({x * 0.01, y * 0.01, 0.0});
      cloud.normals.push_back({0.0, 0.0, 1.0});
    }
  }
  const ConditionFeatures f = condition_features(cloud);
  ASSERT_EQ(f.rows, cloud.size());
  for (size_t i = 0; i < f.rows; ++i) {
    EXPECT_DOUBLE_EQ(f.at(i, 0), 1.0);   // n_z
    EXPECT_DOUBLE_EQ(f.at(i, 1), 0.0);   // angle to +z
    EXPECT_NEAR(f.at(i, 2), 1.0, 1e-9);  // planar neighborhood
    EXPECT_DOUBLE_EQ(f.at(i, 3), 0.0);   // no normal deviation
    EXPECT_DOUBLE_EQ(f.at(i, 4), 0.0);   // zero z extent
    EXPECT_DOUBLE_EQ(f.at(i, 7), 1.0);   // bias
  }
}

TEST(Features, VerticalFaceAngle) {
  PointCloud cloud;
  for (int i = 0; i < 40; ++i) {
    cloud.points.push_back({0.0, 0.01 * i, 0.01 * (i % 7)});
    cloud.normals.push_back({1.0, 0.0, 0.0});
  }
  const ConditionFeatures f = condition_features(cloud);
  for (size_t i = 0; i < f.rows; ++i) EXPECT_NEAR(f.at(i, 1), 0.5, 1e-12);
}

TEST(Features, RangesOnGeneratedScenes) {
  SceneConfig cfg;
  cfg.n_objects_min = 3;
  cfg.n_objects_max = 7;
  cfg.resolution_x = cfg.resolution_y = 64;
  for (uint64_t seed = 0; seed < 10; ++seed) {
    const PointCloud cloud = scene_to_cloud(generate_scene(cfg, seed));
    const ConditionFeatures f = condition_features(cloud);
    for (size_t i = 0; i < f.rows; ++i) {
      EXPECT_GE(f.at(i, 0), 0.0);  // normals oriented up
      EXPECT_LE(f.at(i, 0), 1.0);
      for (int c = 1; c < ConditionFeatures::kCount; ++c) {
        EXPECT_TRUE(std::isfinite(f.at(i, c)));
        EXPECT_GE(f.at(i, c), 0.0) << "feature " << c;
        EXPECT_LE(f.at(i, c), 1.0) << "feature " << c;
      }
    }
  }
}

TEST(Features, MissingNormalsThrows) {
  Rng rng(3);
  PointCloud cloud = testutil::random_cloud(rng, 32);
  EXPECT_THROW(condition_features(cloud), MissingNormals);
}

// ---------------------------------------------------------------------------
// Denoiser
// ---------------------------------------------------------------------------

namespace {

ConditionFeatures random_features(Rng& rng, size_t rows) {
  ConditionFeatures f;
  f.rows = rows;
  f.data.resize(rows * ConditionFeatures::kCount);
  for (auto& v : f.data) v = rng.uniform(0.0, 1.0);
  return f;
}

}  // namespace

TEST(Denoise, ZeroWeightsPassThrough) {
  Rng rng(9);
  const ConditionFeatures f = random_features(rng, 32);
  ScoreMap x(32);
  for (auto& v : x) v = rng.gaussian();
  const DenoiserParams p = DenoiserParams::zeros();
  EXPECT_EQ(denoise(p, x, 7, f), x);
}

TEST(Denoise, PermutationEquivariance) {
  Rng rng(11);
  const size_t n = 40;
  const ConditionFeatures f = random_features(rng, n);
  ScoreMap x(n);
  for (auto& v : x) v = rng.gaussian();
  DenoiserParams p = DenoiserParams::random_init(rng, 16, 8);

  std::vector<int> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  for (size_t i = n - 1; i > 0; --i) std::swap(perm[i], perm[rng.uniform_index(i + 1)]);

  ConditionFeatures fp;
  fp.rows = n;
  fp.data.resize(n * ConditionFeatures::kCount);
  ScoreMap xp(n);
  for (size_t i = 0; i < n; ++i) {
    xp[i] = x[perm[i]];
    for (int c = 0; c < ConditionFeatures::kCount; ++c) {
      fp.data[i * ConditionFeatures::kCount + c] = f.at(perm[i], c);
    }
  }
  const ScoreMap out = denoise(p, x, 3, f);
  const ScoreMap outp = denoise(p, xp, 3, fp);
  for (size_t i = 0; i < n; ++i) EXPECT_EQ(outp[i], out[perm[i]]);
}

TEST(Denoise, FiniteOutputsAndShapeChecks) {
  Rng rng(13);
  const ConditionFeatures f = random_features(rng, 64);
  DenoiserParams p = DenoiserParams::random_init(rng);
  for (int t = 0; t <= 20; ++t) {
    ScoreMap x(64);
    for (auto& v : x) v = rng.gaussian();
    for (double v : denoise(p, x, t, f)) EXPECT_TRUE(std::isfinite(v));
  }
  EXPECT_THROW(denoise(p, ScoreMap(5), 1, f), ShapeMismatch);
}

// ---------------------------------------------------------------------------
// DDIM
// ---------------------------------------------------------------------------

TEST(Ddim, PrevZeroReturnsPrediction) {
  const DiffusionSchedule sched = cosine_schedule(20);
  Rng rng(17);
  ScoreMap x(8), pred(8);
  for (auto& v : x) v = rng.gaussian();
  for (auto& v : pred) v = rng.uniform(-0.3, 0.3);
  EXPECT_EQ(ddim_step(x, pred, 5, 0, sched), pred);
}

TEST(Ddim, EqualAlphaIsIdentity) {
  DiffusionSchedule sched;
  sched.total_steps = 2;
  sched.alpha_bar = {1.0, 0.5, 0.5};  // hand-built: equal interior alphas
  sched.scale = 0.5;
  Rng rng(19);
  ScoreMap x(8), pred(8);
  for (auto& v : x) v = rng.gaussian();
  for (auto& v : pred) v = rng.uniform(-0.3, 0.3);
  const ScoreMap out = ddim_step(x, pred, 2, 1, sched);
  for (size_t i = 0; i < x.size(); ++i) EXPECT_NEAR(out[i], x[i], 1e-12);
}

TEST(Ddim, OracleChainRecoversTarget) {
  const DiffusionSchedule sched = cosine_schedule(20);
  Rng rng(23);
  ScoreMap truth(64);
  for (auto& v : truth) v = rng.uniform01();
  const ScoreMap scaled = scale_signal(truth, sched.scale);

  for (int steps : {1, 5, 20}) {
    Rng noise_rng(101);
    ScoreMap x = gaussian_map(truth.size(), noise_rng);
    x = ddim_chain([&](const ScoreMap&, int) { return scaled; }, std::move(x), sched,
                   inference_step_grid(20, steps));
    const ScoreMap recovered = inverse_scale_signal(x, sched.scale);
    for (size_t i = 0; i < truth.size(); ++i) {
      EXPECT_NEAR(recovered[i], truth[i], 1e-6) << "steps=" << steps;
    }
  }
}

TEST(Ddim, OneStepConsistencyForExactPrediction) {
  const DiffusionSchedule sched = cosine_schedule(20);
  Rng rng(29);
  ScoreMap x(16), pred(16);
  for (auto& v : x) v = rng.gaussian();
  for (auto& v : pred) v = rng.uniform(-0.3, 0.3);

  const ScoreMap via = ddim_step(ddim_step(x, pred, 18, 9, sched), pred, 9, 2, sched);
  const ScoreMap direct = ddim_step(x, pred, 18, 2, sched);
  for (size_t i = 0; i < x.size(); ++i) EXPECT_NEAR(via[i], direct[i], 1e-9);
}

TEST(Ddim, BadStepsThrow) {
  const DiffusionSchedule sched = cosine_schedule(20);
  const ScoreMap x(4), pred(4);
  EXPECT_THROW(ddim_step(x, pred, 5, 5, sched), BadSteps);
  EXPECT_THROW(ddim_step(x, pred, 21, 5, sched), BadSteps);
  EXPECT_THROW(ddim_step(x, pred, 5, -1, sched), BadSteps);
  EXPECT_THROW(ddim_step(x, ScoreMap(2), 5, 1, sched), ShapeMismatch);
}

TEST(Ddim, InferenceStepGrids) {
  EXPECT_EQ(inference_step_grid(20, 5), (std::vector<int>{20, 16, 12, 8, 4, 0}));
  EXPECT_EQ(inference_step_grid(20, 1), (std::vector<int>{20, 0}));
  const auto full = inference_step_grid(20, 20);
  ASSERT_EQ(full.size(), 21u);
  for (int j = 0; j <= 20; ++j) EXPECT_EQ(full[j], 20 - j);
  // oversampled grids collapse duplicates and stay strictly decreasing
  const auto dense = inference_step_grid(20, 40);
  validate_step_grid(dense, 20);
  EXPECT_THROW(validate_step_grid({5, 5, 0}, 20), BadSteps);
  EXPECT_THROW(validate_step_grid({8, 4, 1}, 20), BadSteps);
}

// ---------------------------------------------------------------------------
// Sampling
// ---------------------------------------------------------------------------

TEST(Sample, DeterministicRangeAndEquivariance) {
  Rng rng(31);
  const size_t n = 48;
  const ConditionFeatures f = random_features(rng, n);
  DenoiserParams p = DenoiserParams::random_init(rng, 16, 8);
  const DiffusionSchedule sched = cosine_schedule(20);

  const ScoreMap a = sample(p, f, sched, 20, 77);
  const ScoreMap b = sample(p, f, sched, 20, 77);
  EXPECT_EQ(a, b);  // bitwise determinism
  for (double v : a) {
    EXPECT_GE(v, 0.0);
    EXPECT_LE(v, 1.0);
  }
  EXPECT_NE(sample(p, f, sched, 20, 78), a);

  // chain equivariance with pinned initial noise
  std::vector<int> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  std::swap(perm[3], perm[20]);
  std::swap(perm[11], perm[40]);
  ConditionFeatures fp;
  fp.rows = n;
  fp.data.resize(n * ConditionFeatures::kCount);
  for (size_t i = 0; i < n; ++i) {
    for (int c = 0; c < ConditionFeatures::kCount; ++c) {
      fp.data[i * ConditionFeatures::kCount + c] = f.at(perm[i], c);
    }
  }
  Rng noise_rng(5);
  const ScoreMap x0 = gaussian_map(n, noise_rng);
  ScoreMap x0p(n);
  for (size_t i = 0; i < n; ++i) x0p[i] = x0[perm[i]];

  const auto grid = inference_step_grid(20, 20);
  const ScoreMap out = ddim_chain(
      [&](const ScoreMap& xt, int t) { return denoise(p, xt, t, f); }, x0, sched, grid);
  const ScoreMap outp = ddim_chain(
      [&](const ScoreMap& xt, int t) { return denoise(p, xt, t, fp); }, x0p, sched, grid);
  for (size_t i = 0; i < n; ++i) EXPECT_EQ(outp[i], out[perm[i]]);
}
