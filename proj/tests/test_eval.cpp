#include <gtest/gtest.h>

#include "test_helpers.hpp"

using namespace suction;
using testutil::plate_scene;

namespace {

Prediction pred_at(double x, double conf, int index) {
  Prediction p;
  p.candidate = {{x, 0.0, 0.0}, {0.0, 0.0, 1.0}};
  p.confidence = conf;
  p.point_index = index;
  return p;
}

}  // namespace

TEST(Nms, PairSuppressionAndSurvival) {
  const auto close_pair = nms({pred_at(0.0, 0.9, 0), pred_at(0.001, 0.8, 1)}, 0.02);
  ASSERT_EQ(close_pair.size(), 1u);
  EXPECT_EQ(close_pair[0].point_index, 0);

  const auto far_pair = nms({pred_at(0.0, 0.9, 0), pred_at(0.1, 0.8, 1)}, 0.02);
  EXPECT_EQ(far_pair.size(), 2u);
}

TEST(Nms, GreedyChain) {
  const auto kept = nms(
      {pred_at(0.0, 0.9, 0), pred_at(0.015, 0.8, 1), pred_at(0.030, 0.7, 2)}, 0.02);
  ASSERT_EQ(kept.size(), 2u);
  EXPECT_EQ(kept[0].point_index, 0);
  EXPECT_EQ(kept[1].point_index, 2);
}

TEST(Nms, TiesBreakByPointIndexAndOutputOrdered) {
  const auto kept =
      nms({pred_at(0.2, 0.5, 7), pred_at(0.0, 0.5, 2), pred_at(0.4, 0.9, 9)}, 0.02);
  ASSERT_EQ(kept.size(), 3u);
  EXPECT_EQ(kept[0].point_index, 9);  // highest confidence first
  EXPECT_EQ(kept[1].point_index, 2);  // tie resolved by lower index
  EXPECT_EQ(kept[2].point_index, 7);
}

TEST(Nms, PairwiseDistancesExceedRadius) {
  Rng rng(3);
  std::vector<Prediction> preds;
  for (int i = 0; i < 200; ++i) {
    Prediction p;
    p.candidate = {{rng.uniform(-0.1, 0.1), rng.uniform(-0.1, 0.1), 0.0}, {0.0, 0.0, 1.0}};
    p.confidence = rng.uniform01();
    p.point_index = i;
    preds.push_back(p);
  }
  const double radius = 0.02;
  const auto kept = nms(preds, radius);
  for (size_t i = 0; i < kept.size(); ++i) {
    for (size_t j = i + 1; j < kept.size(); ++j) {
      EXPECT_GT(distance(kept[i].candidate.contact, kept[j].candidate.contact), radius);
    }
  }
}

TEST(Nms, InvariantUnderMonotoneConfidenceRescale) {
  Rng rng(5);
  std::vector<Prediction> preds;
  for (int i = 0; i < 150; ++i) {
    Prediction p;
    p.candidate = {{rng.uniform(-0.1, 0.1), rng.uniform(-0.1, 0.1), 0.0}, {0.0, 0.0, 1.0}};
    p.confidence = rng.uniform01();
    p.point_index = i;
    preds.push_back(p);
  }
  std::vector<Prediction> rescaled = preds;
  for (auto& p : rescaled) p.confidence = std::atan(p.confidence) + p.confidence * p.confidence;

  const auto a = nms(preds, 0.02);
  const auto b = nms(rescaled, 0.02);
  ASSERT_EQ(a.size(), b.size());
  for (size_t i = 0; i < a.size(); ++i) EXPECT_EQ(a[i].point_index, b[i].point_index);
}

TEST(AveragePrecision, HandComputedExamples) {
  ApRow all_good = ap_from_scores({1.0, 1.0, 1.0}, 3);
  EXPECT_DOUBLE_EQ(all_good.ap, 100.0);
  EXPECT_DOUBLE_EQ(all_good.ap04, 100.0);
  EXPECT_DOUBLE_EQ(all_good.ap08, 100.0);

  ApRow all_bad = ap_from_scores({0.0, 0.0}, 2);
  EXPECT_DOUBLE_EQ(all_bad.ap, 0.0);
  EXPECT_DOUBLE_EQ(all_bad.ap04, 0.0);
  EXPECT_DOUBLE_EQ(all_bad.ap08, 0.0);

  ApRow mixed = ap_from_scores({0.9, 0.7, 0.5, 0.3}, 4);
  EXPECT_DOUBLE_EQ(mixed.ap04, 75.0);
  EXPECT_DOUBLE_EQ(mixed.ap08, 25.0);
  EXPECT_DOUBLE_EQ(mixed.ap, 62.5);
}

TEST(AveragePrecision, ThresholdAndMonotonicityProperties) {
  Rng rng(7);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<double> scores(10);
    for (auto& s : scores) s = rng.uniform01();
    const ApRow row = ap_from_scores(scores, 10);
    EXPECT_LE(row.ap08, row.ap04);

    std::vector<double> raised = scores;
    for (auto& s : raised) s = clamp01(s + rng.uniform(0.0, 0.3));
    const ApRow up = ap_from_scores(raised, 10);
    EXPECT_GE(up.ap + 1e-12, row.ap);
    EXPECT_GE(up.ap04 + 1e-12, row.ap04);
    EXPECT_GE(up.ap08 + 1e-12, row.ap08);
  }
}

TEST(AveragePrecision, PadFreeSmallSlate) {
  // only 2 predictions survive; divide by the actual count, not k
  const ApRow row = ap_from_scores({0.9, 0.5}, 50);
  EXPECT_EQ(row.evaluated, 2);
  EXPECT_DOUBLE_EQ(row.ap04, 100.0);
  EXPECT_DOUBLE_EQ(row.ap08, 50.0);
}

TEST(Baseline, FlatPlateFullConfidence) {
  const Scene scene = plate_scene();
  const PointCloud cloud = scene_to_cloud(scene);
  const auto preds = normal_std_baseline(cloud, 16);
  ASSERT_EQ(preds.size(), cloud.size());
  for (const auto& p : preds) EXPECT_NEAR(p.confidence, 1.0, 1e-9);
}

TEST(Baseline, EdgePointAcrossPerpendicularFaces) {
  // an edge point whose 16 neighbors split evenly across two faces
  PointCloud cloud;
  cloud.points.push_back({0.0, 0.0, 0.0});
  cloud.normals.push_back({0.0, 0.0, 1.0});
  for (int i = 0; i < 8; ++i) {  // top face neighbors
    cloud.points.push_back({-0.001 * (i + 1), 0.0, 0.0});
    cloud.normals.push_back({0.0, 0.0, 1.0});
  }
  for (int i = 0; i < 8; ++i) {  // side face neighbors
    cloud.points.push_back({0.0, 0.0, -0.001 * (i + 1)});
    cloud.normals.push_back({1.0, 0.0, 0.0});
  }
  const auto preds = normal_std_baseline(cloud, 16);
  EXPECT_NEAR(preds[0].confidence, 0.5, 1e-9);
  EXPECT_LE(preds[0].confidence, 0.5 + 1e-9);
}

TEST(Baseline, MissingNormalsThrows) {
  Rng rng(9);
  PointCloud cloud = testutil::random_cloud(rng, 20);
  EXPECT_THROW(normal_std_baseline(cloud, 8), MissingNormals);
}

// ---------------------------------------------------------------------------
// Online scoring
// ---------------------------------------------------------------------------

TEST(OnlineScore, MatchesAnnotationRows) {
  Scene scene;
  scene.bin = {0.6, 0.6, 0.3};
  scene.camera = CameraModel::top_down_orthographic(0.6, 0.6, 1.0, 96, 96);
  scene.instances.push_back(testutil::resting_box({0.18, 0.14, 0.06}, -0.08, 0.02, 0));
  scene.instances.push_back(testutil::resting_box({0.12, 0.12, 0.1}, 0.12, -0.05, 1));

  const PointCloud cloud = scene_to_cloud(scene);
  const auto rows = annotate_cloud(scene, cloud, 128);

  SceneScorer scorer(scene, cloud);
  for (const auto& r : rows) {
    const double online = scorer.online_score(r.candidate).combined;
    EXPECT_NEAR(online, r.scores.combined, 1e-9) << "point " << r.point_index;
  }
}

TEST(OnlineScore, OffSurfaceIsZero) {
  const Scene scene = plate_scene();
  SceneScorer scorer(scene, scene_to_cloud(scene));
  EXPECT_EQ(scorer.online_score({{0.0, 0.0, 0.06}, {0.0, 0.0, 1.0}}).combined, 0.0);
}

TEST(OnlineScore, LocallyStableOnFlatPlate) {
  const Scene scene = plate_scene();
  SceneScorer scorer(scene, scene_to_cloud(scene));
  const double base = scorer.online_score({{0.0, 0.0, 0.01}, {0.0, 0.0, 1.0}}).combined;
  const double moved = scorer.online_score({{0.0005, 0.0, 0.01}, {0.0, 0.0, 1.0}}).combined;
  EXPECT_LT(std::abs(base - moved), 0.05);
}

TEST(AveragePrecision, FullProtocolOnPlate) {
  const Scene scene = plate_scene(0.2, 0.01, 500.0, 96, 0.4);
  const PointCloud cloud = scene_to_cloud(scene);
  SceneScorer scorer(scene, cloud);
  auto preds = normal_std_baseline(cloud, 16);

  const auto rows = average_precision(preds, scorer, {1, 50}, 0.02);
  ASSERT_EQ(rows.size(), 2u);
  EXPECT_EQ(rows[0].topk, 1);
  EXPECT_EQ(rows[1].topk, 50);
  for (const auto& row : rows) {
    EXPECT_LE(row.ap08, row.ap04);
    EXPECT_GE(row.ap, 0.0);
    EXPECT_LE(row.ap, 100.0);
  }
  // confidence rescaling leaves every AP figure unchanged
  auto rescaled = preds;
  for (auto& p : rescaled) p.confidence = p.confidence * p.confidence * p.confidence + p.confidence;
  const auto rows2 = average_precision(rescaled, scorer, {1, 50}, 0.02);
  for (size_t i = 0; i < rows.size(); ++i) {
    EXPECT_DOUBLE_EQ(rows[i].ap, rows2[i].ap);
    EXPECT_DOUBLE_EQ(rows[i].ap04, rows2[i].ap04);
    EXPECT_DOUBLE_EQ(rows[i].ap08, rows2[i].ap08);
  }

  EXPECT_THROW(average_precision({}, scorer, {1}, 0.02), NoPredictions);
}
