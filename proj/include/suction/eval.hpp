// Evaluation harness: NMS, top-k online re-scoring, AP at thresholds and the
// normal-deviation baseline.
#pragma once

#include <algorithm>
#include <string>
#include <vector>

#include "suction/normals.hpp"
#include "suction/scoring.hpp"

namespace suction {

struct Prediction {
  SuctionCandidate candidate;
  double confidence = 0.0;
  int point_index = 0;
};

inline constexpr double kApSweep[4] = {0.2, 0.4, 0.6, 0.8};

// Greedy suppression: walk predictions by descending confidence (ties by
// lower point index); accept one iff its contact is farther than `radius`
// from every accepted contact. Output preserves acceptance order.
inline std::vector<Prediction> nms(const std::vector<Prediction>& preds, double radius) {
  if (!(radius > 0.0)) throw OutOfRange("nms: radius must be positive");
  std::vector<Prediction> sorted = preds;
  std::sort(sorted.begin(), sorted.end(), [](const Prediction& a, const Prediction& b) {
    if (a.confidence != b.confidence) return a.confidence > b.confidence;
    return a.point_index < b.point_index;
  });

  std::vector<Prediction> kept;
  const double r2 = radius * radius;
  for (const auto& p : sorted) {
    bool suppressed = false;
    for (const auto& q : kept) {
      if (squared_distance(p.candidate.contact, q.candidate.contact) <= r2) {
        suppressed = true;
        break;
      }
    }
    if (!suppressed) kept.push_back(p);
  }
  return kept;
}

struct ApRow {
  int topk = 0;
  int evaluated = 0;  // min(k, predictions that survived NMS)
  double ap = 0.0;    // percent, mean precision over the 0.2..0.8 sweep
  double ap04 = 0.0;  // percent at threshold 0.4
  double ap08 = 0.0;  // percent at threshold 0.8
};

// Precision figures from the online scores of a top-k slate. A prediction
// counts as correct at threshold mu iff its score strictly exceeds mu.
inline ApRow ap_from_scores(const std::vector<double>& online_scores, int topk) {
  if (topk < 1) throw OutOfRange("average_precision: k must be >= 1");
  ApRow row;
  row.topk = topk;
  row.evaluated = static_cast<int>(online_scores.size());
  if (online_scores.empty()) return row;

  const auto precision = [&](double mu) {
    int hits = 0;
    for (double s : online_scores) hits += (s > mu);
    return 100.0 * hits / static_cast<double>(online_scores.size());
  };
  double sum = 0.0;
  for (double mu : kApSweep) sum += precision(mu);
  row.ap = sum / 4.0;
  row.ap04 = precision(0.4);
  row.ap08 = precision(0.8);
  return row;
}

// Full per-scene protocol: NMS, top-k truncation (scores divided by the
// actual count when fewer remain), online re-scoring through the scorer.
inline std::vector<ApRow> average_precision(const std::vector<Prediction>& preds,
                                            SceneScorer& scorer, const std::vector<int>& topk,
                                            double nms_radius) {
  if (preds.empty()) throw NoPredictions("average_precision: no predictions");
  const std::vector<Prediction> kept = nms(preds, nms_radius);

  int max_k = 0;
  for (int k : topk) max_k = std::max(max_k, k);
  const int budget = std::min<int>(max_k, static_cast<int>(kept.size()));
  std::vector<double> scores(budget);
  for (int i = 0; i < budget; ++i) scores[i] = scorer.online_score(kept[i].candidate).combined;

  std::vector<ApRow> rows;
  rows.reserve(topk.size());
  for (int k : topk) {
    const int count = std::min<int>(k, budget);
    rows.push_back(
        ap_from_scores(std::vector<double>(scores.begin(), scores.begin() + count), k));
  }
  return rows;
}

// Normal STD baseline: candidates at every cloud point with confidence
// 1 - clamp(mean angular deviation of k-neighbor normals / (pi/2), 0, 1).
inline std::vector<Prediction> normal_std_baseline(const PointCloud& cloud, int k) {
  if (!cloud.has_normals()) throw MissingNormals("normal_std_baseline: normals required");
  const KdTree tree(cloud.points);
  std::vector<Prediction> preds(cloud.size());
  for (size_t i = 0; i < cloud.size(); ++i) {
    const double dev = mean_normal_deviation(cloud, tree, static_cast<int>(i), k);
    preds[i].candidate = {cloud.points[i], cloud.normals[i]};
    preds[i].confidence = 1.0 - clamp01(dev / (kPi / 2.0));
    preds[i].point_index = static_cast<int>(i);
  }
  return preds;
}

// ---------------------------------------------------------------------------
// Report assembly
// ---------------------------------------------------------------------------

struct SceneEvalRow {
  std::string scene;
  ApRow row;
};

struct MethodReport {
  std::string method;
  std::vector<SceneEvalRow> per_scene;
  std::vector<ApRow> aggregate;  // one row per top-k, AP figures averaged over scenes
};

inline std::vector<ApRow> aggregate_rows(const std::vector<SceneEvalRow>& per_scene,
                                         const std::vector<int>& topk) {
  std::vector<ApRow> agg;
  for (int k : topk) {
    ApRow row;
    row.topk = k;
    int n = 0;
    for (const auto& s : per_scene) {
      if (s.row.topk != k) continue;
      row.ap += s.row.ap;
      row.ap04 += s.row.ap04;
      row.ap08 += s.row.ap08;
      row.evaluated += s.row.evaluated;
      ++n;
    }
    if (n > 0) {
      row.ap /= n;
      row.ap04 /= n;
      row.ap08 /= n;
    }
    agg.push_back(row);
  }
  return agg;
}

}  // namespace suction
