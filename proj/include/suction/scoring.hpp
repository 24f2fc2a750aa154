// Analytic suction scoring: seal, wrench, collision and visibility sub-scores
// and their product, plus whole-scene annotation over FPS-sampled candidates.
#pragma once

#include <map>
#include <vector>

#include "suction/point_cloud.hpp"
#include "suction/raster.hpp"
#include "suction/raycast.hpp"
#include "suction/scene.hpp"

namespace suction {

// ---------------------------------------------------------------------------
// Models
// ---------------------------------------------------------------------------

struct SuctionCupModel {
  double radius = 0.015;  // m
  int n_perimeter = 47;   // perimeter sample count
  double max_gap = 0.01;  // m, projection farther than this from the cup plane fails

  // Perimeter sampling at ~2 mm arc length, clamped to [8, 64].
  static SuctionCupModel for_radius(double r) {
    SuctionCupModel cup;
    cup.radius = r;
    cup.n_perimeter =
        std::clamp(static_cast<int>(std::llround(2.0 * kPi * r / 0.002)), 8, 64);
    return cup;
  }
};

struct GripperModel {
  double body_radius = 0.02;  // m
  double body_height = 0.08;  // m
  double standoff = 0.005;    // m, clearance above the contact where the body begins
};

struct WrenchModel {
  double mu = 0.5;    // friction constant; stored, material condition only is evaluated
  double k = 20.0;    // N*m/m material constant
  double r = 0.015;   // m cup radius
  double v_f = 15.0;  // N suction force; stored, unused
  double g = 9.81;    // m/s^2
  double tau_thr = 0.015 * 20.0 * kPi;  // N*m, = r*k*pi

  static WrenchModel make(double r, double k) {
    WrenchModel wm;
    wm.r = r;
    wm.k = k;
    wm.tau_thr = r * k * kPi;
    return wm;
  }
};

struct SuctionCandidate {
  Vec3 contact;   // t of V = [t, n], meters
  Vec3 approach;  // n, unit, points away from the surface (upward hemisphere)
};

struct ScoreAnnotation {
  double seal = 0.0;
  double wrench = 0.0;
  double collision = 0.0;
  double visibility = 0.0;
  double combined = 0.0;

  static ScoreAnnotation product(double seal, double wrench, double collision,
                                 double visibility) {
    return {seal, wrench, collision, visibility, seal * wrench * collision * visibility};
  }
};

inline constexpr double kContactTolerance = 1e-4;  // m

// ---------------------------------------------------------------------------
// Sub-scores
// ---------------------------------------------------------------------------

// Quasi-static spring seal model: ring vertices of the cup perimeter are
// projected along -n onto the scene; the score is 1 minus the worst relative
// stretch of adjacent perimeter segments. Any perimeter miss or a projection
// gap beyond max_gap fails the seal outright.
inline double seal_score(const WorldMeshSet& scene, const SuctionCandidate& cand,
                         const SuctionCupModel& cup) {
  if (!(cup.radius > 0.0) || cup.n_perimeter < 8) {
    throw OutOfRange("seal_score: cup needs radius > 0 and n_perimeter >= 8");
  }
  const auto sp = scene.nearest_surface(cand.contact);
  if (!(sp.distance < kContactTolerance)) {
    throw ContactOffSurface("seal_score: contact not on a scene surface");
  }

  const Vec3 n = cand.approach.normalized();
  Vec3 t1 = n.cross({1.0, 0.0, 0.0});
  if (t1.norm() < 1e-9) t1 = n.cross({0.0, 1.0, 0.0});
  t1 = t1.normalized();
  const Vec3 t2 = n.cross(t1);

  const int count = cup.n_perimeter;
  std::vector<Vec3> ring(count), projected(count);
  for (int i = 0; i < count; ++i) {
    const double a = 2.0 * kPi * i / count;
    ring[i] = cand.contact + (t1 * std::cos(a) + t2 * std::sin(a)) * cup.radius;
    const Vec3 origin = ring[i] + n * cup.max_gap;
    const auto hit = scene.ray_cast(origin, -n, 1e-9, 2.0 * cup.max_gap);
    if (!hit) return 0.0;  // perimeter overshoots the surface
    projected[i] = hit->point;
  }

  double worst = 0.0;
  for (int i = 0; i < count; ++i) {
    const int j = (i + 1) % count;
    const double l = distance(ring[i], ring[j]);
    const double l_proj = distance(projected[i], projected[j]);
    worst = std::max(worst, std::min(1.0, (l_proj - l) / l));
  }
  return clamp01(1.0 - worst);
}

// Material-condition torque ratio times the approach-angle correction:
// (1 - min(1, |tau_e| / tau_thr)) * (1 - a / pi), where tau_e is the gravity
// torque about the contact orthogonal to the approach axis and a is the angle
// between the approach and the up axis.
inline double wrench_score(const SceneInstance& instance, const SuctionCandidate& cand,
                           const WrenchModel& wm) {
  if (std::abs(wm.tau_thr - wm.r * wm.k * kPi) > 1e-12) {
    throw OutOfRange("wrench_score: tau_thr must equal r*k*pi");
  }
  const Vec3 n = cand.approach.normalized();
  const Vec3 gravity{0.0, 0.0, -instance.mass * wm.g};
  const Vec3 tau = (instance.com - cand.contact).cross(gravity);
  const Vec3 tau_e = tau - n * tau.dot(n);
  const double a = angle_between(n, {0.0, 0.0, 1.0});
  return (1.0 - std::min(1.0, tau_e.norm() / wm.tau_thr)) * (1.0 - a / kPi);
}

// 1.0 iff no scene point of a foreign instance lies inside the gripper body
// cylinder (base at contact + standoff*n, axis n).
inline double collision_score(const PointCloud& cloud, const KdTree& index,
                              const SuctionCandidate& cand, const GripperModel& grip,
                              int target_id) {
  if (!cloud.has_instance_ids()) {
    throw Error("collision_score: cloud must carry instance ids");
  }
  const Vec3 n = cand.approach.normalized();
  const Vec3 base = cand.contact + n * grip.standoff;
  const double reach = grip.standoff + grip.body_height + grip.body_radius;
  const double r2 = grip.body_radius * grip.body_radius;
  for (int idx : index.radius_query(cand.contact, reach)) {
    if (cloud.instance_ids[idx] == target_id) continue;
    const Vec3 d = cloud.points[idx] - base;
    const double z = d.dot(n);
    if (z < 0.0 || z > grip.body_height) continue;
    if ((d - n * z).squared_norm() <= r2) return 0.0;
  }
  return 1.0;
}

inline size_t find_instance_index(const Scene& scene, int instance_id) {
  for (size_t i = 0; i < scene.instances.size(); ++i) {
    if (scene.instances[i].instance_id == instance_id) return i;
  }
  throw OutOfRange("instance " + std::to_string(instance_id) + " not in scene");
}

// Visible-pixel fraction of the target under occlusion: pixels of the target
// in the full scene render over pixels when rendered alone.
inline double visibility_score(const Scene& scene, int instance_id) {
  const size_t idx = find_instance_index(scene, instance_id);
  const LabelImage full = rasterize_labels(world_mesh_set(scene), scene.camera);

  WorldMeshSet solo;
  solo.add(scene.instances[idx].mesh, scene.instances[idx].pose, instance_id);
  const LabelImage alone = rasterize_labels(solo, scene.camera);

  const size_t p_solo = alone.count_pixels(instance_id);
  if (p_solo == 0) throw DegenerateView("visibility_score: solo render has zero pixels");
  const size_t p_full = full.count_pixels(instance_id);
  return static_cast<double>(p_full) / static_cast<double>(p_solo);
}

// ---------------------------------------------------------------------------
// SceneScorer: shared context for bulk scoring. Caches the world mesh set,
// the cloud index, the full-scene label image and per-instance visibility.
// Not thread-safe; use one scorer per thread.
// ---------------------------------------------------------------------------

class SceneScorer {
 public:
  SceneScorer(const Scene& scene, PointCloud cloud, SuctionCupModel cup = {},
              GripperModel grip = {}, WrenchModel wm = {})
      : scene_(scene), cloud_(std::move(cloud)), cup_(cup), grip_(grip), wm_(wm),
        meshes_(world_mesh_set(scene)), index_(cloud_.points) {}

  const PointCloud& cloud() const { return cloud_; }
  const WorldMeshSet& meshes() const { return meshes_; }
  const KdTree& index() const { return index_; }

  double visibility(int instance_id) {
    auto it = visibility_.find(instance_id);
    if (it != visibility_.end()) return it->second;
    const double v = visibility_score(scene_, instance_id);
    visibility_.emplace(instance_id, v);
    return v;
  }

  // Sub-scores for a candidate attached to a known instance. Failing
  // sub-scores are recorded as 0 (making the product 0) rather than thrown.
  ScoreAnnotation score(const SuctionCandidate& cand, int instance_id) {
    double seal = 0.0, wrench = 0.0, collision = 0.0, vis = 0.0;
    try {
      seal = seal_score(meshes_, cand, cup_);
    } catch (const Error&) {
    }
    try {
      wrench = wrench_score(scene_.instances[find_instance_index(scene_, instance_id)], cand, wm_);
    } catch (const Error&) {
    }
    try {
      collision = collision_score(cloud_, index_, cand, grip_, instance_id);
    } catch (const Error&) {
    }
    try {
      vis = visibility(instance_id);
    } catch (const Error&) {
    }
    return ScoreAnnotation::product(seal, wrench, collision, vis);
  }

  // Online evaluation of an arbitrary predicted pose: the instance is the
  // nearest surface; candidates off every surface score 0.
  ScoreAnnotation online_score(const SuctionCandidate& cand) {
    const auto sp = meshes_.nearest_surface(cand.contact);
    if (!(sp.distance < kContactTolerance)) return {};
    return score(cand, sp.instance);
  }

 private:
  const Scene& scene_;
  PointCloud cloud_;
  SuctionCupModel cup_;
  GripperModel grip_;
  WrenchModel wm_;
  WorldMeshSet meshes_;
  KdTree index_;
  std::map<int, double> visibility_;
};

// ---------------------------------------------------------------------------
// Whole-scene annotation
// ---------------------------------------------------------------------------

struct AnnotationRow {
  int point_index = 0;
  SuctionCandidate candidate;
  ScoreAnnotation scores;
};

// Annotates FPS-sampled candidates of a precomputed scene cloud. Rows are
// ordered by point index.
inline std::vector<AnnotationRow> annotate_cloud(const Scene& scene, const PointCloud& cloud,
                                                 int n_points, const SuctionCupModel& cup = {},
                                                 const GripperModel& grip = {},
                                                 const WrenchModel& wm = {}) {
  if (cloud.empty()) throw EmptyView("annotate: empty scene cloud");
  if (!cloud.has_normals() || !cloud.has_instance_ids()) {
    throw Error("annotate: cloud must carry normals and instance ids");
  }
  const int m = std::min<int>(n_points, static_cast<int>(cloud.size()));
  std::vector<int> indices = farthest_point_sample(cloud, m, 0);
  std::sort(indices.begin(), indices.end());

  SceneScorer scorer(scene, cloud, cup, grip, wm);
  std::vector<AnnotationRow> rows;
  rows.reserve(indices.size());
  for (int idx : indices) {
    AnnotationRow row;
    row.point_index = idx;
    row.candidate = {cloud.points[idx], cloud.normals[idx]};
    if (row.candidate.approach.z < 0.0) {
      rows.push_back(row);  // downward approach: all sub-scores stay 0
      continue;
    }
    row.scores = scorer.score(row.candidate, cloud.instance_ids[idx]);
    rows.push_back(row);
  }
  return rows;
}

inline std::vector<AnnotationRow> annotate_scene(const Scene& scene, int n_points,
                                                 const SuctionCupModel& cup = {},
                                                 const GripperModel& grip = {},
                                                 const WrenchModel& wm = {}) {
  return annotate_cloud(scene, scene_to_cloud(scene), n_points, cup, grip, wm);
}

}  // namespace suction
