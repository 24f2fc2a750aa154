// Watertight ray casting against sets of posed triangle meshes, plus
// closest-point-on-surface queries.
#pragma once

#include <optional>
#include <vector>

#include "suction/mesh.hpp"

namespace suction {

struct Ray {
  Vec3 origin;
  Vec3 dir;  // unit
};

struct RayHit {
  double t = kInf;
  int instance = -1;
  Vec3 point;
};

// Precomputed ray constants for the watertight intersection test
// (Woop, Benthin, Wald: "Watertight Ray/Triangle Intersection").
struct WatertightRay {
  Vec3 origin;
  int kx = 0, ky = 1, kz = 2;
  double sx = 0.0, sy = 0.0, sz = 0.0;

  WatertightRay(const Vec3& o, const Vec3& d) : origin(o) {
    kz = 0;
    if (std::abs(d.y) > std::abs(d[kz])) kz = 1;
    if (std::abs(d.z) > std::abs(d[kz])) kz = 2;
    kx = (kz + 1) % 3;
    ky = (kz + 2) % 3;
    if (d[kz] < 0.0) std::swap(kx, ky);
    sx = d[kx] / d[kz];
    sy = d[ky] / d[kz];
    sz = 1.0 / d[kz];
  }
};

// Returns the ray parameter t of the intersection, or nullopt.
inline std::optional<double> intersect_triangle(const WatertightRay& ray, const Vec3& a,
                                                const Vec3& b, const Vec3& c, double t_min,
                                                double t_max) {
  const Vec3 A = a - ray.origin;
  const Vec3 B = b - ray.origin;
  const Vec3 C = c - ray.origin;

  const double ax = A[ray.kx] - ray.sx * A[ray.kz];
  const double ay = A[ray.ky] - ray.sy * A[ray.kz];
  const double bx = B[ray.kx] - ray.sx * B[ray.kz];
  const double by = B[ray.ky] - ray.sy * B[ray.kz];
  const double cx = C[ray.kx] - ray.sx * C[ray.kz];
  const double cy = C[ray.ky] - ray.sy * C[ray.kz];

  double u = cx * by - cy * bx;
  double v = ax * cy - ay * cx;
  double w = bx * ay - by * ax;

  if ((u < 0.0 || v < 0.0 || w < 0.0) && (u > 0.0 || v > 0.0 || w > 0.0)) return std::nullopt;
  double det = u + v + w;
  if (det == 0.0) return std::nullopt;

  const double az = ray.sz * A[ray.kz];
  const double bz = ray.sz * B[ray.kz];
  const double cz = ray.sz * C[ray.kz];
  double t_scaled = u * az + v * bz + w * cz;
  if (det < 0.0) {
    det = -det;
    t_scaled = -t_scaled;
  }
  if (t_scaled < t_min * det || t_scaled > t_max * det) return std::nullopt;
  return t_scaled / det;
}

inline bool ray_hits_aabb(const Vec3& origin, const Vec3& inv_dir, const Aabb& box, double t_min,
                          double t_max) {
  for (int i = 0; i < 3; ++i) {
    if (std::isinf(inv_dir[i])) {  // ray parallel to this slab
      if (origin[i] < box.min[i] || origin[i] > box.max[i]) return false;
      continue;
    }
    double t0 = (box.min[i] - origin[i]) * inv_dir[i];
    double t1 = (box.max[i] - origin[i]) * inv_dir[i];
    if (t0 > t1) std::swap(t0, t1);
    t_min = std::max(t_min, t0);
    t_max = std::min(t_max, t1);
    if (t_min > t_max) return false;
  }
  return true;
}

// ---------------------------------------------------------------------------
// World-space triangle soup grouped per instance, with per-instance AABBs for
// culling. Immutable after the last add().
// ---------------------------------------------------------------------------

class WorldMeshSet {
 public:
  void add(const TriangleMesh& mesh, const Transform& pose, int instance_id) {
    Range r;
    r.begin = static_cast<int>(tris_.size());
    Aabb box;
    for (const auto& f : mesh.faces) {
      Tri t{pose.apply(mesh.vertices[f[0]]), pose.apply(mesh.vertices[f[1]]),
            pose.apply(mesh.vertices[f[2]])};
      box.expand(t.a);
      box.expand(t.b);
      box.expand(t.c);
      tris_.push_back(t);
    }
    r.end = static_cast<int>(tris_.size());
    r.instance = instance_id;
    r.box = box;
    ranges_.push_back(r);
  }

  bool empty() const { return tris_.empty(); }
  size_t instance_count() const { return ranges_.size(); }

  template <class Fn>
  void for_each_triangle(Fn&& fn) const {
    for (const auto& r : ranges_) {
      for (int i = r.begin; i < r.end; ++i) {
        fn(tris_[i].a, tris_[i].b, tris_[i].c, r.instance);
      }
    }
  }

  std::optional<RayHit> ray_cast(const Vec3& origin, const Vec3& dir, double t_min = 1e-9,
                                 double t_max = kInf) const {
    const WatertightRay wray(origin, dir);
    const Vec3 inv_dir{1.0 / dir.x, 1.0 / dir.y, 1.0 / dir.z};
    RayHit best;
    for (const auto& r : ranges_) {
      if (!ray_hits_aabb(origin, inv_dir, r.box, t_min, std::min(t_max, best.t))) continue;
      for (int i = r.begin; i < r.end; ++i) {
        const Tri& tri = tris_[i];
        const auto t = intersect_triangle(wray, tri.a, tri.b, tri.c, t_min,
                                          std::min(t_max, best.t));
        if (t && *t < best.t) {
          best.t = *t;
          best.instance = r.instance;
        }
      }
    }
    if (best.instance < 0) return std::nullopt;
    best.point = origin + dir * best.t;
    return best;
  }

  struct SurfacePoint {
    double distance = kInf;
    int instance = -1;
    Vec3 point;
  };

  // Closest point on any triangle; instances culled by AABB distance.
  SurfacePoint nearest_surface(const Vec3& p) const {
    SurfacePoint best;
    for (const auto& r : ranges_) {
      if (r.box.squared_distance(p) >= best.distance * best.distance) continue;
      for (int i = r.begin; i < r.end; ++i) {
        const Tri& tri = tris_[i];
        const Vec3 q = closest_point_on_triangle(p, tri.a, tri.b, tri.c);
        const double d = distance(p, q);
        if (d < best.distance) {
          best.distance = d;
          best.instance = r.instance;
          best.point = q;
        }
      }
    }
    return best;
  }

  static Vec3 closest_point_on_triangle(const Vec3& p, const Vec3& a, const Vec3& b,
                                        const Vec3& c) {
    const Vec3 ab = b - a, ac = c - a, ap = p - a;
    const double d1 = ab.dot(ap), d2 = ac.dot(ap);
    if (d1 <= 0.0 && d2 <= 0.0) return a;

    const Vec3 bp = p - b;
    const double d3 = ab.dot(bp), d4 = ac.dot(bp);
    if (d3 >= 0.0 && d4 <= d3) return b;

    const double vc = d1 * d4 - d3 * d2;
    if (vc <= 0.0 && d1 >= 0.0 && d3 <= 0.0) return a + ab * (d1 / (d1 - d3));

    const Vec3 cp = p - c;
    const double d5 = ab.dot(cp), d6 = ac.dot(cp);
    if (d6 >= 0.0 && d5 <= d6) return c;

    const double vb = d5 * d2 - d1 * d6;
    if (vb <= 0.0 && d2 >= 0.0 && d6 <= 0.0) return a + ac * (d2 / (d2 - d6));

    const double va = d3 * d6 - d5 * d4;
    if (va <= 0.0 && (d4 - d3) >= 0.0 && (d5 - d6) >= 0.0) {
      const double w = (d4 - d3) / ((d4 - d3) + (d5 - d6));
      return b + (c - b) * w;
    }

    const double denom = 1.0 / (va + vb + vc);
    return a + ab * (vb * denom) + ac * (vc * denom);
  }

 private:
  struct Tri {
    Vec3 a, b, c;
  };
  struct Range {
    int begin = 0, end = 0;
    int instance = -1;
    Aabb box;
  };

  std::vector<Tri> tris_;
  std::vector<Range> ranges_;
};

// One-shot cast against posed meshes; nearest hit with t >= 1e-9.
inline std::optional<RayHit> ray_cast(
    const std::vector<std::pair<const TriangleMesh*, Transform>>& meshes, const Vec3& origin,
    const Vec3& dir) {
  WorldMeshSet set;
  int id = 0;
  for (const auto& [mesh, pose] : meshes) set.add(*mesh, pose, id++);
  return set.ray_cast(origin, dir);
}

}  // namespace suction
