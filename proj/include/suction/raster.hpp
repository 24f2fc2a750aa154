// Software z-buffer rasterizer producing per-pixel instance labels and depth.
#pragma once

#include <vector>

#include "suction/camera.hpp"
#include "suction/mesh.hpp"
#include "suction/raycast.hpp"

namespace suction {

struct LabelImage {
  static constexpr int kBackground = -1;

  int width = 0, height = 0;
  std::vector<int> labels;    // row-major, kBackground where empty
  std::vector<double> depth;  // ray parameter t; +inf where empty

  LabelImage() = default;
  LabelImage(int w, int h)
      : width(w), height(h), labels(static_cast<size_t>(w) * h, kBackground),
        depth(static_cast<size_t>(w) * h, kInf) {}

  int label_at(int x, int y) const { return labels[static_cast<size_t>(y) * width + x]; }
  double depth_at(int x, int y) const { return depth[static_cast<size_t>(y) * width + x]; }

  size_t count_pixels(int instance_id) const {
    size_t n = 0;
    for (int l : labels) n += (l == instance_id);
    return n;
  }
};

namespace detail {

struct ScreenVertex {
  double x, y;   // pixel coordinates
  double z;      // camera-space depth along the view axis
};

inline double edge_function(const ScreenVertex& a, const ScreenVertex& b, double px, double py) {
  return (b.x - a.x) * (py - a.y) - (b.y - a.y) * (px - a.x);
}

}  // namespace detail

// Per-pixel nearest-surface instance ids via z-buffer over all triangles.
// Pixel centers only; depth is the distance along the pixel ray (pinhole) or
// along the view axis (orthographic), i.e. the pixel_ray() parameter.
inline LabelImage rasterize_labels(const WorldMeshSet& meshes, const CameraModel& camera) {
  LabelImage image(camera.width, camera.height);
  const Transform world_to_cam = camera.pose.inverse();
  const bool ortho = camera.projection == CameraModel::Projection::Orthographic;
  const int w = camera.width, h = camera.height;

  meshes.for_each_triangle([&](const Vec3& wa, const Vec3& wb, const Vec3& wc, int instance) {
    const Vec3 ca = world_to_cam.apply(wa);
    const Vec3 cb = world_to_cam.apply(wb);
    const Vec3 cc = world_to_cam.apply(wc);
    if (ca.z <= 1e-12 || cb.z <= 1e-12 || cc.z <= 1e-12) return;  // behind camera: skip

    detail::ScreenVertex v[3];
    const Vec3 cam[3] = {ca, cb, cc};
    for (int i = 0; i < 3; ++i) {
      if (ortho) {
        v[i].x = (cam[i].x / camera.ortho_width + 0.5) * w;
        v[i].y = (cam[i].y / camera.ortho_height + 0.5) * h;
      } else {
        v[i].x = camera.fx * cam[i].x / cam[i].z + camera.cx;
        v[i].y = camera.fy * cam[i].y / cam[i].z + camera.cy;
      }
      v[i].z = cam[i].z;
    }

    double area2 = detail::edge_function(v[0], v[1], v[2].x, v[2].y);
    if (area2 == 0.0) return;  // edge-on
    if (area2 < 0.0) {
      std::swap(v[1], v[2]);
      area2 = -area2;
    }

    const double min_x = std::min({v[0].x, v[1].x, v[2].x});
    const double max_x = std::max({v[0].x, v[1].x, v[2].x});
    const double min_y = std::min({v[0].y, v[1].y, v[2].y});
    const double max_y = std::max({v[0].y, v[1].y, v[2].y});
    const int px_lo = std::max(0, static_cast<int>(std::ceil(min_x - 0.5)));
    const int px_hi = std::min(w - 1, static_cast<int>(std::floor(max_x - 0.5)));
    const int py_lo = std::max(0, static_cast<int>(std::ceil(min_y - 0.5)));
    const int py_hi = std::min(h - 1, static_cast<int>(std::floor(max_y - 0.5)));

    for (int py = py_lo; py <= py_hi; ++py) {
      const double sy = py + 0.5;
      for (int px = px_lo; px <= px_hi; ++px) {
        const double sx = px + 0.5;
        const double e0 = detail::edge_function(v[1], v[2], sx, sy);
        const double e1 = detail::edge_function(v[2], v[0], sx, sy);
        const double e2 = detail::edge_function(v[0], v[1], sx, sy);
        if (e0 < 0.0 || e1 < 0.0 || e2 < 0.0) continue;
        const double l0 = e0 / area2, l1 = e1 / area2, l2 = e2 / area2;

        double z;
        if (ortho) {
          z = l0 * v[0].z + l1 * v[1].z + l2 * v[2].z;
        } else {
          z = 1.0 / (l0 / v[0].z + l1 / v[1].z + l2 / v[2].z);  // perspective-correct
        }

        double t = z;
        if (!ortho) {
          const double dx = (sx - camera.cx) / camera.fx;
          const double dy = (sy - camera.cy) / camera.fy;
          t = z * std::sqrt(dx * dx + dy * dy + 1.0);  // distance along the pixel ray
        }

        const size_t idx = static_cast<size_t>(py) * w + px;
        if (t < image.depth[idx]) {
          image.depth[idx] = t;
          image.labels[idx] = instance;
        }
      }
    }
  });

  return image;
}

}  // namespace suction
