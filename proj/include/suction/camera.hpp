// Camera models. Camera frame: +x right, +y down-image, +z forward (view).
#pragma once

#include <string>

#include "suction/core.hpp"
#include "suction/raycast.hpp"

namespace suction {

struct CameraModel {
  enum class Projection { Pinhole, Orthographic };

  Transform pose;  // camera-to-world
  Projection projection = Projection::Orthographic;
  // pinhole intrinsics
  double fx = 0.0, fy = 0.0, cx = 0.0, cy = 0.0;
  // orthographic view extents, meters
  double ortho_width = 1.0, ortho_height = 1.0;
  int width = 512, height = 512;

  static CameraModel pinhole(const Transform& pose, double fx, double fy, double cx, double cy,
                             int w, int h) {
    CameraModel cam;
    cam.pose = pose;
    cam.projection = Projection::Pinhole;
    cam.fx = fx;
    cam.fy = fy;
    cam.cx = cx;
    cam.cy = cy;
    cam.width = w;
    cam.height = h;
    if (fx <= 0.0 || fy <= 0.0) throw Error("camera: fx, fy must be positive");
    if (w < 1 || h < 1) throw Error("camera: resolution must be >= 1x1");
    return cam;
  }

  static CameraModel orthographic(const Transform& pose, double width_m, double height_m, int w,
                                  int h) {
    CameraModel cam;
    cam.pose = pose;
    cam.projection = Projection::Orthographic;
    cam.ortho_width = width_m;
    cam.ortho_height = height_m;
    cam.width = w;
    cam.height = h;
    if (width_m <= 0.0 || height_m <= 0.0) throw Error("camera: view extents must be positive");
    if (w < 1 || h < 1) throw Error("camera: resolution must be >= 1x1");
    return cam;
  }

  // Top-down camera centered above the origin, world -z as the view axis.
  static CameraModel top_down_orthographic(double width_m, double height_m, double z_height,
                                           int w, int h) {
    Transform pose;
    pose.rotation = Quat{0.0, 1.0, 0.0, 0.0};  // 180 deg about x: z_cam = -z_world
    pose.translation = Vec3{0.0, 0.0, z_height};
    return orthographic(pose, width_m, height_m, w, h);
  }

  // Ray through the center of pixel (px, py). For both projections the stored
  // image depth is the ray parameter t, so point = origin + depth * dir.
  Ray pixel_ray(int px, int py) const {
    const double u = (static_cast<double>(px) + 0.5) / width;
    const double v = (static_cast<double>(py) + 0.5) / height;
    const Vec3 x_axis = pose.rotate({1.0, 0.0, 0.0});
    const Vec3 y_axis = pose.rotate({0.0, 1.0, 0.0});
    const Vec3 z_axis = pose.rotate({0.0, 0.0, 1.0});
    if (projection == Projection::Orthographic) {
      const Vec3 origin = pose.translation + x_axis * ((u - 0.5) * ortho_width) +
                          y_axis * ((v - 0.5) * ortho_height);
      return {origin, z_axis};
    }
    const double dx = (static_cast<double>(px) + 0.5 - cx) / fx;
    const double dy = (static_cast<double>(py) + 0.5 - cy) / fy;
    return {pose.translation, (x_axis * dx + y_axis * dy + z_axis).normalized()};
  }
};

}  // namespace suction
