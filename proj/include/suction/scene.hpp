// Procedural parcel-pile scenes: parcel meshes, mass properties, sequential
// drop-and-settle placement, and conversion to annotated point clouds.
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "suction/camera.hpp"
#include "suction/mesh.hpp"
#include "suction/normals.hpp"
#include "suction/point_cloud.hpp"
#include "suction/raster.hpp"
#include "suction/raycast.hpp"
#include "suction/rng.hpp"

namespace suction {

// ---------------------------------------------------------------------------
// Parcels
// ---------------------------------------------------------------------------

struct ParcelShape {
  enum class Kind { Rectangular, Planar, Cylindrical };
  Kind kind = Kind::Rectangular;
  // Box extents for rectangular/planar; (radius, radius, height) for cylinders.
  Vec3 dims{0.1, 0.1, 0.1};
};

inline constexpr double kDimMin = 0.02, kDimMax = 0.6;
inline constexpr double kPlanarThicknessMin = 0.002, kPlanarThicknessMax = 0.015;
inline constexpr int kCylinderSegments = 32;

inline void validate_shape(const ParcelShape& shape) {
  const auto in = [](double v, double lo, double hi) { return v >= lo && v <= hi; };
  const Vec3& d = shape.dims;
  switch (shape.kind) {
    case ParcelShape::Kind::Rectangular:
      if (!in(d.x, kDimMin, kDimMax) || !in(d.y, kDimMin, kDimMax) || !in(d.z, kDimMin, kDimMax)) {
        throw BadDims("rectangular dims must be in [0.02, 0.6] m");
      }
      break;
    case ParcelShape::Kind::Planar: {
      const double thickness = std::min({d.x, d.y, d.z});
      if (!in(thickness, kPlanarThicknessMin, kPlanarThicknessMax)) {
        throw BadDims("planar thickness must be in [0.002, 0.015] m");
      }
      for (int i = 0; i < 3; ++i) {
        if (d[i] != thickness && !in(d[i], kDimMin, kDimMax)) {
          throw BadDims("planar extents must be in [0.02, 0.6] m");
        }
      }
      break;
    }
    case ParcelShape::Kind::Cylindrical:
      if (std::abs(d.x - d.y) > 1e-12) throw BadDims("cylinder dims must be (r, r, h)");
      if (!in(d.x, kDimMin, kDimMax) || !in(d.z, kDimMin, kDimMax)) {
        throw BadDims("cylinder radius and height must be in [0.02, 0.6] m");
      }
      break;
  }
}

inline TriangleMesh make_box_mesh(double sx, double sy, double sz) {
  const double x = sx / 2.0, y = sy / 2.0, z = sz / 2.0;
  TriangleMesh m;
  m.vertices = {{-x, -y, -z}, {x, -y, -z}, {x, y, -z}, {-x, y, -z},
                {-x, -y, z},  {x, -y, z},  {x, y, z},  {-x, y, z}};
  m.faces = {{0, 2, 1}, {0, 3, 2},   // bottom (-z)
             {4, 5, 6}, {4, 6, 7},   // top (+z)
             {0, 1, 5}, {0, 5, 4},   // -y
             {2, 3, 7}, {2, 7, 6},   // +y
             {3, 0, 4}, {3, 4, 7},   // -x
             {1, 2, 6}, {1, 6, 5}};  // +x
  return m;
}

inline TriangleMesh make_cylinder_mesh(double radius, double height, int segments) {
  TriangleMesh m;
  const double hz = height / 2.0;
  for (int ring = 0; ring < 2; ++ring) {
    const double z = ring == 0 ? -hz : hz;
    for (int i = 0; i < segments; ++i) {
      const double a = 2.0 * kPi * i / segments;
      m.vertices.push_back({radius * std::cos(a), radius * std::sin(a), z});
    }
  }
  const int cb = 2 * segments;      // bottom center
  const int ct = 2 * segments + 1;  // top center
  m.vertices.push_back({0.0, 0.0, -hz});
  m.vertices.push_back({0.0, 0.0, hz});
  for (int i = 0; i < segments; ++i) {
    const int j = (i + 1) % segments;
    const int b0 = i, b1 = j, t0 = segments + i, t1 = segments + j;
    m.faces.push_back({b0, b1, t1});
    m.faces.push_back({b0, t1, t0});
    m.faces.push_back({cb, b1, b0});
    m.faces.push_back({ct, t0, t1});
  }
  return m;
}

// Closed triangle mesh centered at the origin.
inline TriangleMesh make_parcel(const ParcelShape& shape) {
  validate_shape(shape);
  if (shape.kind == ParcelShape::Kind::Cylindrical) {
    return make_cylinder_mesh(shape.dims.x, shape.dims.z, kCylinderSegments);
  }
  return make_box_mesh(shape.dims.x, shape.dims.y, shape.dims.z);
}

// ---------------------------------------------------------------------------
// Mass properties
// ---------------------------------------------------------------------------

struct MassProperties {
  double volume = 0.0;  // m^3
  double mass = 0.0;    // kg
  Vec3 com;             // same frame as the mesh
};

inline MassProperties mass_properties(const TriangleMesh& mesh, double density) {
  const auto [volume, centroid] = signed_volume_centroid(mesh);
  if (volume <= 0.0) throw OpenMesh("mass_properties: signed volume not positive");
  return {volume, density * volume, centroid};
}

// ---------------------------------------------------------------------------
// Scenes
// ---------------------------------------------------------------------------

struct SceneInstance {
  TriangleMesh mesh;  // local frame, centered
  Transform pose;
  double mass = 0.0;
  Vec3 com;  // world frame
  int instance_id = 0;
  double density = 0.0;
};

struct Scene {
  std::vector<SceneInstance> instances;
  Vec3 bin{0.6, 0.6, 0.3};  // inner extents; floor at z = 0, centered in x, y
  CameraModel camera;
  uint64_t seed = 0;
  double friction = 0.0;  // recorded metadata, unused by settling
};

struct ShapeMix {
  double rectangular = 0.5;
  double planar = 0.3;
  double cylindrical = 0.2;
};

struct SceneConfig {
  int n_objects_min = 1;
  int n_objects_max = 50;
  Vec3 bin{0.6, 0.6, 0.3};
  ShapeMix shape_mix;
  double density = 500.0;  // kg/m^3
  double friction_lo = 0.3, friction_hi = 0.9;
  int resolution_x = 512, resolution_y = 512;
};

inline void validate_config(const SceneConfig& c) {
  if (c.n_objects_min < 1 || c.n_objects_max < c.n_objects_min || c.n_objects_max > 50) {
    throw OutOfRange("scene config: object count range must be within [1, 50]");
  }
  if (c.bin.x <= 0.0 || c.bin.y <= 0.0 || c.bin.z <= 0.0) {
    throw OutOfRange("scene config: bin extents must be positive");
  }
  if (c.density <= 0.0) throw OutOfRange("scene config: density must be positive");
  if (c.friction_hi < c.friction_lo) throw OutOfRange("scene config: empty friction range");
  if (c.resolution_x < 1 || c.resolution_y < 1) {
    throw OutOfRange("scene config: resolution must be >= 1x1");
  }
  const double wsum = c.shape_mix.rectangular + c.shape_mix.planar + c.shape_mix.cylindrical;
  if (wsum <= 0.0) throw OutOfRange("scene config: shape mix weights must sum > 0");
}

namespace detail {

// Sampled parcel dimension ranges, meters.
inline constexpr double kRectLo = 0.05, kRectHi = 0.25;
inline constexpr double kPlanarLo = 0.08, kPlanarHi = 0.30;
inline constexpr double kCylRadiusLo = 0.025, kCylRadiusHi = 0.08;
inline constexpr double kCylHeightLo = 0.06, kCylHeightHi = 0.25;

inline ParcelShape sample_shape(Rng& rng, const ShapeMix& mix) {
  const double wsum = mix.rectangular + mix.planar + mix.cylindrical;
  const double u = rng.uniform01() * wsum;
  ParcelShape shape;
  if (u < mix.rectangular) {
    shape.kind = ParcelShape::Kind::Rectangular;
    shape.dims = {rng.uniform(kRectLo, kRectHi), rng.uniform(kRectLo, kRectHi),
                  rng.uniform(kRectLo, kRectHi)};
  } else if (u < mix.rectangular + mix.planar) {
    shape.kind = ParcelShape::Kind::Planar;
    shape.dims = {rng.uniform(kPlanarLo, kPlanarHi), rng.uniform(kPlanarLo, kPlanarHi),
                  rng.uniform(kPlanarThicknessMin, kPlanarThicknessMax)};
  } else {
    shape.kind = ParcelShape::Kind::Cylindrical;
    const double r = rng.uniform(kCylRadiusLo, kCylRadiusHi);
    shape.dims = {r, r, rng.uniform(kCylHeightLo, kCylHeightHi)};
  }
  return shape;
}

inline constexpr int kSupportSamplesX = 16;
inline constexpr int kSupportSamplesY = 8;  // 16 x 8 = 128 samples per footprint
inline constexpr double kSettleLift = 1e-6;

// Distance the posed mesh can descend until its sampled bottom surface first
// touches the placed geometry or the bin floor (z = 0). Negative on failure.
inline double settle_descent(const TriangleMesh& mesh, const Transform& start,
                             const WorldMeshSet& placed) {
  WorldMeshSet self;
  self.add(mesh, start, 0);
  const Aabb box = mesh_aabb(mesh, start);
  const Vec3 up{0.0, 0.0, 1.0};
  const Vec3 down{0.0, 0.0, -1.0};

  double descent = kInf;
  bool any = false;
  for (int iy = 0; iy < kSupportSamplesY; ++iy) {
    for (int ix = 0; ix < kSupportSamplesX; ++ix) {
      const double sx = box.min.x + (ix + 0.5) / kSupportSamplesX * (box.max.x - box.min.x);
      const double sy = box.min.y + (iy + 0.5) / kSupportSamplesY * (box.max.y - box.min.y);
      const Vec3 below{sx, sy, box.min.z - 0.5};
      const auto bottom = self.ray_cast(below, up);
      if (!bottom) continue;  // footprint corner not covered by the object
      any = true;
      const double bz = bottom->point.z;
      const auto support = placed.ray_cast({sx, sy, bz}, down);
      const double gap = support ? support->t : bz;  // fall to the floor when nothing below
      descent = std::min(descent, gap);
    }
  }
  return any ? descent : -1.0;
}

}  // namespace detail

inline CameraModel default_scene_camera(const SceneConfig& config) {
  return CameraModel::top_down_orthographic(config.bin.x, config.bin.y, config.bin.z + 1.0,
                                            config.resolution_x, config.resolution_y);
}

// Deterministic for a given (config, seed). Objects are dropped sequentially:
// sample shape, yaw and (x, y), lower along -z to the first support contact,
// retry (up to 50 attempts) when the settled AABB leaves the bin column.
inline Scene generate_scene(const SceneConfig& config, uint64_t seed) {
  validate_config(config);
  Rng rng(seed);

  Scene scene;
  scene.seed = seed;
  scene.bin = config.bin;
  scene.camera = default_scene_camera(config);
  scene.friction = rng.uniform(config.friction_lo, config.friction_hi);

  const int n_objects =
      static_cast<int>(rng.uniform_int(config.n_objects_min, config.n_objects_max));

  WorldMeshSet placed;
  double top_z = 0.0;
  for (int i = 0; i < n_objects; ++i) {
    bool settled = false;
    for (int attempt = 0; attempt < 50 && !settled; ++attempt) {
      const ParcelShape shape = detail::sample_shape(rng, config.shape_mix);
      const TriangleMesh mesh = make_parcel(shape);
      const Quat yaw = Quat::yaw(rng.uniform(0.0, 2.0 * kPi));

      const Aabb local = mesh_aabb(mesh, Transform{yaw, {0.0, 0.0, 0.0}});
      const double hx = std::max(-local.min.x, local.max.x);
      const double hy = std::max(-local.min.y, local.max.y);
      if (hx > config.bin.x / 2.0 || hy > config.bin.y / 2.0) continue;

      const double x = rng.uniform(-(config.bin.x / 2.0 - hx), config.bin.x / 2.0 - hx);
      const double y = rng.uniform(-(config.bin.y / 2.0 - hy), config.bin.y / 2.0 - hy);
      const double start_z = top_z + 0.5 - local.min.z;  // AABB bottom 0.5 m above the pile
      const Transform start{yaw, {x, y, start_z}};

      const double descent = detail::settle_descent(mesh, start, placed);
      if (descent < 0.0) continue;
      const Transform pose{yaw, {x, y, start_z - descent + detail::kSettleLift}};

      const Aabb world = mesh_aabb(mesh, pose);
      if (world.min.x < -config.bin.x / 2.0 || world.max.x > config.bin.x / 2.0 ||
          world.min.y < -config.bin.y / 2.0 || world.max.y > config.bin.y / 2.0) {
        continue;
      }

      const MassProperties props = mass_properties(mesh, config.density);
      SceneInstance inst;
      inst.mesh = mesh;
      inst.pose = pose;
      inst.mass = props.mass;
      inst.com = pose.apply(props.com);
      inst.instance_id = i;
      inst.density = config.density;
      scene.instances.push_back(std::move(inst));
      placed.add(mesh, pose, i);
      top_z = std::max(top_z, world.max.z);
      settled = true;
    }
    if (!settled) {
      throw PlacementFailed("object " + std::to_string(i) + " could not be placed in 50 attempts");
    }
  }
  return scene;
}

inline WorldMeshSet world_mesh_set(const Scene& scene) {
  WorldMeshSet set;
  for (const auto& inst : scene.instances) set.add(inst.mesh, inst.pose, inst.instance_id);
  return set;
}

// Back-projects every foreground pixel through its depth; instance ids come
// from the label image, normals from k=16 PCA (shrunk for tiny clouds).
inline PointCloud scene_to_cloud(const Scene& scene, const CameraModel& camera) {
  if (scene.instances.empty()) throw EmptyView("scene_to_cloud: empty scene");
  const WorldMeshSet set = world_mesh_set(scene);
  const LabelImage image = rasterize_labels(set, camera);

  PointCloud cloud;
  for (int py = 0; py < image.height; ++py) {
    for (int px = 0; px < image.width; ++px) {
      const int label = image.label_at(px, py);
      if (label == LabelImage::kBackground) continue;
      const Ray ray = camera.pixel_ray(px, py);
      cloud.points.push_back(ray.origin + ray.dir * image.depth_at(px, py));
      cloud.instance_ids.push_back(label);
    }
  }
  if (cloud.empty()) throw EmptyView("scene_to_cloud: no foreground pixels");

  const int k = std::min<int>(16, static_cast<int>(cloud.size()) - 1);
  if (k >= 3) {
    cloud = estimate_normals(cloud, k);
  } else {
    cloud.normals.assign(cloud.size(), Vec3{0.0, 0.0, 1.0});
  }
  return cloud;
}

inline PointCloud scene_to_cloud(const Scene& scene) { return scene_to_cloud(scene, scene.camera); }

}  // namespace suction
