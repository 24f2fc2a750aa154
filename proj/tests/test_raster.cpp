#include <gtest/gtest.h>

#include "test_helpers.hpp"

using namespace suction;

TEST(Raster, EmptySceneAllBackground) {
  const CameraModel cam = CameraModel::top_down_orthographic(1.0, 1.0, 2.0, 32, 32);
  const LabelImage img = rasterize_labels(WorldMeshSet{}, cam);
  for (int label : img.labels) EXPECT_EQ(label, LabelImage::kBackground);
  for (double d : img.depth) EXPECT_TRUE(std::isinf(d));
}

TEST(Raster, HalfViewBoxPixelCount) {
  const int w = 64, h = 64;
  const CameraModel cam = CameraModel::top_down_orthographic(1.0, 1.0, 2.0, w, h);
  // box spans x in [-0.5, 0], the left half of the 1 m view
  WorldMeshSet set;
  set.add(make_box_mesh(0.5, 1.0, 0.1), Transform{Quat{}, {-0.25, 0.0, 0.05}}, 0);
  const LabelImage img = rasterize_labels(set, cam);
  const double count = static_cast<double>(img.count_pixels(0));
  EXPECT_NEAR(count, w * h / 2.0, w);
}

TEST(Raster, FullOcclusionLeavesZeroPixels) {
  const CameraModel cam = CameraModel::top_down_orthographic(1.0, 1.0, 2.0, 64, 64);
  WorldMeshSet set;
  set.add(make_box_mesh(0.3, 0.3, 0.1), Transform{Quat{}, {0.0, 0.0, 0.05}}, 0);   // below
  set.add(make_box_mesh(0.3, 0.3, 0.1), Transform{Quat{}, {0.0, 0.0, 0.151}}, 1);  // on top
  const LabelImage img = rasterize_labels(set, cam);
  EXPECT_EQ(img.count_pixels(0), 0u);
  EXPECT_GT(img.count_pixels(1), 0u);
}

TEST(Raster, DepthIsRayParameter) {
  const CameraModel cam = CameraModel::top_down_orthographic(1.0, 1.0, 2.0, 16, 16);
  WorldMeshSet set;
  set.add(make_box_mesh(1.0, 1.0, 0.2), Transform{Quat{}, {0.0, 0.0, 0.1}}, 0);
  const LabelImage img = rasterize_labels(set, cam);
  for (int py = 0; py < 16; ++py) {
    for (int px = 0; px < 16; ++px) {
      ASSERT_EQ(img.label_at(px, py), 0);
      const Ray ray = cam.pixel_ray(px, py);
      const Vec3 p = ray.origin + ray.dir * img.depth_at(px, py);
      EXPECT_NEAR(p.z, 0.2, 1e-9);  // top face
    }
  }
}

TEST(Raster, PinholeProjectedArea) {
  // camera at origin looking along +z with identity pose
  const CameraModel cam = CameraModel::pinhole(Transform::identity(), 64, 64, 32, 32, 64, 64);
  WorldMeshSet set;
  // unit square at z = 2: projected half-width = fx * 0.5 / 2 = 16 px
  TriangleMesh square;
  square.vertices = {{-0.5, -0.5, 2.0}, {0.5, -0.5, 2.0}, {0.5, 0.5, 2.0}, {-0.5, 0.5, 2.0}};
  square.faces = {{0, 1, 2}, {0, 2, 3}};
  set.add(square, Transform::identity(), 0);
  const LabelImage img = rasterize_labels(set, cam);
  EXPECT_NEAR(static_cast<double>(img.count_pixels(0)), 32.0 * 32.0, 64.0);

  // depth at the central pixel is the euclidean distance along the ray
  const Ray ray = cam.pixel_ray(32, 32);
  const Vec3 p = ray.origin + ray.dir * img.depth_at(32, 32);
  EXPECT_NEAR(p.z, 2.0, 1e-9);
}

TEST(Raster, OccluderNeverIncreasesVisibleCounts) {
  Rng rng(61);
  for (int trial = 0; trial < 5; ++trial) {
    SceneConfig cfg;
    cfg.n_objects_min = 3;
    cfg.n_objects_max = 6;
    cfg.resolution_x = cfg.resolution_y = 96;
    Scene scene = generate_scene(cfg, 100 + trial);

    const LabelImage before = rasterize_labels(world_mesh_set(scene), scene.camera);

    // drop one more box on top of the pile
    Aabb pile;
    for (const auto& inst : scene.instances) pile.expand(mesh_aabb(inst.mesh, inst.pose));
    scene.instances.push_back(testutil::make_box_instance(
        {0.2, 0.2, 0.05},
        Transform{Quat::yaw(rng.uniform(0, kPi)),
                  {rng.uniform(-0.1, 0.1), rng.uniform(-0.1, 0.1), pile.max.z + 0.05}},
        99));
    const LabelImage after = rasterize_labels(world_mesh_set(scene), scene.camera);

    for (size_t i = 0; i + 1 < scene.instances.size(); ++i) {
      const int id = scene.instances[i].instance_id;
      EXPECT_LE(after.count_pixels(id), before.count_pixels(id)) << "instance " << id;
    }
  }
}
