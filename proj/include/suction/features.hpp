// Hand-crafted per-point condition features guiding the denoiser. Stands in
// for a learned point-cloud encoder behind the same N_p x N_f interface.
#pragma once

#include <numeric>
#include <vector>

#include "suction/normals.hpp"
#include "suction/point_cloud.hpp"

namespace suction {

struct ConditionFeatures {
  static constexpr int kCount = 8;

  size_t rows = 0;
  std::vector<double> data;  // row-major rows x kCount

  const double* row(size_t i) const { return data.data() + i * kCount; }
  double at(size_t i, int f) const { return data[i * kCount + f]; }
};

// Features per point:
//   0  n_z
//   1  angle(n, +z) / pi
//   2  planarity: 1 - lambda_min / (lambda_1 + lambda_2 + lambda_3), k=16 PCA
//   3  mean angular deviation to neighbor normals / (pi/2), clamped to [0, 1]
//   4  height above scene min-z, normalized by the z extent
//   5  distance to the cloud centroid, normalized by the cloud radius
//   6  local density rank in [0, 1] (0 = densest, by k-th neighbor distance)
//   7  constant 1 bias
inline ConditionFeatures condition_features(const PointCloud& cloud) {
  if (!cloud.has_normals()) throw MissingNormals("condition_features: normals required");
  const size_t n = cloud.size();
  const KdTree tree(cloud.points);
  const int k = std::min<int>(16, static_cast<int>(n) - 1);

  double z_min = kInf, z_max = -kInf;
  Vec3 centroid{0.0, 0.0, 0.0};
  for (const auto& p : cloud.points) {
    z_min = std::min(z_min, p.z);
    z_max = std::max(z_max, p.z);
    centroid += p;
  }
  centroid = centroid / static_cast<double>(n);
  const double z_extent = z_max - z_min;
  double cloud_radius = 0.0;
  for (const auto& p : cloud.points) cloud_radius = std::max(cloud_radius, distance(p, centroid));

  // k-th neighbor distance as a density proxy, then rank points by it.
  std::vector<double> kth_dist(n, 0.0);
  std::vector<std::vector<int>> hoods(n);
  for (size_t i = 0; i < n; ++i) {
    hoods[i] = k >= 1 ? tree.k_nearest(cloud.points[i], k, static_cast<int>(i))
                      : std::vector<int>{};
    if (!hoods[i].empty()) {
      kth_dist[i] = distance(cloud.points[i], cloud.points[hoods[i].back()]);
    }
  }
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    return kth_dist[a] < kth_dist[b] || (kth_dist[a] == kth_dist[b] && a < b);
  });
  std::vector<double> density_rank(n, 0.0);
  for (size_t pos = 0; pos < n; ++pos) {
    density_rank[order[pos]] = n > 1 ? static_cast<double>(pos) / (n - 1) : 0.0;
  }

  ConditionFeatures feats;
  feats.rows = n;
  feats.data.resize(n * ConditionFeatures::kCount);
  for (size_t i = 0; i < n; ++i) {
    double* f = feats.data.data() + i * ConditionFeatures::kCount;
    const Vec3& normal = cloud.normals[i];

    f[0] = normal.z;
    f[1] = angle_between(normal, {0.0, 0.0, 1.0}) / kPi;

    std::vector<int> hood = hoods[i];
    hood.push_back(static_cast<int>(i));
    const LocalPca pca = local_pca(cloud.points, hood);
    const double ev_sum = pca.eigenvalues[0] + pca.eigenvalues[1] + pca.eigenvalues[2];
    f[2] = 1.0 - pca.eigenvalues[0] / std::max(ev_sum, 1e-300);

    double dev = 0.0;
    for (int j : hoods[i]) dev += angle_between(normal, cloud.normals[j]);
    dev = hoods[i].empty() ? 0.0 : dev / static_cast<double>(hoods[i].size());
    f[3] = clamp01(dev / (kPi / 2.0));

    f[4] = z_extent > 0.0 ? (cloud.points[i].z - z_min) / z_extent : 0.0;
    f[5] = cloud_radius > 0.0 ? distance(cloud.points[i], centroid) / cloud_radius : 0.0;
    f[6] = density_rank[i];
    f[7] = 1.0;
  }
  return feats;
}

}  // namespace suction
