// PCA normal estimation over k-nearest neighborhoods.
#pragma once

#include <Eigen/Core>
#include <Eigen/Eigenvalues>
#include <optional>
#include <vector>

#include "suction/point_cloud.hpp"

namespace suction {

struct LocalPca {
  Vec3 normal;                 // least-eigenvalue eigenvector, unit
  double eigenvalues[3] = {};  // ascending
  // False when the covariance is degenerate (two near-zero eigenvalues:
  // collinear or coincident points) and the normal direction is meaningless.
  bool normal_valid = false;
};

inline LocalPca local_pca(const std::vector<Vec3>& points,
                          const std::vector<int>& neighborhood) {
  LocalPca out;
  if (neighborhood.size() < 3) return out;
  Vec3 mean{0.0, 0.0, 0.0};
  for (int idx : neighborhood) mean += points[idx];
  mean = mean / static_cast<double>(neighborhood.size());

  Eigen::Matrix3d cov = Eigen::Matrix3d::Zero();
  for (int idx : neighborhood) {
    const Vec3 d = points[idx] - mean;
    const Eigen::Vector3d v(d.x, d.y, d.z);
    cov += v * v.transpose();
  }
  cov /= static_cast<double>(neighborhood.size());

  Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> solver(cov);
  if (solver.info() != Eigen::Success) return out;
  const Eigen::Vector3d evs = solver.eigenvalues();  // ascending
  for (int i = 0; i < 3; ++i) out.eigenvalues[i] = std::max(0.0, evs[i]);

  const Eigen::Vector3d n = solver.eigenvectors().col(0);
  out.normal = Vec3{n.x(), n.y(), n.z()}.normalized();
  out.normal_valid = evs[1] > 1e-12 * std::max(evs[2], 1e-30);
  return out;
}

// Orient toward +z; ties (n.z == 0) toward +x then +y.
inline Vec3 orient_up(const Vec3& n) {
  if (n.z > 0.0) return n;
  if (n.z < 0.0) return -n;
  if (n.x > 0.0) return n;
  if (n.x < 0.0) return -n;
  return n.y >= 0.0 ? n : -n;
}

// Per-point normals from the covariance of the point and its k nearest
// neighbors. Degenerate neighborhoods fall back to +z.
inline PointCloud estimate_normals(const PointCloud& cloud, int k, const KdTree* index = nullptr) {
  if (k < 3) throw OutOfRange("estimate_normals: k must be >= 3");
  if (cloud.size() <= static_cast<size_t>(k)) {
    throw TooFewPoints("estimate_normals: need more than k points");
  }
  KdTree local;
  if (!index) {
    local.build(cloud.points);
    index = &local;
  }

  PointCloud out = cloud;
  out.normals.resize(cloud.size());
  for (size_t i = 0; i < cloud.size(); ++i) {
    std::vector<int> hood = index->k_nearest(cloud.points[i], k, static_cast<int>(i));
    hood.push_back(static_cast<int>(i));
    const LocalPca pca = local_pca(cloud.points, hood);
    out.normals[i] = pca.normal_valid ? orient_up(pca.normal) : Vec3{0.0, 0.0, 1.0};
  }
  return out;
}

// Mean angular deviation (radians) between the normal at `i` and its k
// neighbors' normals. Shared by the condition features and the normal-std
// baseline.
inline double mean_normal_deviation(const PointCloud& cloud, const KdTree& index, int i, int k) {
  const std::vector<int> hood = index.k_nearest(cloud.points[i], k, i);
  if (hood.empty()) return 0.0;
  double sum = 0.0;
  for (int j : hood) sum += angle_between(cloud.normals[i], cloud.normals[j]);
  return sum / static_cast<double>(hood.size());
}

}  // namespace suction
