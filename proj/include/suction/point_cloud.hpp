// Point clouds and an exact kd-tree index (radius and kNN queries return
// precisely the brute-force result sets).
#pragma once

#include <algorithm>
#include <cstdint>
#include <queue>
#include <vector>

#include "suction/core.hpp"

namespace suction {

struct PointCloud {
  std::vector<Vec3> points;
  std::vector<Vec3> normals;     // empty or one unit normal per point
  std::vector<int> instance_ids; // empty or one id per point

  size_t size() const { return points.size(); }
  bool empty() const { return points.empty(); }
  bool has_normals() const { return !points.empty() && normals.size() == points.size(); }
  bool has_instance_ids() const {
    return !points.empty() && instance_ids.size() == points.size();
  }
};

inline void validate_cloud(const PointCloud& cloud) {
  if (!cloud.normals.empty() && cloud.normals.size() != cloud.points.size()) {
    throw Error("cloud normals length mismatch");
  }
  if (!cloud.instance_ids.empty() && cloud.instance_ids.size() != cloud.points.size()) {
    throw Error("cloud instance_ids length mismatch");
  }
  for (const auto& n : cloud.normals) {
    if (std::abs(n.norm() - 1.0) > 1e-6) throw Error("cloud normal not unit length");
  }
}

// ---------------------------------------------------------------------------
// KdTree over points. Immutable after construction, shareable across threads.
// ---------------------------------------------------------------------------

class KdTree {
 public:
  KdTree() = default;
  explicit KdTree(const std::vector<Vec3>& points) { build(points); }

  void build(const std::vector<Vec3>& points) {
    points_ = &points;
    order_.resize(points.size());
    for (size_t i = 0; i < points.size(); ++i) order_[i] = static_cast<int>(i);
    nodes_.clear();
    if (!points.empty()) {
      nodes_.reserve(2 * points.size() / kLeafSize + 2);
      build_node(0, static_cast<int>(points.size()));
    }
  }

  size_t size() const { return points_ ? points_->size() : 0; }

  // Indices with ||p_i - center|| <= r, ascending.
  std::vector<int> radius_query(const Vec3& center, double r) const {
    std::vector<int> out;
    if (nodes_.empty()) return out;
    radius_rec(0, center, r * r, out);
    std::sort(out.begin(), out.end());
    return out;
  }

  // k nearest neighbors ordered by (distance^2, index); `exclude` is skipped.
  std::vector<int> k_nearest(const Vec3& center, int k, int exclude = -1) const {
    std::vector<int> out;
    if (nodes_.empty() || k <= 0) return out;
    Heap heap;
    knn_rec(0, center, k, exclude, heap);
    out.resize(heap.size());
    for (size_t i = heap.size(); i-- > 0;) {
      out[i] = heap.top().second;
      heap.pop();
    }
    return out;
  }

 private:
  static constexpr int kLeafSize = 16;

  struct Node {
    int axis = -1;  // -1 marks a leaf
    double split = 0.0;
    int children[2] = {-1, -1};
    int begin = 0, end = 0;
  };

  // max-heap over (dist^2, index); lexicographic order makes ties deterministic
  using Entry = std::pair<double, int>;
  using Heap = std::priority_queue<Entry>;

  int build_node(int begin, int end) {
    const int id = static_cast<int>(nodes_.size());
    nodes_.push_back({});
    Node& node = nodes_.back();
    node.begin = begin;
    node.end = end;
    if (end - begin <= kLeafSize) return id;

    Aabb box;
    for (int i = begin; i < end; ++i) box.expand((*points_)[order_[i]]);
    const Vec3 ext = box.extent();
    int axis = 0;
    if (ext.y > ext[axis]) axis = 1;
    if (ext.z > ext[axis]) axis = 2;
    if (ext[axis] <= 0.0) return id;  // all points coincide: keep as leaf

    const int mid = (begin + end) / 2;
    std::nth_element(order_.begin() + begin, order_.begin() + mid, order_.begin() + end,
                     [&](int a, int b) {
                       const double ca = (*points_)[a][axis];
                       const double cb = (*points_)[b][axis];
                       return ca < cb || (ca == cb && a < b);
                     });
    const double split = (*points_)[order_[mid]][axis];

    const int left = build_node(begin, mid);
    const int right = build_node(mid, end);
    Node& n = nodes_[id];  // re-fetch: vector may have reallocated
    n.axis = axis;
    n.split = split;
    n.children[0] = left;
    n.children[1] = right;
    return id;
  }

  void radius_rec(int id, const Vec3& c, double r2, std::vector<int>& out) const {
    const Node& node = nodes_[id];
    if (node.axis < 0) {
      for (int i = node.begin; i < node.end; ++i) {
        const int idx = order_[i];
        if (squared_distance((*points_)[idx], c) <= r2) out.push_back(idx);
      }
      return;
    }
    const double d = c[node.axis] - node.split;
    const int near = d < 0.0 ? 0 : 1;
    radius_rec(node.children[near], c, r2, out);
    if (d * d <= r2) radius_rec(node.children[1 - near], c, r2, out);
  }

  void knn_rec(int id, const Vec3& c, int k, int exclude, Heap& heap) const {
    const Node& node = nodes_[id];
    if (node.axis < 0) {
      for (int i = node.begin; i < node.end; ++i) {
        const int idx = order_[i];
        if (idx == exclude) continue;
        const Entry e{squared_distance((*points_)[idx], c), idx};
        if (static_cast<int>(heap.size()) < k) {
          heap.push(e);
        } else if (e < heap.top()) {
          heap.pop();
          heap.push(e);
        }
      }
      return;
    }
    const double d = c[node.axis] - node.split;
    const int near = d < 0.0 ? 0 : 1;
    knn_rec(node.children[near], c, k, exclude, heap);
    if (static_cast<int>(heap.size()) < k || d * d <= heap.top().first) {
      knn_rec(node.children[1 - near], c, k, exclude, heap);
    }
  }

  const std::vector<Vec3>* points_ = nullptr;
  std::vector<int> order_;
  std::vector<Node> nodes_;
};

// Greedy farthest point sampling. First index is seed_index; each subsequent
// pick maximizes the min distance to the chosen set, ties broken by smallest
// index.
inline std::vector<int> farthest_point_sample(const PointCloud& cloud, int m, int seed_index) {
  const int n = static_cast<int>(cloud.size());
  if (m < 1 || m > n) throw OutOfRange("farthest_point_sample: m out of range");
  if (seed_index < 0 || seed_index >= n) {
    throw OutOfRange("farthest_point_sample: seed index out of range");
  }

  std::vector<int> chosen;
  chosen.reserve(m);
  chosen.push_back(seed_index);

  std::vector<double> min_d2(n);
  for (int i = 0; i < n; ++i) {
    min_d2[i] = squared_distance(cloud.points[i], cloud.points[seed_index]);
  }
  for (int s = 1; s < m; ++s) {
    int best = 0;
    for (int i = 1; i < n; ++i) {
      if (min_d2[i] > min_d2[best]) best = i;
    }
    chosen.push_back(best);
    for (int i = 0; i < n; ++i) {
      min_d2[i] = std::min(min_d2[i], squared_distance(cloud.points[i], cloud.points[best]));
    }
  }
  return chosen;
}

}  // namespace suction
