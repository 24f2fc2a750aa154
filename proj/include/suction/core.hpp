// Core math types: vectors, quaternions, rigid transforms, boxes, errors.
#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace suction {

inline constexpr double kPi = 3.141592653589793238462643383279502884;
inline constexpr double kInf = std::numeric_limits<double>::infinity();

// ---------------------------------------------------------------------------
// Errors. One type per contract failure so callers can catch selectively.
// ---------------------------------------------------------------------------

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct TooFewPoints : Error { using Error::Error; };
struct OutOfRange : Error { using Error::Error; };
struct BadDims : Error { using Error::Error; };
struct OpenMesh : Error { using Error::Error; };
struct PlacementFailed : Error { using Error::Error; };
struct EmptyView : Error { using Error::Error; };
struct ContactOffSurface : Error { using Error::Error; };
struct DegenerateView : Error { using Error::Error; };
struct MissingNormals : Error { using Error::Error; };
struct ShapeMismatch : Error { using Error::Error; };
struct EmptyDataset : Error { using Error::Error; };
struct BadT : Error { using Error::Error; };
struct BadSteps : Error { using Error::Error; };
struct NoPredictions : Error { using Error::Error; };
struct ParseError : Error { using Error::Error; };
struct IoError : Error { using Error::Error; };

// ---------------------------------------------------------------------------
// Vec3
// ---------------------------------------------------------------------------

struct Vec3 {
  double x = 0.0, y = 0.0, z = 0.0;

  constexpr Vec3() = default;
  constexpr Vec3(double x_, double y_, double z_) : x(x_), y(y_), z(z_) {}

  constexpr Vec3 operator+(const Vec3& o) const { return {x + o.x, y + o.y, z + o.z}; }
  constexpr Vec3 operator-(const Vec3& o) const { return {x - o.x, y - o.y, z - o.z}; }
  constexpr Vec3 operator-() const { return {-x, -y, -z}; }
  constexpr Vec3 operator*(double s) const { return {x * s, y * s, z * s}; }
  constexpr Vec3 operator/(double s) const { return {x / s, y / s, z / s}; }
  Vec3& operator+=(const Vec3& o) { x += o.x; y += o.y; z += o.z; return *this; }
  Vec3& operator-=(const Vec3& o) { x -= o.x; y -= o.y; z -= o.z; return *this; }
  Vec3& operator*=(double s) { x *= s; y *= s; z *= s; return *this; }

  constexpr double dot(const Vec3& o) const { return x * o.x + y * o.y + z * o.z; }
  constexpr Vec3 cross(const Vec3& o) const {
    return {y * o.z - z * o.y, z * o.x - x * o.z, x * o.y - y * o.x};
  }
  constexpr double squared_norm() const { return dot(*this); }
  double norm() const { return std::sqrt(squared_norm()); }

  Vec3 normalized() const {
    const double n = norm();
    return n > 0.0 ? Vec3{x / n, y / n, z / n} : Vec3{0.0, 0.0, 0.0};
  }

  constexpr double operator[](int i) const { return i == 0 ? x : (i == 1 ? y : z); }

  constexpr bool operator==(const Vec3& o) const { return x == o.x && y == o.y && z == o.z; }
};

inline constexpr Vec3 operator*(double s, const Vec3& v) { return v * s; }

inline double distance(const Vec3& a, const Vec3& b) { return (a - b).norm(); }
inline constexpr double squared_distance(const Vec3& a, const Vec3& b) {
  return (a - b).squared_norm();
}

// Angle between two vectors, radians in [0, pi]. Zero vectors map to 0.
inline double angle_between(const Vec3& a, const Vec3& b) {
  const double nn = a.norm() * b.norm();
  if (nn < 1e-300) return 0.0;
  return std::acos(std::clamp(a.dot(b) / nn, -1.0, 1.0));
}

// ---------------------------------------------------------------------------
// Quaternion (w, x, y, z), unit for rotations.
// ---------------------------------------------------------------------------

struct Quat {
  double w = 1.0, x = 0.0, y = 0.0, z = 0.0;

  constexpr Quat() = default;
  constexpr Quat(double w_, double x_, double y_, double z_) : w(w_), x(x_), y(y_), z(z_) {}

  static Quat from_axis_angle(const Vec3& axis, double angle) {
    const Vec3 u = axis.normalized();
    const double h = 0.5 * angle;
    const double s = std::sin(h);
    return {std::cos(h), u.x * s, u.y * s, u.z * s};
  }

  static Quat yaw(double angle) { return from_axis_angle({0.0, 0.0, 1.0}, angle); }

  constexpr Quat conjugate() const { return {w, -x, -y, -z}; }

  Quat normalized() const {
    const double n = std::sqrt(w * w + x * x + y * y + z * z);
    return n > 0.0 ? Quat{w / n, x / n, y / n, z / n} : Quat{};
  }

  constexpr Quat operator*(const Quat& o) const {
    return {w * o.w - x * o.x - y * o.y - z * o.z,
            w * o.x + x * o.w + y * o.z - z * o.y,
            w * o.y - x * o.z + y * o.w + z * o.x,
            w * o.z + x * o.y - y * o.x + z * o.w};
  }

  Vec3 rotate(const Vec3& v) const {
    // v' = v + 2 q_v x (q_v x v + w v)
    const Vec3 qv{x, y, z};
    const Vec3 t = qv.cross(v) * 2.0;
    return v + t * w + qv.cross(t);
  }
};

// ---------------------------------------------------------------------------
// Rigid transform: rotate then translate.
// ---------------------------------------------------------------------------

struct Transform {
  Quat rotation;
  Vec3 translation;

  static constexpr Transform identity() { return {}; }

  Vec3 apply(const Vec3& p) const { return rotation.rotate(p) + translation; }
  Vec3 rotate(const Vec3& v) const { return rotation.rotate(v); }

  Transform inverse() const {
    const Quat qi = rotation.conjugate();
    return {qi, qi.rotate(-translation)};
  }

  // this after other: (a * b)(p) = a(b(p))
  Transform operator*(const Transform& o) const {
    return {(rotation * o.rotation).normalized(), rotation.rotate(o.translation) + translation};
  }
};

// ---------------------------------------------------------------------------
// Axis-aligned box
// ---------------------------------------------------------------------------

struct Aabb {
  Vec3 min{kInf, kInf, kInf};
  Vec3 max{-kInf, -kInf, -kInf};

  void expand(const Vec3& p) {
    min.x = std::min(min.x, p.x); min.y = std::min(min.y, p.y); min.z = std::min(min.z, p.z);
    max.x = std::max(max.x, p.x); max.y = std::max(max.y, p.y); max.z = std::max(max.z, p.z);
  }
  void expand(const Aabb& b) { expand(b.min); expand(b.max); }

  bool empty() const { return min.x > max.x; }
  Vec3 center() const { return (min + max) * 0.5; }
  Vec3 extent() const { return max - min; }

  bool contains(const Vec3& p) const {
    return p.x >= min.x && p.x <= max.x && p.y >= min.y && p.y <= max.y &&
           p.z >= min.z && p.z <= max.z;
  }

  // Squared distance from p to the box (0 inside).
  double squared_distance(const Vec3& p) const {
    double d = 0.0;
    for (int i = 0; i < 3; ++i) {
      const double lo = min[i], hi = max[i], v = p[i];
      if (v < lo) d += (lo - v) * (lo - v);
      else if (v > hi) d += (v - hi) * (v - hi);
    }
    return d;
  }
};

inline double clamp01(double v) { return std::clamp(v, 0.0, 1.0); }

}  // namespace suction
