// Triangle meshes: validation, mass properties, OBJ subset I/O.
#pragma once

#include <array>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "suction/core.hpp"

namespace suction {

struct TriangleMesh {
  std::vector<Vec3> vertices;
  std::vector<std::array<int, 3>> faces;  // indices into vertices

  size_t vertex_count() const { return vertices.size(); }
  size_t face_count() const { return faces.size(); }
};

inline double triangle_area(const Vec3& a, const Vec3& b, const Vec3& c) {
  return 0.5 * (b - a).cross(c - a).norm();
}

// Face indices in range, faces non-degenerate (area > 1e-12 m^2).
inline void validate_mesh(const TriangleMesh& mesh) {
  const int n = static_cast<int>(mesh.vertices.size());
  for (size_t f = 0; f < mesh.faces.size(); ++f) {
    const auto& face = mesh.faces[f];
    for (int k = 0; k < 3; ++k) {
      if (face[k] < 0 || face[k] >= n) {
        throw Error("mesh face " + std::to_string(f) + " index out of range");
      }
    }
    const double area =
        triangle_area(mesh.vertices[face[0]], mesh.vertices[face[1]], mesh.vertices[face[2]]);
    if (area <= 1e-12) {
      throw Error("mesh face " + std::to_string(f) + " is degenerate");
    }
  }
}

// Signed volume (positive for outward-oriented closed meshes) and centroid,
// by signed tetrahedra about the origin.
inline std::pair<double, Vec3> signed_volume_centroid(const TriangleMesh& mesh) {
  double volume = 0.0;
  Vec3 moment{0.0, 0.0, 0.0};
  for (const auto& f : mesh.faces) {
    const Vec3& a = mesh.vertices[f[0]];
    const Vec3& b = mesh.vertices[f[1]];
    const Vec3& c = mesh.vertices[f[2]];
    const double v = a.dot(b.cross(c)) / 6.0;
    volume += v;
    moment += (a + b + c) * (v / 4.0);
  }
  const Vec3 centroid = std::abs(volume) > 0.0 ? moment / volume : Vec3{};
  return {volume, centroid};
}

inline Aabb mesh_aabb(const TriangleMesh& mesh, const Transform& pose = Transform::identity()) {
  Aabb box;
  for (const auto& v : mesh.vertices) box.expand(pose.apply(v));
  return box;
}

inline TriangleMesh transformed(const TriangleMesh& mesh, const Transform& pose) {
  TriangleMesh out = mesh;
  for (auto& v : out.vertices) v = pose.apply(v);
  return out;
}

// ---------------------------------------------------------------------------
// OBJ subset: `v x y z` and triangular `f i j k` (1-based), ASCII, meters.
// Other statement types are ignored; non-triangle faces are rejected.
// ---------------------------------------------------------------------------

namespace detail {

inline bool parse_double_token(const std::string& tok, double& out) {
  const char* first = tok.data();
  const char* last = tok.data() + tok.size();
  auto res = std::from_chars(first, last, out);
  return res.ec == std::errc() && res.ptr == last;
}

inline bool parse_int_token(const std::string& tok, int& out) {
  const char* first = tok.data();
  const char* last = tok.data() + tok.size();
  auto res = std::from_chars(first, last, out);
  return res.ec == std::errc() && res.ptr == last;
}

}  // namespace detail

inline TriangleMesh read_obj(std::istream& in) {
  TriangleMesh mesh;
  std::string line;
  size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::istringstream ls(line);
    std::string tag;
    if (!(ls >> tag)) continue;
    if (tag == "v") {
      std::string sx, sy, sz;
      Vec3 p;
      if (!(ls >> sx >> sy >> sz) || !detail::parse_double_token(sx, p.x) ||
          !detail::parse_double_token(sy, p.y) || !detail::parse_double_token(sz, p.z)) {
        throw ParseError("obj line " + std::to_string(lineno) + ": malformed vertex");
      }
      mesh.vertices.push_back(p);
    } else if (tag == "f") {
      std::vector<int> idx;
      std::string tok;
      while (ls >> tok) {
        int v = 0;
        if (!detail::parse_int_token(tok, v)) {
          throw ParseError("obj line " + std::to_string(lineno) + ": malformed face index");
        }
        idx.push_back(v);
      }
      if (idx.size() != 3) {
        throw ParseError("obj line " + std::to_string(lineno) + ": only triangles supported");
      }
      std::array<int, 3> face{};
      for (int k = 0; k < 3; ++k) {
        if (idx[k] < 1 || idx[k] > static_cast<int>(mesh.vertices.size())) {
          throw ParseError("obj line " + std::to_string(lineno) + ": face index out of range");
        }
        face[k] = idx[k] - 1;
      }
      mesh.faces.push_back(face);
    }
    // anything else: ignored
  }
  return mesh;
}

inline TriangleMesh read_obj_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path);
  return read_obj(in);
}

// Shortest round-trip decimal representation.
inline std::string format_double(double v) {
  char buf[32];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

inline void write_obj(std::ostream& out, const TriangleMesh& mesh) {
  for (const auto& v : mesh.vertices) {
    out << "v " << format_double(v.x) << ' ' << format_double(v.y) << ' ' << format_double(v.z)
        << '\n';
  }
  for (const auto& f : mesh.faces) {
    out << "f " << (f[0] + 1) << ' ' << (f[1] + 1) << ' ' << (f[2] + 1) << '\n';
  }
}

inline void write_obj_file(const std::string& path, const TriangleMesh& mesh) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path);
  write_obj(out, mesh);
}

}  // namespace suction
