// On-disk formats: dataset layout, scene.json, cloud/labels/pred CSVs,
// model.json and report.json.
#pragma once

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "suction/eval.hpp"
#include "suction/scene.hpp"
#include "suction/scoring.hpp"
#include "suction/train.hpp"

namespace suction {

namespace fs = std::filesystem;
using json = nlohmann::json;

inline std::map<std::string, int> format_versions() {
  return {{"scene.json", 1}, {"cloud.csv", 1},  {"labels.csv", 1},
          {"pred.csv", 1},   {"model.json", 1}, {"report.json", 1}};
}

// ---------------------------------------------------------------------------
// Dataset layout: <root>/cycle_%04d/scene_%04d/{scene.json, meshes/, *.csv}
// ---------------------------------------------------------------------------

inline std::string cycle_dir_name(int cycle) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "cycle_%04d", cycle);
  return buf;
}

inline std::string scene_dir_name(int cycle, int scene) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "cycle_%04d/scene_%04d", cycle, scene);
  return buf;
}

// Relative scene directories (e.g. "cycle_0000/scene_0003"), sorted.
inline std::vector<std::string> list_scene_dirs(const fs::path& root) {
  std::vector<std::string> dirs;
  if (!fs::exists(root)) return dirs;
  for (const auto& cycle : fs::directory_iterator(root)) {
    if (!cycle.is_directory()) continue;
    const std::string cname = cycle.path().filename().string();
    if (cname.rfind("cycle_", 0) != 0) continue;
    for (const auto& scene : fs::directory_iterator(cycle.path())) {
      if (!scene.is_directory()) continue;
      const std::string sname = scene.path().filename().string();
      if (sname.rfind("scene_", 0) != 0) continue;
      dirs.push_back(cname + "/" + sname);
    }
  }
  std::sort(dirs.begin(), dirs.end());
  return dirs;
}

// ---------------------------------------------------------------------------
// scene.json
// ---------------------------------------------------------------------------

inline json pose_to_json(const Transform& pose) {
  return json{{"q", {pose.rotation.w, pose.rotation.x, pose.rotation.y, pose.rotation.z}},
              {"t", {pose.translation.x, pose.translation.y, pose.translation.z}}};
}

inline Transform pose_from_json(const json& j) {
  Transform pose;
  pose.rotation = {j.at("q").at(0), j.at("q").at(1), j.at("q").at(2), j.at("q").at(3)};
  pose.translation = {j.at("t").at(0), j.at("t").at(1), j.at("t").at(2)};
  return pose;
}

inline json camera_to_json(const CameraModel& cam) {
  json j;
  j["pose"] = pose_to_json(cam.pose);
  j["resolution"] = {cam.width, cam.height};
  if (cam.projection == CameraModel::Projection::Orthographic) {
    j["type"] = "orthographic";
    j["params"] = {{"width", cam.ortho_width}, {"height", cam.ortho_height}};
  } else {
    j["type"] = "pinhole";
    j["params"] = {{"fx", cam.fx}, {"fy", cam.fy}, {"cx", cam.cx}, {"cy", cam.cy}};
  }
  return j;
}

inline CameraModel camera_from_json(const json& j) {
  const Transform pose = pose_from_json(j.at("pose"));
  const int w = j.at("resolution").at(0);
  const int h = j.at("resolution").at(1);
  const json& p = j.at("params");
  if (j.at("type") == "orthographic") {
    return CameraModel::orthographic(pose, p.at("width"), p.at("height"), w, h);
  }
  if (j.at("type") == "pinhole") {
    return CameraModel::pinhole(pose, p.at("fx"), p.at("fy"), p.at("cx"), p.at("cy"), w, h);
  }
  throw ParseError("camera: unknown projection type");
}

// Writes scene.json plus one OBJ per instance under meshes/.
inline void write_scene_files(const fs::path& scene_dir, const Scene& scene) {
  fs::create_directories(scene_dir / "meshes");
  json j;
  j["schema"] = 1;
  j["seed"] = scene.seed;
  j["bin"] = {{"x", scene.bin.x}, {"y", scene.bin.y}, {"z", scene.bin.z}};
  j["camera"] = camera_to_json(scene.camera);
  j["friction"] = scene.friction;
  j["instances"] = json::array();
  for (const auto& inst : scene.instances) {
    char mesh_name[64];
    std::snprintf(mesh_name, sizeof(mesh_name), "meshes/parcel_%03d.obj", inst.instance_id);
    write_obj_file((scene_dir / mesh_name).string(), inst.mesh);
    j["instances"].push_back({{"id", inst.instance_id},
                              {"mesh", mesh_name},
                              {"pose", pose_to_json(inst.pose)},
                              {"mass", inst.mass},
                              {"com", {inst.com.x, inst.com.y, inst.com.z}},
                              {"density", inst.density}});
  }
  std::ofstream out(scene_dir / "scene.json");
  if (!out) throw IoError("cannot write " + (scene_dir / "scene.json").string());
  out << j.dump(2) << '\n';
}

inline Scene load_scene(const fs::path& scene_dir) {
  std::ifstream in(scene_dir / "scene.json");
  if (!in) throw IoError("cannot open " + (scene_dir / "scene.json").string());
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw ParseError("scene.json: " + std::string(e.what()));
  }
  try {
    Scene scene;
    scene.seed = j.at("seed");
    scene.bin = {j.at("bin").at("x"), j.at("bin").at("y"), j.at("bin").at("z")};
    scene.camera = camera_from_json(j.at("camera"));
    scene.friction = j.at("friction");
    for (const auto& ij : j.at("instances")) {
      SceneInstance inst;
      inst.instance_id = ij.at("id");
      inst.mesh = read_obj_file((scene_dir / ij.at("mesh").get<std::string>()).string());
      inst.pose = pose_from_json(ij.at("pose"));
      inst.mass = ij.at("mass");
      inst.com = {ij.at("com").at(0), ij.at("com").at(1), ij.at("com").at(2)};
      inst.density = ij.at("density");
      scene.instances.push_back(std::move(inst));
    }
    return scene;
  } catch (const json::exception& e) {
    throw ParseError("scene.json: " + std::string(e.what()));
  }
}

// ---------------------------------------------------------------------------
// CSV formats
// ---------------------------------------------------------------------------

namespace detail {

inline std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  size_t start = 0;
  while (true) {
    const size_t comma = line.find(',', start);
    if (comma == std::string::npos) {
      out.push_back(line.substr(start));
      break;
    }
    out.push_back(line.substr(start, comma - start));
    start = comma + 1;
  }
  return out;
}

inline double csv_double(const std::string& tok, const char* what) {
  double v = 0.0;
  if (!parse_double_token(tok, v)) throw ParseError(std::string("csv: bad ") + what);
  return v;
}

inline int csv_int(const std::string& tok, const char* what) {
  int v = 0;
  if (!parse_int_token(tok, v)) throw ParseError(std::string("csv: bad ") + what);
  return v;
}

inline void expect_header(std::istream& in, const std::string& expected, const char* what) {
  std::string line;
  if (!std::getline(in, line) || line != expected) {
    throw ParseError(std::string(what) + ": unexpected header");
  }
}

}  // namespace detail

inline constexpr const char* kCloudCsvHeader = "x,y,z,nx,ny,nz,instance_id";

inline void write_cloud_csv(const fs::path& path, const PointCloud& cloud) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path.string());
  out << kCloudCsvHeader << '\n';
  for (size_t i = 0; i < cloud.size(); ++i) {
    const Vec3& p = cloud.points[i];
    const Vec3& n = cloud.normals[i];
    out << format_double(p.x) << ',' << format_double(p.y) << ',' << format_double(p.z) << ','
        << format_double(n.x) << ',' << format_double(n.y) << ',' << format_double(n.z) << ','
        << cloud.instance_ids[i] << '\n';
  }
}

inline PointCloud read_cloud_csv(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  detail::expect_header(in, kCloudCsvHeader, "cloud.csv");
  PointCloud cloud;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto tok = detail::split_csv_line(line);
    if (tok.size() != 7) throw ParseError("cloud.csv: wrong column count");
    cloud.points.push_back({detail::csv_double(tok[0], "x"), detail::csv_double(tok[1], "y"),
                            detail::csv_double(tok[2], "z")});
    cloud.normals.push_back({detail::csv_double(tok[3], "nx"), detail::csv_double(tok[4], "ny"),
                             detail::csv_double(tok[5], "nz")});
    cloud.instance_ids.push_back(detail::csv_int(tok[6], "instance_id"));
  }
  try {
    validate_cloud(cloud);
  } catch (const Error& e) {
    throw ParseError("cloud.csv: " + std::string(e.what()));
  }
  return cloud;
}

inline constexpr const char* kLabelsCsvHeader =
    "point_index,x,y,z,nx,ny,nz,seal,wrench,collision,visibility,score";

inline void write_labels_csv(const fs::path& path, const std::vector<AnnotationRow>& rows) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path.string());
  out << kLabelsCsvHeader << '\n';
  for (const auto& r : rows) {
    const Vec3& p = r.candidate.contact;
    const Vec3& n = r.candidate.approach;
    out << r.point_index << ',' << format_double(p.x) << ',' << format_double(p.y) << ','
        << format_double(p.z) << ',' << format_double(n.x) << ',' << format_double(n.y) << ','
        << format_double(n.z) << ',' << format_double(r.scores.seal) << ','
        << format_double(r.scores.wrench) << ',' << format_double(r.scores.collision) << ','
        << format_double(r.scores.visibility) << ',' << format_double(r.scores.combined) << '\n';
  }
}

inline std::vector<AnnotationRow> read_labels_csv(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  detail::expect_header(in, kLabelsCsvHeader, "labels.csv");
  std::vector<AnnotationRow> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto tok = detail::split_csv_line(line);
    if (tok.size() != 12) throw ParseError("labels.csv: wrong column count");
    AnnotationRow r;
    r.point_index = detail::csv_int(tok[0], "point_index");
    r.candidate.contact = {detail::csv_double(tok[1], "x"), detail::csv_double(tok[2], "y"),
                           detail::csv_double(tok[3], "z")};
    r.candidate.approach = {detail::csv_double(tok[4], "nx"), detail::csv_double(tok[5], "ny"),
                            detail::csv_double(tok[6], "nz")};
    r.scores.seal = detail::csv_double(tok[7], "seal");
    r.scores.wrench = detail::csv_double(tok[8], "wrench");
    r.scores.collision = detail::csv_double(tok[9], "collision");
    r.scores.visibility = detail::csv_double(tok[10], "visibility");
    r.scores.combined = detail::csv_double(tok[11], "score");
    rows.push_back(r);
  }
  return rows;
}

inline constexpr const char* kPredCsvHeader = "point_index,x,y,z,nx,ny,nz,confidence";

inline void write_pred_csv(const fs::path& path, const std::vector<Prediction>& preds) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path.string());
  out << kPredCsvHeader << '\n';
  for (const auto& p : preds) {
    const Vec3& c = p.candidate.contact;
    const Vec3& n = p.candidate.approach;
    out << p.point_index << ',' << format_double(c.x) << ',' << format_double(c.y) << ','
        << format_double(c.z) << ',' << format_double(n.x) << ',' << format_double(n.y) << ','
        << format_double(n.z) << ',' << format_double(p.confidence) << '\n';
  }
}

inline std::vector<Prediction> read_pred_csv(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  detail::expect_header(in, kPredCsvHeader, "pred.csv");
  std::vector<Prediction> preds;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto tok = detail::split_csv_line(line);
    if (tok.size() != 8) throw ParseError("pred.csv: wrong column count");
    Prediction p;
    p.point_index = detail::csv_int(tok[0], "point_index");
    p.candidate.contact = {detail::csv_double(tok[1], "x"), detail::csv_double(tok[2], "y"),
                           detail::csv_double(tok[3], "z")};
    p.candidate.approach = {detail::csv_double(tok[4], "nx"), detail::csv_double(tok[5], "ny"),
                            detail::csv_double(tok[6], "nz")};
    p.confidence = detail::csv_double(tok[7], "confidence");
    preds.push_back(p);
  }
  return preds;
}

// ---------------------------------------------------------------------------
// model.json: weight arrays row-major with declared shapes.
// ---------------------------------------------------------------------------

struct ModelFile {
  DenoiserParams params;
  int t_train = 20;
  double scale = 0.5;
};

inline void save_model(const fs::path& path, const ModelFile& model, const json& config = {}) {
  const DenoiserParams& p = model.params;
  const auto entry = [](std::vector<int> shape, const std::vector<double>& data) {
    return json{{"shape", shape}, {"data", data}};
  };
  json weights;
  weights["wx"] = entry({p.hidden}, p.wx);
  weights["bx"] = entry({p.hidden}, p.bx);
  weights["wt"] = entry({p.hidden, p.time_dim}, p.wt);
  weights["bt"] = entry({p.hidden}, p.bt);
  weights["wf"] = entry({p.hidden, p.n_features}, p.wf);
  weights["bf"] = entry({p.hidden}, p.bf);
  weights["wg"] = entry({p.hidden, p.hidden}, p.wg);
  weights["bg"] = entry({p.hidden}, p.bg);
  weights["wo"] = entry({p.hidden}, p.wo);
  weights["bo"] = entry({1}, {p.bo});

  json j;
  j["schema"] = 1;
  j["hidden"] = p.hidden;
  j["time_dim"] = p.time_dim;
  j["n_features"] = p.n_features;
  j["t_train"] = model.t_train;
  j["scale"] = model.scale;
  j["weights"] = weights;
  if (!config.is_null() && !config.empty()) j["config"] = config;

  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path.string());
  out << j.dump(2) << '\n';
}

inline ModelFile load_model(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw ParseError("model.json: " + std::string(e.what()));
  }
  try {
    ModelFile model;
    model.t_train = j.at("t_train");
    model.scale = j.at("scale");
    DenoiserParams p = DenoiserParams::zeros(j.at("hidden"), j.at("time_dim"), j.at("n_features"));
    const json& w = j.at("weights");
    const auto load = [&](const char* name, std::vector<double>& dst) {
      const auto& data = w.at(name).at("data");
      if (data.size() != dst.size()) {
        throw ParseError(std::string("model.json: ") + name + " size mismatch");
      }
      dst = data.get<std::vector<double>>();
    };
    load("wx", p.wx);
    load("bx", p.bx);
    load("wt", p.wt);
    load("bt", p.bt);
    load("wf", p.wf);
    load("bf", p.bf);
    load("wg", p.wg);
    load("bg", p.bg);
    load("wo", p.wo);
    p.bo = w.at("bo").at("data").at(0);
    model.params = std::move(p);
    return model;
  } catch (const json::exception& e) {
    throw ParseError("model.json: " + std::string(e.what()));
  }
}

// ---------------------------------------------------------------------------
// report.json
// ---------------------------------------------------------------------------

inline json ap_row_to_json(const ApRow& row) {
  return json{{"topk", row.topk},
              {"evaluated", row.evaluated},
              {"AP", row.ap},
              {"AP04", row.ap04},
              {"AP08", row.ap08}};
}

inline json method_report_to_json(const MethodReport& report) {
  json per_scene = json::array();
  for (const auto& s : report.per_scene) {
    json row = ap_row_to_json(s.row);
    row["scene"] = s.scene;
    per_scene.push_back(row);
  }
  json agg = json::object();
  for (const auto& a : report.aggregate) agg["top" + std::to_string(a.topk)] = ap_row_to_json(a);
  return json{{"method", report.method}, {"per_scene", per_scene}, {"aggregate", agg}};
}

inline void write_report(const fs::path& path, const MethodReport& primary,
                         const MethodReport* baseline, const json& config,
                         const std::string& config_hash) {
  json j = method_report_to_json(primary);
  j["schema"] = 1;
  j["config"] = config;
  j["config_hash"] = config_hash;
  if (baseline) j["baseline"] = method_report_to_json(*baseline);
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path.string());
  out << j.dump(2) << '\n';
}

}  // namespace suction
