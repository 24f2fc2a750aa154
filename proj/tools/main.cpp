// suction: dataset generation, annotation, training, prediction, evaluation.
//
// Exit codes: 0 success, 2 placement failure (gen), 3 malformed dataset
// files, 4 empty training dataset, 5 model/feature shape mismatch,
// 1 anything else. Diagnostics go to stderr.

#include <atomic>
#include <cstdint>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "suction/suction.hpp"

namespace fs = std::filesystem;
using suction::json;

namespace {

constexpr const char* kVersion = "0.1.0";

// ---------------------------------------------------------------------------
// Helpers
// ---------------------------------------------------------------------------

uint64_t fnv1a(const std::string& s) {
  uint64_t h = 1469598103934665603ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

std::string hash_hex(const json& j) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(fnv1a(j.dump())));
  return buf;
}

json load_config_file(const std::string& path) {
  if (path.empty()) return json::object();
  std::ifstream in(path);
  if (!in) throw suction::IoError("cannot open config file " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw suction::ParseError("config file: " + std::string(e.what()));
  }
  if (!j.is_object()) throw suction::ParseError("config file: expected a JSON object");
  return j;
}

// Fill option values from the config file wherever the flag was not given.
template <typename T>
void merge_option(const CLI::App* cmd, const json& cfg, const std::string& name, T& value) {
  if (cmd->count("--" + name) > 0) return;
  if (cfg.contains(name)) value = cfg.at(name).get<T>();
}

std::pair<int, int> parse_range(const std::string& text) {
  const size_t sep = text.find("..");
  if (sep == std::string::npos) {
    const int v = std::stoi(text);
    return {v, v};
  }
  return {std::stoi(text.substr(0, sep)), std::stoi(text.substr(sep + 2))};
}

std::pair<int, int> parse_resolution(const std::string& text) {
  const size_t sep = text.find('x');
  if (sep == std::string::npos) throw suction::ParseError("resolution: expected WxH");
  return {std::stoi(text.substr(0, sep)), std::stoi(text.substr(sep + 1))};
}

suction::Vec3 parse_vec3(const std::string& text) {
  const size_t a = text.find(',');
  const size_t b = text.find(',', a + 1);
  if (a == std::string::npos || b == std::string::npos) {
    throw suction::ParseError("expected X,Y,Z");
  }
  return {std::stod(text.substr(0, a)), std::stod(text.substr(a + 1, b - a - 1)),
          std::stod(text.substr(b + 1))};
}

std::vector<int> parse_int_list(const std::string& text) {
  std::vector<int> out;
  size_t start = 0;
  while (start <= text.size()) {
    const size_t comma = text.find(',', start);
    const std::string tok =
        comma == std::string::npos ? text.substr(start) : text.substr(start, comma - start);
    if (!tok.empty()) out.push_back(std::stoi(tok));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return out;
}

// Runs fn(i) for i in [0, n), spread over `jobs` threads. Outputs must not
// depend on scheduling; per-item work keys its RNG off stable identifiers.
void parallel_for(size_t n, int jobs, const std::function<void(size_t)>& fn) {
  if (jobs <= 1 || n <= 1) {
    for (size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto worker = [&]() {
    while (true) {
      const size_t i = next.fetch_add(1);
      if (i >= n) return;
      try {
        fn(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!error) error = std::current_exception();
        return;
      }
    }
  };
  std::vector<std::thread> pool;
  const int count = std::min<int>(jobs, static_cast<int>(n));
  pool.reserve(count);
  for (int t = 0; t < count; ++t) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

void write_run_config(const fs::path& path, const std::string& command, const json& resolved) {
  json j;
  j["command"] = command;
  j["config"] = resolved;
  j["config_hash"] = hash_hex(resolved);
  j["formats"] = suction::format_versions();
  std::ofstream out(path);
  if (!out) throw suction::IoError("cannot write " + path.string());
  out << j.dump(2) << '\n';
}

// ---------------------------------------------------------------------------
// gen
// ---------------------------------------------------------------------------

struct GenOptions {
  std::string out;
  int cycles = 10;
  int scenes_per_cycle = 10;
  uint64_t seed = 0;
  std::string objects = "1..50";
  std::string resolution = "512x512";
  std::string bin = "0.6,0.6,0.3";
  double density = 500.0;
  int jobs = 1;
  std::string config_file;
};

int run_gen(const GenOptions& opt) {
  const auto [obj_lo, obj_hi] = parse_range(opt.objects);
  const auto [res_x, res_y] = parse_resolution(opt.resolution);

  suction::SceneConfig config;
  config.n_objects_min = obj_lo;
  config.n_objects_max = obj_hi;
  config.bin = parse_vec3(opt.bin);
  config.density = opt.density;
  config.resolution_x = res_x;
  config.resolution_y = res_y;
  suction::validate_config(config);

  // paths and --jobs are excluded from the echoed config: outputs must be
  // byte-identical regardless of where and how parallel the run was
  const json resolved = {{"cycles", opt.cycles},
                         {"scenes-per-cycle", opt.scenes_per_cycle},
                         {"seed", opt.seed},
                         {"objects", opt.objects},
                         {"resolution", opt.resolution},
                         {"bin", opt.bin},
                         {"density", opt.density}};

  const fs::path root(opt.out);
  fs::create_directories(root);

  const size_t total = static_cast<size_t>(opt.cycles) * opt.scenes_per_cycle;
  parallel_for(total, opt.jobs, [&](size_t idx) {
    const int cycle = static_cast<int>(idx) / opt.scenes_per_cycle;
    const int scene_no = static_cast<int>(idx) % opt.scenes_per_cycle;
    const fs::path dir = root / suction::scene_dir_name(cycle, scene_no);
    const uint64_t scene_seed = suction::mix_seed(opt.seed, cycle, scene_no);
    try {
      const suction::Scene scene = suction::generate_scene(config, scene_seed);
      suction::write_scene_files(dir, scene);
      suction::write_cloud_csv(dir / "cloud.csv", suction::scene_to_cloud(scene));
    } catch (const suction::PlacementFailed& e) {
      throw suction::PlacementFailed(suction::scene_dir_name(cycle, scene_no) + ": " + e.what());
    }
  });

  write_run_config(root / "generate.json", "gen", resolved);
  std::printf("gen: wrote %zu scenes to %s\n", total, opt.out.c_str());
  return 0;
}

// ---------------------------------------------------------------------------
// annotate
// ---------------------------------------------------------------------------

struct AnnotateOptions {
  std::string data;
  int points = 16384;
  double cup_radius = 0.015;
  int jobs = 1;
  std::string config_file;
};

int run_annotate(const AnnotateOptions& opt) {
  const fs::path root(opt.data);
  const std::vector<std::string> dirs = suction::list_scene_dirs(root);
  if (dirs.empty()) throw suction::IoError("annotate: no scenes under " + opt.data);

  const suction::SuctionCupModel cup = suction::SuctionCupModel::for_radius(opt.cup_radius);
  const suction::WrenchModel wm = suction::WrenchModel::make(opt.cup_radius, 20.0);

  std::vector<double> means(dirs.size(), 0.0);
  std::vector<size_t> counts(dirs.size(), 0);
  parallel_for(dirs.size(), opt.jobs, [&](size_t i) {
    const fs::path dir = root / dirs[i];
    const suction::Scene scene = suction::load_scene(dir);
    const suction::PointCloud cloud = suction::read_cloud_csv(dir / "cloud.csv");
    const auto rows = suction::annotate_cloud(scene, cloud, opt.points, cup, {}, wm);
    suction::write_labels_csv(dir / "labels.csv", rows);
    double sum = 0.0;
    for (const auto& r : rows) sum += r.scores.combined;
    means[i] = rows.empty() ? 0.0 : sum / rows.size();
    counts[i] = rows.size();
  });

  const json resolved = {{"points", opt.points}, {"cup-radius", opt.cup_radius}};
  write_run_config(root / "annotate.json", "annotate", resolved);

  double total = 0.0;
  size_t n_rows = 0;
  for (size_t i = 0; i < dirs.size(); ++i) {
    std::printf("%s: rows=%zu mean_score=%.4f\n", dirs[i].c_str(), counts[i], means[i]);
    total += means[i] * counts[i];
    n_rows += counts[i];
  }
  std::printf("annotate: %zu scenes, %zu rows, mean combined score %.4f\n", dirs.size(), n_rows,
              n_rows ? total / n_rows : 0.0);
  return 0;
}

// ---------------------------------------------------------------------------
// train
// ---------------------------------------------------------------------------

struct TrainOptions {
  std::string data;
  std::string out;
  int steps = 20;
  double scale = 0.5;
  int epochs = 200;
  double lr = 0.05;
  int batch = 1;
  int hidden = 64;
  int time_dim = 16;
  uint64_t seed = 0;
  std::string config_file;
};

suction::PointCloud cloud_from_labels(const std::vector<suction::AnnotationRow>& rows) {
  suction::PointCloud cloud;
  for (const auto& r : rows) {
    cloud.points.push_back(r.candidate.contact);
    cloud.normals.push_back(r.candidate.approach);
  }
  return cloud;
}

int run_train(const TrainOptions& opt) {
  const fs::path root(opt.data);
  std::vector<suction::TrainScene> dataset;
  for (const std::string& dir : suction::list_scene_dirs(root)) {
    const fs::path labels = root / dir / "labels.csv";
    if (!fs::exists(labels)) continue;
    const auto rows = suction::read_labels_csv(labels);
    if (rows.empty()) continue;
    suction::TrainScene scene;
    scene.features = suction::condition_features(cloud_from_labels(rows));
    scene.scores.reserve(rows.size());
    for (const auto& r : rows) scene.scores.push_back(r.scores.combined);
    dataset.push_back(std::move(scene));
  }

  suction::TrainConfig cfg;
  cfg.t_train = opt.steps;
  cfg.scale = opt.scale;
  cfg.epochs = opt.epochs;
  cfg.lr = opt.lr;
  cfg.batch_scenes = opt.batch;
  cfg.hidden = opt.hidden;
  cfg.time_dim = opt.time_dim;
  cfg.seed = opt.seed;
  const suction::TrainResult result = suction::train(dataset, cfg);

  const json resolved = {{"steps", opt.steps},   {"scale", opt.scale},
                         {"epochs", opt.epochs}, {"lr", opt.lr},
                         {"batch", opt.batch},   {"hidden", opt.hidden},
                         {"time-dim", opt.time_dim}, {"seed", opt.seed}};
  json model_config = resolved;
  model_config["config_hash"] = hash_hex(resolved);

  suction::ModelFile model{result.params, opt.steps, opt.scale};
  suction::save_model(opt.out, model, model_config);

  fs::path curve = opt.out;
  curve.replace_extension(".loss.csv");
  std::ofstream curve_out(curve);
  if (!curve_out) throw suction::IoError("cannot write " + curve.string());
  curve_out << "epoch,loss\n";
  for (size_t e = 0; e < result.loss_curve.size(); ++e) {
    curve_out << e << ',' << suction::format_double(result.loss_curve[e]) << '\n';
  }

  std::printf("train: %zu scenes, loss %.6f -> %.6f, model %s\n", dataset.size(),
              result.loss_curve.front(), result.loss_curve.back(), opt.out.c_str());
  return 0;
}

// ---------------------------------------------------------------------------
// predict / eval
// ---------------------------------------------------------------------------

struct PredictOptions {
  std::string data;
  std::string model;
  std::string baseline;  // "normal-std" to evaluate the baseline (eval only)
  int points = 16384;
  double cup_radius = 0.015;  // online re-scoring cup (eval only)
  int infer_steps = 20;
  std::string step_grid;  // optional explicit grid, e.g. "5,4,3,2,1,0"
  std::string topk = "1,50";
  double nms_radius = 0.02;
  uint64_t seed = 0;
  std::string out;  // report path (eval)
  int jobs = 1;
  std::string config_file;
};

struct ScenePredictions {
  std::vector<suction::Prediction> model;
  std::vector<suction::Prediction> baseline;
};

// FPS-sampled candidate pool shared by the model and the baseline.
struct CandidatePool {
  suction::PointCloud subcloud;
  std::vector<int> indices;  // into the full cloud
};

CandidatePool make_pool(const suction::PointCloud& cloud, int points) {
  CandidatePool pool;
  const int m = std::min<int>(points, static_cast<int>(cloud.size()));
  pool.indices = suction::farthest_point_sample(cloud, m, 0);
  std::sort(pool.indices.begin(), pool.indices.end());
  for (int idx : pool.indices) {
    pool.subcloud.points.push_back(cloud.points[idx]);
    pool.subcloud.normals.push_back(cloud.normals[idx]);
  }
  return pool;
}

std::vector<suction::Prediction> predict_scene(const suction::ModelFile& model,
                                               const CandidatePool& pool,
                                               const std::vector<int>& grid, uint64_t seed) {
  const suction::ConditionFeatures feats = suction::condition_features(pool.subcloud);
  const suction::DiffusionSchedule sched =
      suction::cosine_schedule(model.t_train, model.scale);
  const suction::ScoreMap scores =
      suction::sample_with_grid(model.params, feats, sched, grid, seed);
  std::vector<suction::Prediction> preds(scores.size());
  for (size_t i = 0; i < scores.size(); ++i) {
    preds[i].candidate = {pool.subcloud.points[i], pool.subcloud.normals[i]};
    preds[i].confidence = scores[i];
    preds[i].point_index = pool.indices[i];
  }
  return preds;
}

std::vector<suction::Prediction> baseline_scene(const CandidatePool& pool) {
  std::vector<suction::Prediction> preds = suction::normal_std_baseline(pool.subcloud, 16);
  for (size_t i = 0; i < preds.size(); ++i) preds[i].point_index = pool.indices[i];
  return preds;
}

std::vector<int> resolve_grid(const PredictOptions& opt, int t_train) {
  if (!opt.step_grid.empty()) {
    const std::vector<int> grid = parse_int_list(opt.step_grid);
    suction::validate_step_grid(grid, t_train);
    return grid;
  }
  return suction::inference_step_grid(t_train, opt.infer_steps);
}

int run_predict(const PredictOptions& opt) {
  const fs::path root(opt.data);
  const std::vector<std::string> dirs = suction::list_scene_dirs(root);
  if (dirs.empty()) throw suction::IoError("predict: no scenes under " + opt.data);
  const suction::ModelFile model = suction::load_model(opt.model);
  const std::vector<int> grid = resolve_grid(opt, model.t_train);

  parallel_for(dirs.size(), opt.jobs, [&](size_t i) {
    const fs::path dir = root / dirs[i];
    const suction::PointCloud cloud = suction::read_cloud_csv(dir / "cloud.csv");
    const CandidatePool pool = make_pool(cloud, opt.points);
    const uint64_t seed = suction::mix_seed(opt.seed, fnv1a(dirs[i]));
    suction::write_pred_csv(dir / "pred.csv", predict_scene(model, pool, grid, seed));
  });
  std::printf("predict: wrote pred.csv for %zu scenes\n", dirs.size());
  return 0;
}

void print_report_table(const std::vector<suction::MethodReport>& methods) {
  std::printf("%-18s %6s %5s %9s %9s %9s\n", "method", "topk", "scn", "AP", "AP_0.8", "AP_0.4");
  for (const auto& m : methods) {
    for (const auto& row : m.aggregate) {
      std::printf("%-18s %6d %5zu %9.2f %9.2f %9.2f\n", m.method.c_str(), row.topk,
                  m.per_scene.size() / std::max<size_t>(1, m.aggregate.size()), row.ap, row.ap08,
                  row.ap04);
    }
  }
}

int run_eval(const PredictOptions& opt) {
  const fs::path root(opt.data);
  const std::vector<std::string> dirs = suction::list_scene_dirs(root);
  if (dirs.empty()) throw suction::IoError("eval: no scenes under " + opt.data);

  const bool use_model = !opt.model.empty();
  const bool use_baseline = !opt.baseline.empty();
  if (!use_model && !use_baseline) {
    throw suction::Error("eval: need --model and/or --baseline normal-std");
  }
  if (use_baseline && opt.baseline != "normal-std") {
    throw suction::Error("eval: unknown baseline '" + opt.baseline + "'");
  }
  const std::vector<int> topk = parse_int_list(opt.topk);

  suction::ModelFile model;
  std::vector<int> grid;
  if (use_model) {
    model = suction::load_model(opt.model);
    grid = resolve_grid(opt, model.t_train);
  }

  std::vector<std::vector<suction::SceneEvalRow>> model_rows(dirs.size());
  std::vector<std::vector<suction::SceneEvalRow>> baseline_rows(dirs.size());

  parallel_for(dirs.size(), opt.jobs, [&](size_t i) {
    const fs::path dir = root / dirs[i];
    const suction::Scene scene = suction::load_scene(dir);
    const suction::PointCloud cloud = suction::read_cloud_csv(dir / "cloud.csv");
    const CandidatePool pool = make_pool(cloud, opt.points);

    const auto cup = suction::SuctionCupModel::for_radius(opt.cup_radius);
    const auto wm = suction::WrenchModel::make(opt.cup_radius, 20.0);
    suction::SceneScorer scorer(scene, cloud, cup, {}, wm);

    if (use_model) {
      const uint64_t seed = suction::mix_seed(opt.seed, fnv1a(dirs[i]));
      const auto preds = predict_scene(model, pool, grid, seed);
      suction::write_pred_csv(dir / "pred.csv", preds);
      for (const auto& row : suction::average_precision(preds, scorer, topk, opt.nms_radius)) {
        model_rows[i].push_back({dirs[i], row});
      }
    }
    if (use_baseline) {
      const auto preds = baseline_scene(pool);
      for (const auto& row : suction::average_precision(preds, scorer, topk, opt.nms_radius)) {
        baseline_rows[i].push_back({dirs[i], row});
      }
    }
  });

  const json resolved = {{"baseline", opt.baseline}, {"points", opt.points},
                         {"cup-radius", opt.cup_radius},
                         {"infer-steps", opt.infer_steps}, {"step-grid", opt.step_grid},
                         {"topk", opt.topk},     {"nms", opt.nms_radius},
                         {"seed", opt.seed}};

  std::vector<suction::MethodReport> methods;
  if (use_model) {
    suction::MethodReport rep;
    rep.method = "diffusion";
    for (const auto& rows : model_rows) rep.per_scene.insert(rep.per_scene.end(), rows.begin(), rows.end());
    rep.aggregate = suction::aggregate_rows(rep.per_scene, topk);
    methods.push_back(std::move(rep));
  }
  if (use_baseline) {
    suction::MethodReport rep;
    rep.method = "normal-std";
    for (const auto& rows : baseline_rows) rep.per_scene.insert(rep.per_scene.end(), rows.begin(), rows.end());
    rep.aggregate = suction::aggregate_rows(rep.per_scene, topk);
    methods.push_back(std::move(rep));
  }

  const fs::path report_path = opt.out.empty() ? root / "report.json" : fs::path(opt.out);
  const suction::MethodReport* baseline_ptr = methods.size() > 1 ? &methods[1] : nullptr;
  suction::write_report(report_path, methods.front(), baseline_ptr, resolved, hash_hex(resolved));

  print_report_table(methods);
  std::printf("eval: report written to %s\n", report_path.string().c_str());
  return 0;
}

}  // namespace

// ---------------------------------------------------------------------------

int main(int argc, char** argv) {
  CLI::App app{"Parcel-pile suction dataset generation, scoring and diffusion evaluation"};
  app.require_subcommand(0, 1);

  bool show_version = false;
  app.add_flag("--version", show_version, "Print version and file format versions");

  GenOptions gen;
  CLI::App* gen_cmd = app.add_subcommand("gen", "Generate a scene dataset");
  gen_cmd->add_option("--out", gen.out, "Output dataset directory")->required();
  gen_cmd->add_option("--cycles", gen.cycles, "Number of cycles");
  gen_cmd->add_option("--scenes-per-cycle", gen.scenes_per_cycle, "Scenes per cycle");
  gen_cmd->add_option("--seed", gen.seed, "Global seed");
  gen_cmd->add_option("--objects", gen.objects, "Object count or range LO..HI");
  gen_cmd->add_option("--resolution", gen.resolution, "Camera resolution WxH");
  gen_cmd->add_option("--bin", gen.bin, "Bin inner extents X,Y,Z meters");
  gen_cmd->add_option("--density", gen.density, "Parcel density kg/m^3");
  gen_cmd->add_option("--jobs", gen.jobs, "Parallel scene jobs");
  gen_cmd->add_option("--config", gen.config_file, "JSON config file (flags win)");

  AnnotateOptions ann;
  CLI::App* ann_cmd = app.add_subcommand("annotate", "Score FPS-sampled candidates per scene");
  ann_cmd->add_option("--data", ann.data, "Dataset directory")->required();
  ann_cmd->add_option("--points", ann.points, "Candidates per scene");
  ann_cmd->add_option("--cup-radius", ann.cup_radius, "Suction cup radius, meters");
  ann_cmd->add_option("--jobs", ann.jobs, "Parallel scene jobs");
  ann_cmd->add_option("--config", ann.config_file, "JSON config file (flags win)");

  TrainOptions train_opt;
  CLI::App* train_cmd = app.add_subcommand("train", "Train the diffusion denoiser");
  train_cmd->add_option("--data", train_opt.data, "Annotated dataset directory")->required();
  train_cmd->add_option("--out", train_opt.out, "Output model.json path")->required();
  train_cmd->add_option("--steps", train_opt.steps, "Diffusion steps T");
  train_cmd->add_option("--scale", train_opt.scale, "Signal scaling factor");
  train_cmd->add_option("--epochs", train_opt.epochs, "Training epochs");
  train_cmd->add_option("--lr", train_opt.lr, "SGD learning rate");
  train_cmd->add_option("--batch", train_opt.batch, "Scenes per SGD update");
  train_cmd->add_option("--hidden", train_opt.hidden, "Denoiser hidden width");
  train_cmd->add_option("--time-dim", train_opt.time_dim, "Time embedding size");
  train_cmd->add_option("--seed", train_opt.seed, "Training seed");
  train_cmd->add_option("--config", train_opt.config_file, "JSON config file (flags win)");

  PredictOptions pred;
  CLI::App* pred_cmd = app.add_subcommand("predict", "Write per-scene pred.csv");
  pred_cmd->add_option("--data", pred.data, "Dataset directory")->required();
  pred_cmd->add_option("--model", pred.model, "Trained model.json")->required();
  pred_cmd->add_option("--points", pred.points, "Candidates per scene");
  pred_cmd->add_option("--infer-steps", pred.infer_steps, "Inference steps");
  pred_cmd->add_option("--step-grid", pred.step_grid, "Explicit descending step grid");
  pred_cmd->add_option("--seed", pred.seed, "Sampling seed");
  pred_cmd->add_option("--jobs", pred.jobs, "Parallel scene jobs");
  pred_cmd->add_option("--config", pred.config_file, "JSON config file (flags win)");

  PredictOptions eval_opt;
  CLI::App* eval_cmd = app.add_subcommand("eval", "Evaluate predictions with online scoring");
  eval_cmd->add_option("--data", eval_opt.data, "Dataset directory")->required();
  eval_cmd->add_option("--model", eval_opt.model, "Trained model.json");
  eval_cmd->add_option("--baseline", eval_opt.baseline, "Baseline method (normal-std)");
  eval_cmd->add_option("--points", eval_opt.points, "Candidates per scene");
  eval_cmd->add_option("--cup-radius", eval_opt.cup_radius, "Online re-scoring cup radius");
  eval_cmd->add_option("--infer-steps", eval_opt.infer_steps, "Inference steps");
  eval_cmd->add_option("--step-grid", eval_opt.step_grid, "Explicit descending step grid");
  eval_cmd->add_option("--topk", eval_opt.topk, "Comma-separated top-k list");
  eval_cmd->add_option("--nms", eval_opt.nms_radius, "NMS radius, meters");
  eval_cmd->add_option("--seed", eval_opt.seed, "Sampling seed");
  eval_cmd->add_option("--out", eval_opt.out, "Report path (default <data>/report.json)");
  eval_cmd->add_option("--jobs", eval_opt.jobs, "Parallel scene jobs");
  eval_cmd->add_option("--config", eval_opt.config_file, "JSON config file (flags win)");

  CLI11_PARSE(app, argc, argv);

  if (show_version) {
    std::printf("suction %s\n", kVersion);
    for (const auto& [name, version] : suction::format_versions()) {
      std::printf("format %s v%d\n", name.c_str(), version);
    }
    return 0;
  }

  try {
    if (gen_cmd->parsed()) {
      const json cfg = load_config_file(gen.config_file);
      merge_option(gen_cmd, cfg, "cycles", gen.cycles);
      merge_option(gen_cmd, cfg, "scenes-per-cycle", gen.scenes_per_cycle);
      merge_option(gen_cmd, cfg, "seed", gen.seed);
      merge_option(gen_cmd, cfg, "objects", gen.objects);
      merge_option(gen_cmd, cfg, "resolution", gen.resolution);
      merge_option(gen_cmd, cfg, "bin", gen.bin);
      merge_option(gen_cmd, cfg, "density", gen.density);
      merge_option(gen_cmd, cfg, "jobs", gen.jobs);
      return run_gen(gen);
    }
    if (ann_cmd->parsed()) {
      const json cfg = load_config_file(ann.config_file);
      merge_option(ann_cmd, cfg, "points", ann.points);
      merge_option(ann_cmd, cfg, "cup-radius", ann.cup_radius);
      merge_option(ann_cmd, cfg, "jobs", ann.jobs);
      return run_annotate(ann);
    }
    if (train_cmd->parsed()) {
      const json cfg = load_config_file(train_opt.config_file);
      merge_option(train_cmd, cfg, "steps", train_opt.steps);
      merge_option(train_cmd, cfg, "scale", train_opt.scale);
      merge_option(train_cmd, cfg, "epochs", train_opt.epochs);
      merge_option(train_cmd, cfg, "lr", train_opt.lr);
      merge_option(train_cmd, cfg, "batch", train_opt.batch);
      merge_option(train_cmd, cfg, "hidden", train_opt.hidden);
      merge_option(train_cmd, cfg, "time-dim", train_opt.time_dim);
      merge_option(train_cmd, cfg, "seed", train_opt.seed);
      return run_train(train_opt);
    }
    if (pred_cmd->parsed()) {
      const json cfg = load_config_file(pred.config_file);
      merge_option(pred_cmd, cfg, "points", pred.points);
      merge_option(pred_cmd, cfg, "infer-steps", pred.infer_steps);
      merge_option(pred_cmd, cfg, "step-grid", pred.step_grid);
      merge_option(pred_cmd, cfg, "seed", pred.seed);
      merge_option(pred_cmd, cfg, "jobs", pred.jobs);
      return run_predict(pred);
    }
    if (eval_cmd->parsed()) {
      const json cfg = load_config_file(eval_opt.config_file);
      merge_option(eval_cmd, cfg, "points", eval_opt.points);
      merge_option(eval_cmd, cfg, "cup-radius", eval_opt.cup_radius);
      merge_option(eval_cmd, cfg, "infer-steps", eval_opt.infer_steps);
      merge_option(eval_cmd, cfg, "step-grid", eval_opt.step_grid);
      merge_option(eval_cmd, cfg, "topk", eval_opt.topk);
      merge_option(eval_cmd, cfg, "nms", eval_opt.nms_radius);
      merge_option(eval_cmd, cfg, "seed", eval_opt.seed);
      merge_option(eval_cmd, cfg, "out", eval_opt.out);
      merge_option(eval_cmd, cfg, "jobs", eval_opt.jobs);
      return run_eval(eval_opt);
    }
    std::fprintf(stderr, "%s\n", app.help().c_str());
    return 1;
  } catch (const suction::PlacementFailed& e) {
    std::fprintf(stderr, "error: placement failed: %s\n", e.what());
    return 2;
  } catch (const suction::ParseError& e) {
    std::fprintf(stderr, "error: malformed input: %s\n", e.what());
    return 3;
  } catch (const suction::IoError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 3;
  } catch (const suction::EmptyDataset& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 4;
  } catch (const suction::ShapeMismatch& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 5;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
}
