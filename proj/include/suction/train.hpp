// Denoiser training: per-scene noising draws, analytic backpropagation
// through the three-branch fusion, plain SGD.
#pragma once

#include <utility>
#include <vector>

#include "suction/denoiser.hpp"

namespace suction {

struct TrainConfig {
  int t_train = 20;      // total diffusion steps
  int batch_scenes = 1;  // scenes per SGD update
  double lr = 0.05;
  int epochs = 200;
  uint64_t seed = 0;
  double scale = 0.5;
  int hidden = 64;
  int time_dim = 16;
};

struct TrainScene {
  ConditionFeatures features;
  ScoreMap scores;  // ground-truth combined scores in [0, 1]
};

struct TrainResult {
  DenoiserParams params;
  DiffusionSchedule schedule;
  std::vector<double> loss_curve;  // mean scene loss per epoch
};

// Mean squared error over points.
inline double mse(const ScoreMap& a, const ScoreMap& b) {
  if (a.size() != b.size()) throw ShapeMismatch("mse: length mismatch");
  double s = 0.0;
  for (size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    s += d * d;
  }
  return a.empty() ? 0.0 : s / static_cast<double>(a.size());
}

// Loss of one noising draw: || target - denoise(x_t, t, F) ||^2 / N.
inline double training_loss(const DenoiserParams& p, const ConditionFeatures& feats,
                            const ScoreMap& x_t, int t, const ScoreMap& target_scaled) {
  return mse(target_scaled, denoise(p, x_t, t, feats));
}

// Same loss with analytic gradients for every parameter group.
inline std::pair<double, DenoiserParams> loss_and_grad(const DenoiserParams& p,
                                                       const ConditionFeatures& feats,
                                                       const ScoreMap& x_t, int t,
                                                       const ScoreMap& target_scaled) {
  detail::check_denoise_shapes(p, x_t, feats);
  if (target_scaled.size() != x_t.size()) throw ShapeMismatch("loss_and_grad: target length");
  const int h = p.hidden;
  const size_t n = x_t.size();
  const double inv_n = n ? 1.0 / static_cast<double>(n) : 0.0;

  const std::vector<double> emb = time_embedding(t, p.time_dim);
  const std::vector<double> at = detail::time_branch(p, t);

  DenoiserParams grad = DenoiserParams::zeros(p.hidden, p.time_dim, p.n_features);
  std::vector<double> ax(h), af(h), hbuf(h), gate(h), dh(h), dzg(h), sum_dzt(h, 0.0);
  double loss = 0.0;

  for (size_t i = 0; i < n; ++i) {
    const double x = x_t[i];
    const double* f = feats.row(i);

    for (int j = 0; j < h; ++j) {
      ax[j] = std::tanh(p.wx[j] * x + p.bx[j]);
      double zf = p.bf[j];
      const double* row = p.wf.data() + static_cast<size_t>(j) * p.n_features;
      for (int c = 0; c < p.n_features; ++c) zf += row[c] * f[c];
      af[j] = std::tanh(zf);
      hbuf[j] = ax[j] + at[j] + af[j];
    }
    for (int j = 0; j < h; ++j) {
      double zg = p.bg[j];
      const double* row = p.wg.data() + static_cast<size_t>(j) * h;
      for (int c = 0; c < h; ++c) zg += row[c] * hbuf[c];
      gate[j] = sigmoid(zg);
    }
    double pred = p.bo + x;
    for (int j = 0; j < h; ++j) pred += p.wo[j] * hbuf[j] * gate[j];

    const double err = pred - target_scaled[i];
    loss += err * err * inv_n;
    const double dout = 2.0 * err * inv_n;

    grad.bo += dout;
    for (int j = 0; j < h; ++j) {
      grad.wo[j] += dout * hbuf[j] * gate[j];
      const double dfused = dout * p.wo[j];
      dzg[j] = dfused * hbuf[j] * gate[j] * (1.0 - gate[j]);
      dh[j] = dfused * gate[j];
      grad.bg[j] += dzg[j];
    }
    for (int j = 0; j < h; ++j) {
      double* row = grad.wg.data() + static_cast<size_t>(j) * h;
      for (int c = 0; c < h; ++c) row[c] += dzg[j] * hbuf[c];
    }
    for (int c = 0; c < h; ++c) {
      double acc = 0.0;
      for (int j = 0; j < h; ++j) acc += dzg[j] * p.wg[static_cast<size_t>(j) * h + c];
      dh[c] += acc;
    }
    for (int j = 0; j < h; ++j) {
      const double dzx = dh[j] * (1.0 - ax[j] * ax[j]);
      grad.wx[j] += dzx * x;
      grad.bx[j] += dzx;
      sum_dzt[j] += dh[j] * (1.0 - at[j] * at[j]);
      const double dzf = dh[j] * (1.0 - af[j] * af[j]);
      grad.bf[j] += dzf;
      double* row = grad.wf.data() + static_cast<size_t>(j) * p.n_features;
      for (int c = 0; c < p.n_features; ++c) row[c] += dzf * f[c];
    }
  }

  // Time branch is shared across points; fold the accumulated deltas once.
  for (int j = 0; j < h; ++j) {
    grad.bt[j] += sum_dzt[j];
    double* row = grad.wt.data() + static_cast<size_t>(j) * p.time_dim;
    for (int e = 0; e < p.time_dim; ++e) row[e] += sum_dzt[j] * emb[e];
  }
  return {loss, std::move(grad)};
}

// Minimizes the mean draw loss over the dataset with SGD. Deterministic for
// a given config seed.
inline TrainResult train(const std::vector<TrainScene>& dataset, const TrainConfig& cfg) {
  if (dataset.empty()) throw EmptyDataset("train: dataset is empty");
  if (cfg.t_train < 1) throw BadT("train: t_train must be >= 1");
  if (!(cfg.lr > 0.0)) throw OutOfRange("train: learning rate must be positive");

  TrainResult result;
  result.schedule = cosine_schedule(cfg.t_train, cfg.scale);

  Rng init_rng(mix_seed(cfg.seed, 0x496e6974ull));
  result.params = DenoiserParams::random_init(init_rng, cfg.hidden, cfg.time_dim);
  Rng draw_rng(mix_seed(cfg.seed, 0x44726177ull));

  std::vector<ScoreMap> targets(dataset.size());
  for (size_t k = 0; k < dataset.size(); ++k) {
    if (dataset[k].features.rows != dataset[k].scores.size()) {
      throw ShapeMismatch("train: scene " + std::to_string(k) + " features vs scores");
    }
    for (double s : dataset[k].scores) {
      if (!(s >= 0.0 && s <= 1.0)) {
        throw OutOfRange("train: ground-truth scores must lie in [0, 1]");
      }
    }
    targets[k] = scale_signal(dataset[k].scores, cfg.scale);
  }

  const int batch = std::max(1, cfg.batch_scenes);
  ScoreMap eps;
  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    double epoch_loss = 0.0;
    size_t k = 0;
    while (k < dataset.size()) {
      const size_t k_begin = k;
      const size_t k_end = std::min(dataset.size(), k + batch);
      DenoiserParams acc = DenoiserParams::zeros(cfg.hidden, cfg.time_dim);
      for (; k < k_end; ++k) {
        const int t = static_cast<int>(draw_rng.uniform_int(1, cfg.t_train));
        eps.resize(targets[k].size());
        for (double& e : eps) e = draw_rng.gaussian();
        const ScoreMap x_t = forward_sample(targets[k], t, result.schedule, eps);
        auto [loss, grad] = loss_and_grad(result.params, dataset[k].features, x_t, t, targets[k]);
        epoch_loss += loss;
        acc.axpy(1.0, grad);
      }
      result.params.axpy(-cfg.lr / static_cast<double>(k_end - k_begin), acc);
    }
    result.loss_curve.push_back(epoch_loss / static_cast<double>(dataset.size()));
  }
  return result;
}

}  // namespace suction
