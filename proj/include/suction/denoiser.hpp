// Conditional per-point denoiser: three affine input branches (noisy score,
// time embedding, condition features) fused by addition, a sigmoid channel
// gate, and a residual output head predicting the scaled x0.
#pragma once

#include <cmath>
#include <vector>

#include "suction/diffusion.hpp"
#include "suction/features.hpp"
#include "suction/rng.hpp"

namespace suction {

// Sin/cos pairs at geometric frequencies, 10000^(-2j/E).
inline std::vector<double> time_embedding(int t, int dim) {
  if (dim < 2 || dim % 2 != 0) throw OutOfRange("time_embedding: dim must be even and >= 2");
  std::vector<double> emb(dim);
  for (int j = 0; j < dim / 2; ++j) {
    const double freq = std::pow(10000.0, -2.0 * j / dim);
    emb[2 * j] = std::sin(t * freq);
    emb[2 * j + 1] = std::cos(t * freq);
  }
  return emb;
}

struct DenoiserParams {
  int hidden = 64;
  int time_dim = 16;
  int n_features = ConditionFeatures::kCount;

  std::vector<double> wx, bx;  // H, H        score branch (1 -> H)
  std::vector<double> wt, bt;  // H*E, H      time branch (E -> H)
  std::vector<double> wf, bf;  // H*F, H      condition branch (F -> H)
  std::vector<double> wg, bg;  // H*H, H      channel gate (H -> H)
  std::vector<double> wo;      // H           output head (H -> 1)
  double bo = 0.0;

  static DenoiserParams zeros(int hidden = 64, int time_dim = 16,
                              int n_features = ConditionFeatures::kCount) {
    DenoiserParams p;
    p.hidden = hidden;
    p.time_dim = time_dim;
    p.n_features = n_features;
    p.wx.assign(hidden, 0.0);
    p.bx.assign(hidden, 0.0);
    p.wt.assign(static_cast<size_t>(hidden) * time_dim, 0.0);
    p.bt.assign(hidden, 0.0);
    p.wf.assign(static_cast<size_t>(hidden) * n_features, 0.0);
    p.bf.assign(hidden, 0.0);
    p.wg.assign(static_cast<size_t>(hidden) * hidden, 0.0);
    p.bg.assign(hidden, 0.0);
    p.wo.assign(hidden, 0.0);
    p.bo = 0.0;
    return p;
  }

  // Uniform +-1/sqrt(fan_in) weights, zero biases.
  static DenoiserParams random_init(Rng& rng, int hidden = 64, int time_dim = 16,
                                    int n_features = ConditionFeatures::kCount) {
    DenoiserParams p = zeros(hidden, time_dim, n_features);
    const auto fill = [&rng](std::vector<double>& w, int fan_in) {
      const double bound = 1.0 / std::sqrt(static_cast<double>(fan_in));
      for (double& v : w) v = rng.uniform(-bound, bound);
    };
    fill(p.wx, 1);
    fill(p.wt, time_dim);
    fill(p.wf, n_features);
    fill(p.wg, hidden);
    fill(p.wo, hidden);
    return p;
  }

  size_t parameter_count() const {
    return wx.size() + bx.size() + wt.size() + bt.size() + wf.size() + bf.size() + wg.size() +
           bg.size() + wo.size() + 1;
  }

  // Flat coordinate view in a fixed order; shared by SGD updates and
  // finite-difference checks.
  double& param(size_t i) {
    for (auto* group : {&wx, &bx, &wt, &bt, &wf, &bf, &wg, &bg, &wo}) {
      if (i < group->size()) return (*group)[i];
      i -= group->size();
    }
    return bo;
  }
  const double& param(size_t i) const { return const_cast<DenoiserParams*>(this)->param(i); }

  void axpy(double a, const DenoiserParams& g) {
    const auto acc = [a](std::vector<double>& dst, const std::vector<double>& src) {
      for (size_t i = 0; i < dst.size(); ++i) dst[i] += a * src[i];
    };
    acc(wx, g.wx); acc(bx, g.bx);
    acc(wt, g.wt); acc(bt, g.bt);
    acc(wf, g.wf); acc(bf, g.bf);
    acc(wg, g.wg); acc(bg, g.bg);
    acc(wo, g.wo);
    bo += a * g.bo;
  }
};

namespace detail {

inline void check_denoise_shapes(const DenoiserParams& p, const ScoreMap& x,
                                 const ConditionFeatures& feats) {
  if (feats.rows != x.size()) throw ShapeMismatch("denoise: score map vs features row count");
  if (p.n_features != ConditionFeatures::kCount) {
    throw ShapeMismatch("denoise: model n_features does not match the condition features");
  }
}

// Shared time-branch activation (identical for every point at a given t).
inline std::vector<double> time_branch(const DenoiserParams& p, int t) {
  const std::vector<double> emb = time_embedding(t, p.time_dim);
  std::vector<double> at(p.hidden);
  for (int j = 0; j < p.hidden; ++j) {
    double z = p.bt[j];
    const double* row = p.wt.data() + static_cast<size_t>(j) * p.time_dim;
    for (int e = 0; e < p.time_dim; ++e) z += row[e] * emb[e];
    at[j] = std::tanh(z);
  }
  return at;
}

}  // namespace detail

// Predicted scaled x0 per point. Deterministic and permutation-equivariant.
inline ScoreMap denoise(const DenoiserParams& p, const ScoreMap& x_t, int t,
                        const ConditionFeatures& feats) {
  detail::check_denoise_shapes(p, x_t, feats);
  const int h = p.hidden;
  const std::vector<double> at = detail::time_branch(p, t);

  ScoreMap out(x_t.size());
  std::vector<double> hbuf(h), gate(h);
  for (size_t i = 0; i < x_t.size(); ++i) {
    const double x = x_t[i];
    const double* f = feats.row(i);
    for (int j = 0; j < h; ++j) {
      const double ax = std::tanh(p.wx[j] * x + p.bx[j]);
      double zf = p.bf[j];
      const double* row = p.wf.data() + static_cast<size_t>(j) * p.n_features;
      for (int c = 0; c < p.n_features; ++c) zf += row[c] * f[c];
      hbuf[j] = ax + at[j] + std::tanh(zf);
    }
    for (int j = 0; j < h; ++j) {
      double zg = p.bg[j];
      const double* row = p.wg.data() + static_cast<size_t>(j) * h;
      for (int c = 0; c < h; ++c) zg += row[c] * hbuf[c];
      gate[j] = sigmoid(zg);
    }
    double y = p.bo + x;  // residual into the prediction pathway
    for (int j = 0; j < h; ++j) y += p.wo[j] * hbuf[j] * gate[j];
    out[i] = y;
  }
  return out;
}

}  // namespace suction
