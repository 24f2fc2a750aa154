// Diffusion schedule, signal scaling, forward noising and the deterministic
// DDIM reverse step.
#pragma once

#include <cmath>
#include <vector>

#include "suction/core.hpp"

namespace suction {

using ScoreMap = std::vector<double>;

struct DiffusionSchedule {
  int total_steps = 0;            // T
  std::vector<double> alpha_bar;  // T+1 values, alpha_bar[0] = 1, strictly decreasing
  double scale = 0.5;             // signal scaling factor
};

// Monotone cosine schedule: alpha_bar(t) = f(t/T) / f(0) with
// f(u) = cos^2(((u + s) / (1 + s)) * pi/2), s = 0.008; clipped to >= 1e-8.
inline DiffusionSchedule cosine_schedule(int total_steps, double scale = 0.5) {
  if (total_steps < 1) throw BadT("cosine_schedule: T must be >= 1");
  if (!(scale > 0.0 && scale <= 1.0)) throw OutOfRange("cosine_schedule: scale must be in (0, 1]");
  constexpr double s = 0.008;
  const auto f = [&](double u) {
    const double c = std::cos((u + s) / (1.0 + s) * kPi / 2.0);
    return c * c;
  };
  DiffusionSchedule sched;
  sched.total_steps = total_steps;
  sched.scale = scale;
  sched.alpha_bar.resize(total_steps + 1);
  const double f0 = f(0.0);
  for (int t = 0; t <= total_steps; ++t) {
    sched.alpha_bar[t] = std::max(f(static_cast<double>(t) / total_steps) / f0, 1e-8);
  }
  sched.alpha_bar[0] = 1.0;
  for (int t = 1; t <= total_steps; ++t) {
    if (!(sched.alpha_bar[t] < sched.alpha_bar[t - 1])) {
      throw BadT("cosine_schedule: clipping broke strict monotonicity; T too large");
    }
  }
  return sched;
}

// Per-step noise beta_t = 1 - alpha_bar_t / alpha_bar_{t-1}, t in [1, T].
inline double step_beta(const DiffusionSchedule& sched, int t) {
  if (t < 1 || t > sched.total_steps) throw BadSteps("step_beta: t out of range");
  return 1.0 - sched.alpha_bar[t] / sched.alpha_bar[t - 1];
}

// Transition variance of the stochastic reverse process,
// beta~_t = (1 - alpha_bar_{t-1}) / (1 - alpha_bar_t) * beta_t. Unused by the
// deterministic DDIM sampler (eta = 0) but part of the schedule contract.
inline double transition_variance(const DiffusionSchedule& sched, int t) {
  const double beta = step_beta(sched, t);
  return (1.0 - sched.alpha_bar[t - 1]) / (1.0 - sched.alpha_bar[t]) * beta;
}

inline double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

// (sigmoid(x) * 2 - 1) * scale, per element. Maps [0, 1] scores into the
// positive half of (-scale, scale).
inline ScoreMap scale_signal(const ScoreMap& x, double scale) {
  ScoreMap out(x.size());
  for (size_t i = 0; i < x.size(); ++i) out[i] = (sigmoid(x[i]) * 2.0 - 1.0) * scale;
  return out;
}

// Exact inverse of scale_signal, clamped back into [0, 1].
inline ScoreMap inverse_scale_signal(const ScoreMap& x, double scale) {
  ScoreMap out(x.size());
  for (size_t i = 0; i < x.size(); ++i) {
    const double y = std::clamp((x[i] / scale + 1.0) / 2.0, 1e-12, 1.0 - 1e-12);
    out[i] = clamp01(std::log(y / (1.0 - y)));
  }
  return out;
}

// x_t = sqrt(alpha_bar_t) * x0 + sqrt(1 - alpha_bar_t) * eps
inline ScoreMap forward_sample(const ScoreMap& x0_scaled, int t, const DiffusionSchedule& sched,
                               const ScoreMap& eps) {
  if (t < 0 || t > sched.total_steps) throw BadSteps("forward_sample: t out of range");
  if (eps.size() != x0_scaled.size()) throw ShapeMismatch("forward_sample: eps length mismatch");
  const double a = sched.alpha_bar[t];
  const double signal = std::sqrt(a);
  const double noise = std::sqrt(1.0 - a);
  ScoreMap out(x0_scaled.size());
  for (size_t i = 0; i < out.size(); ++i) out[i] = signal * x0_scaled[i] + noise * eps[i];
  return out;
}

// Deterministic DDIM update (eta = 0): recover eps_hat from the predicted
// x0 and renoise it at the earlier step.
inline ScoreMap ddim_step(const ScoreMap& x_t, const ScoreMap& x0_pred, int t, int t_prev,
                          const DiffusionSchedule& sched) {
  if (!(0 <= t_prev && t_prev < t && t <= sched.total_steps)) {
    throw BadSteps("ddim_step: need 0 <= t_prev < t <= T");
  }
  if (x_t.size() != x0_pred.size()) throw ShapeMismatch("ddim_step: length mismatch");
  const double a_t = sched.alpha_bar[t];
  const double a_p = sched.alpha_bar[t_prev];
  const double sa_t = std::sqrt(a_t);
  const double sa_p = std::sqrt(a_p);
  const double sn_t = std::sqrt(1.0 - a_t);
  const double sn_p = std::sqrt(1.0 - a_p);
  ScoreMap out(x_t.size());
  for (size_t i = 0; i < out.size(); ++i) {
    const double eps_hat = (x_t[i] - sa_t * x0_pred[i]) / sn_t;
    out[i] = sa_p * x0_pred[i] + sn_p * eps_hat;
  }
  return out;
}

// Uniformly spaced descending step grid from T to 0 with n_steps reverse
// updates (duplicates collapse when n_steps > T).
inline std::vector<int> inference_step_grid(int total_steps, int n_steps) {
  if (n_steps < 1) throw BadSteps("inference_step_grid: need at least one step");
  std::vector<int> grid;
  grid.reserve(n_steps + 1);
  for (int j = 0; j <= n_steps; ++j) {
    const int t = static_cast<int>(
        std::llround(static_cast<double>(total_steps) * (n_steps - j) / n_steps));
    if (grid.empty() || t < grid.back()) grid.push_back(t);
  }
  return grid;
}

inline void validate_step_grid(const std::vector<int>& grid, int total_steps) {
  if (grid.size() < 2) throw BadSteps("step grid: need at least two entries");
  if (grid.front() > total_steps || grid.back() != 0) {
    throw BadSteps("step grid: must start within [1, T] and end at 0");
  }
  for (size_t i = 1; i < grid.size(); ++i) {
    if (!(grid[i] < grid[i - 1])) throw BadSteps("step grid: must be strictly decreasing");
  }
}

}  // namespace suction
