// DDIM sampling: deterministic reverse chain from Gaussian noise to scores.
#pragma once

#include <functional>
#include <vector>

#include "suction/denoiser.hpp"
#include "suction/diffusion.hpp"

namespace suction {

// Runs the deterministic reverse chain over a validated descending step grid.
// `predict(x, t)` returns the model's scaled-x0 estimate. Because the grid
// ends at 0 (alpha_bar = 1), the returned map equals the final prediction.
template <class Predict>
ScoreMap ddim_chain(Predict&& predict, ScoreMap x, const DiffusionSchedule& sched,
                    const std::vector<int>& grid) {
  validate_step_grid(grid, sched.total_steps);
  for (size_t j = 0; j + 1 < grid.size(); ++j) {
    const ScoreMap x0_pred = predict(x, grid[j]);
    x = ddim_step(x, x0_pred, grid[j], grid[j + 1], sched);
  }
  return x;
}

inline ScoreMap gaussian_map(size_t n, Rng& rng) {
  ScoreMap x(n);
  for (double& v : x) v = rng.gaussian();
  return x;
}

// Final scores in [0, 1] for an explicit step grid.
inline ScoreMap sample_with_grid(const DenoiserParams& params, const ConditionFeatures& feats,
                                 const DiffusionSchedule& sched, const std::vector<int>& grid,
                                 uint64_t seed) {
  Rng rng(mix_seed(seed, 0x53616d70ull));
  ScoreMap x = gaussian_map(feats.rows, rng);
  x = ddim_chain(
      [&](const ScoreMap& xt, int t) { return denoise(params, xt, t, feats); }, std::move(x),
      sched, grid);
  return inverse_scale_signal(x, sched.scale);
}

// Uniformly spaced descending sub-schedule of length n_steps from T to 0.
inline ScoreMap sample(const DenoiserParams& params, const ConditionFeatures& feats,
                       const DiffusionSchedule& sched, int n_steps, uint64_t seed) {
  return sample_with_grid(params, feats, sched, inference_step_grid(sched.total_steps, n_steps),
                          seed);
}

}  // namespace suction
