#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "scorex/trajectory.hpp"

namespace scorex {

struct ScorerConfig {
  int window = 10;           // J
  double beta = 0.9;         // exponential decay, tdds only
  double prob_floor = 1e-12; // clamp before logarithms
  int threads = 1;

  void validate() const;
};

/// Sample standard deviation (divisor J-1) of one sliding window.
double du_window_std(std::span<const float> window_probs);

/// Dynamic Uncertainty: mean of window standard deviations over windows
/// k = 0..E-J-1, normalized by 1/(E-J). Needs E >= J+1.
std::vector<double> du_score(const ProbTrajectory& traj, const ScorerConfig& cfg);

/// Argmax class per sample, ties broken by lowest class index.
std::vector<std::int32_t> pseudo_labels(std::span<const float> dists, std::size_t samples,
                                        std::size_t classes);

/// DU over the pseudo-label column, pseudo-labels taken from the final epoch.
std::vector<double> unsupervised_du(const DistTrajectory& traj, const ScorerConfig& cfg);

/// KL divergence of p_next from p_prev with both log arguments clamped to
/// prob_floor: sum_c p_next_c * ln(clamp(p_next_c) / clamp(p_prev_c)).
double tdds_delta(std::span<const float> p_prev, std::span<const float> p_next,
                  double prob_floor);

/// TDDS: exponentially decayed within-window variance of |delta|, deltas
/// pairing consecutive epochs. E snapshots give K = E-1 deltas; needs E >= J+2.
std::vector<double> tdds_score(const DistTrajectory& traj, const ScorerConfig& cfg);

}  // namespace scorex
