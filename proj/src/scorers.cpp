#include "scorex/scorers.hpp"

#include <cmath>

#include "scorex/parallel.hpp"

namespace scorex {

void ScorerConfig::validate() const {
  require(window >= 2, ErrorCode::WindowTooShort, "window J must be at least 2");
  require(beta > 0.0 && beta < 1.0, ErrorCode::ConfigInvalid, "beta must lie in (0,1)");
  require(prob_floor > 0.0, ErrorCode::ConfigInvalid, "prob_floor must be positive");
}

double du_window_std(std::span<const float> window_probs) {
  const std::size_t j = window_probs.size();
  require(j >= 2, ErrorCode::WindowTooShort, "window needs at least 2 epochs");
  double mean = 0.0;
  for (float v : window_probs) mean += v;
  mean /= static_cast<double>(j);
  double ss = 0.0;
  for (float v : window_probs) {
    const double d = v - mean;
    ss += d * d;
  }
  return std::sqrt(ss / static_cast<double>(j - 1));
}

std::vector<double> du_score(const ProbTrajectory& traj, const ScorerConfig& cfg) {
  cfg.validate();
  const std::size_t e = traj.epochs;
  const std::size_t j = static_cast<std::size_t>(cfg.window);
  require(e >= j + 1, ErrorCode::TrajectoryTooShort,
          "DU needs at least J+1 epochs (J=" + std::to_string(j) + ", E=" +
              std::to_string(e) + ")");

  const std::size_t n_windows = e - j;  // windows start at 0..E-J-1
  std::vector<double> scores(traj.samples, 0.0);
  parallel_for(traj.samples, cfg.threads, [&](std::size_t i) {
    std::vector<float> series = traj.sample_series(i);
    double acc = 0.0;
    for (std::size_t k = 0; k < n_windows; ++k) {
      acc += du_window_std(std::span<const float>(series).subspan(k, j));
    }
    scores[i] = acc / static_cast<double>(n_windows);
  });
  return scores;
}

std::vector<std::int32_t> pseudo_labels(std::span<const float> dists, std::size_t samples,
                                        std::size_t classes) {
  require(classes >= 1, ErrorCode::ShapeMismatch, "need at least one class");
  require(dists.size() == samples * classes, ErrorCode::ShapeMismatch,
          "distribution block does not match (n, C)");
  std::vector<std::int32_t> labels(samples, 0);
  for (std::size_t i = 0; i < samples; ++i) {
    const float* row = dists.data() + i * classes;
    std::size_t best = 0;
    for (std::size_t c = 1; c < classes; ++c) {
      if (row[c] > row[best]) best = c;  // ties keep the lowest class index
    }
    labels[i] = static_cast<std::int32_t>(best);
  }
  return labels;
}

std::vector<double> unsupervised_du(const DistTrajectory& traj, const ScorerConfig& cfg) {
  cfg.validate();
  require(traj.epochs >= static_cast<std::size_t>(cfg.window) + 1,
          ErrorCode::TrajectoryTooShort, "unsupervised DU needs at least J+1 epochs");
  const std::size_t final_epoch = traj.epochs - 1;
  std::span<const float> final_block(traj.values.data() + final_epoch * traj.samples * traj.classes,
                                     traj.samples * traj.classes);
  const auto labels = pseudo_labels(final_block, traj.samples, traj.classes);
  return du_score(select_label_column(traj, labels), cfg);
}

double tdds_delta(std::span<const float> p_prev, std::span<const float> p_next,
                  double prob_floor) {
  require(p_prev.size() == p_next.size(), ErrorCode::ShapeMismatch,
          "distributions differ in class count");
  double acc = 0.0;
  for (std::size_t c = 0; c < p_prev.size(); ++c) {
    const double prev = std::max(static_cast<double>(p_prev[c]), prob_floor);
    const double next = std::max(static_cast<double>(p_next[c]), prob_floor);
    acc += static_cast<double>(p_next[c]) * std::log(next / prev);
  }
  return acc;
}

std::vector<double> tdds_score(const DistTrajectory& traj, const ScorerConfig& cfg) {
  cfg.validate();
  const std::size_t e = traj.epochs;
  const std::size_t j = static_cast<std::size_t>(cfg.window);
  require(e >= j + 2, ErrorCode::TrajectoryTooShort,
          "TDDS needs at least J+2 epochs (J=" + std::to_string(j) + ", E=" +
              std::to_string(e) + ")");

  // E snapshots give deltas indexed 1..K with K = E-1; delta_k pairs epochs
  // (k-1, k) in storage order.
  const std::size_t k_max = e - 1;
  const double beta = cfg.beta;
  std::vector<double> scores(traj.samples, 0.0);
  parallel_for(traj.samples, cfg.threads, [&](std::size_t i) {
    std::vector<double> abs_delta(k_max + 1, 0.0);  // abs_delta[1..k_max]
    for (std::size_t k = 1; k <= k_max; ++k) {
      abs_delta[k] = std::fabs(tdds_delta(traj.dist(k - 1, i), traj.dist(k, i),
                                          cfg.prob_floor));
    }
    double score = 0.0;
    for (std::size_t k = j; k <= k_max; ++k) {
      double mean = 0.0;
      for (std::size_t w = k - j + 1; w <= k; ++w) mean += abs_delta[w];
      mean /= static_cast<double>(j);
      double var = 0.0;
      for (std::size_t w = k - j + 1; w <= k; ++w) {
        const double d = abs_delta[w] - mean;
        var += d * d;
      }
      score += beta * std::pow(1.0 - beta, static_cast<double>(k_max - k)) * var;
    }
    scores[i] = score;
  });
  return scores;
}

}  // namespace scorex
