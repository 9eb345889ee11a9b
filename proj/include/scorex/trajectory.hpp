#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "scorex/tensor.hpp"

namespace scorex {

/// Per-epoch true-class probability for every sample, shape (E, n).
struct ProbTrajectory {
  std::size_t epochs = 0;
  std::size_t samples = 0;
  std::vector<float> values;  // row-major (E, n)

  ProbTrajectory() = default;
  ProbTrajectory(std::size_t epochs_, std::size_t samples_, std::vector<float> values_);

  static ProbTrajectory from_tensor(const DenseTensor& t);

  float at(std::size_t epoch, std::size_t sample) const {
    return values[epoch * samples + sample];
  }
  /// Probability of one sample across epochs.
  std::vector<float> sample_series(std::size_t sample) const;
};

/// Per-epoch full softmax outputs for every sample, shape (E, n, C).
/// Each length-C slice must sum to 1 within 1e-4.
struct DistTrajectory {
  std::size_t epochs = 0;
  std::size_t samples = 0;
  std::size_t classes = 0;
  std::vector<float> values;  // row-major (E, n, C)

  DistTrajectory() = default;
  DistTrajectory(std::size_t epochs_, std::size_t samples_, std::size_t classes_,
                 std::vector<float> values_);

  static DistTrajectory from_tensor(const DenseTensor& t);

  std::span<const float> dist(std::size_t epoch, std::size_t sample) const {
    return {values.data() + (epoch * samples + sample) * classes, classes};
  }
  float* mutable_dist(std::size_t epoch, std::size_t sample) {
    return values.data() + (epoch * samples + sample) * classes;
  }
  DenseTensor to_tensor() const;
};

/// ProbTrajectory obtained by picking one class column per sample.
ProbTrajectory select_label_column(const DistTrajectory& traj,
                                   std::span<const std::int32_t> labels);

}  // namespace scorex
