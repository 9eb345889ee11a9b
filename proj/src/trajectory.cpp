#include "scorex/trajectory.hpp"

#include <cmath>

namespace scorex {

namespace {

void check_probability_range(const std::vector<float>& values) {
  for (float v : values) {
    require(std::isfinite(v) && v >= 0.0f && v <= 1.0f, ErrorCode::ShapeMismatch,
            "probability outside [0,1]");
  }
}

}  // namespace

ProbTrajectory::ProbTrajectory(std::size_t epochs_, std::size_t samples_,
                               std::vector<float> values_)
    : epochs(epochs_), samples(samples_), values(std::move(values_)) {
  require(values.size() == epochs * samples, ErrorCode::ShapeMismatch,
          "prob trajectory data does not match (E, n)");
  check_probability_range(values);
}

ProbTrajectory ProbTrajectory::from_tensor(const DenseTensor& t) {
  require(t.rank() == 2, ErrorCode::ShapeMismatch,
          "prob trajectory tensor must have shape (E, n)");
  return ProbTrajectory(t.shape[0], t.shape[1], t.data);
}

std::vector<float> ProbTrajectory::sample_series(std::size_t sample) const {
  std::vector<float> out(epochs);
  for (std::size_t e = 0; e < epochs; ++e) out[e] = at(e, sample);
  return out;
}

DistTrajectory::DistTrajectory(std::size_t epochs_, std::size_t samples_, std::size_t classes_,
                               std::vector<float> values_)
    : epochs(epochs_), samples(samples_), classes(classes_), values(std::move(values_)) {
  require(values.size() == epochs * samples * classes, ErrorCode::ShapeMismatch,
          "dist trajectory data does not match (E, n, C)");
  require(classes >= 1, ErrorCode::ShapeMismatch, "need at least one class");
  check_probability_range(values);
  for (std::size_t e = 0; e < epochs; ++e) {
    for (std::size_t i = 0; i < samples; ++i) {
      double sum = 0.0;
      for (float v : dist(e, i)) sum += v;
      require(std::fabs(sum - 1.0) <= 1e-4, ErrorCode::ShapeMismatch,
              "distribution does not sum to 1 within 1e-4");
    }
  }
}

DistTrajectory DistTrajectory::from_tensor(const DenseTensor& t) {
  require(t.rank() == 3, ErrorCode::ShapeMismatch,
          "dist trajectory tensor must have shape (E, n, C)");
  return DistTrajectory(t.shape[0], t.shape[1], t.shape[2], t.data);
}

DenseTensor DistTrajectory::to_tensor() const {
  return DenseTensor({epochs, samples, classes}, values);
}

ProbTrajectory select_label_column(const DistTrajectory& traj,
                                   std::span<const std::int32_t> labels) {
  require(labels.size() == traj.samples, ErrorCode::ShapeMismatch,
          "label vector length does not match sample count");
  std::vector<float> values(traj.epochs * traj.samples);
  for (std::size_t i = 0; i < traj.samples; ++i) {
    const std::int32_t c = labels[i];
    require(c >= 0 && static_cast<std::size_t>(c) < traj.classes, ErrorCode::LabelOutOfRange,
            "label " + std::to_string(c) + " outside class range");
    for (std::size_t e = 0; e < traj.epochs; ++e) {
      values[e * traj.samples + i] = traj.dist(e, i)[static_cast<std::size_t>(c)];
    }
  }
  return ProbTrajectory(traj.epochs, traj.samples, std::move(values));
}

}  // namespace scorex
