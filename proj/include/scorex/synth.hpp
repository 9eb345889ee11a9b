#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "scorex/tensor.hpp"
#include "scorex/trajectory.hpp"

namespace scorex {

struct BlobDatasetConfig {
  std::int64_t n = 1000;    // training samples
  int classes = 5;
  int dim = 8;
  double sigma = 1.0;       // cluster spread
  double noise_rate = 0.0;  // fraction of samples with re-drawn labels
  std::int64_t n_test = 200;
  double box = 10.0;        // cluster means drawn uniformly in [0, box]^dim
  std::uint64_t seed = 0;

  void validate() const;
};

/// Gaussian blob classification task. Labels are assigned round-robin so
/// class counts differ by at most one; a noise_rate fraction of training
/// labels is re-drawn uniformly over all classes.
struct BlobDataset {
  BlobDatasetConfig cfg;
  std::vector<float> x;                  // n x dim
  std::vector<std::int32_t> labels;      // observed (possibly noisy)
  std::vector<std::int32_t> true_labels;
  std::vector<std::uint8_t> noisy;       // 1 where the label was re-drawn
  std::vector<float> x_test;             // n_test x dim, clean labels
  std::vector<std::int32_t> y_test;
};

BlobDataset gen_blobs(const BlobDatasetConfig& cfg);

struct ProbeConfig {
  int epochs = 30;
  int hidden = 64;
  double learning_rate = 0.1;
  std::size_t batch = 64;
  std::uint64_t seed = 0;
};

/// One training run of the probe classifier: per-epoch softmax outputs for
/// every sample (trained on or not), final-epoch hidden activations as
/// embeddings, and per-epoch test accuracy.
struct ProbeRun {
  DistTrajectory trajectory;          // (E, n, C)
  std::vector<float> embeddings;      // n x hidden
  std::vector<std::int32_t> train_on;
  std::vector<double> test_accuracy;  // per epoch
};

/// Trains a one-hidden-layer relu/softmax network with plain mini-batch SGD
/// on `train_on` (all training samples when absent), recording predictions
/// for the full training set after every epoch.
ProbeRun train_probe(const BlobDataset& dataset, const ProbeConfig& cfg,
                     const std::vector<std::int32_t>* train_on = nullptr);

/// Trains a fresh probe on only the kept samples; returns final test accuracy.
double eval_downstream(const BlobDataset& dataset, const IndexSet& kept,
                       const ProbeConfig& cfg);

}  // namespace scorex
