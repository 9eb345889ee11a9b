#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "scorex/graph.hpp"
#include "scorex/rng.hpp"
#include "scorex/tensor.hpp"

namespace scorex {

using RowMat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// Parameter storage aligned for Eigen's vectorized kernels. Alignment keeps
/// mapped-buffer code paths identical across runs, which the bitwise
/// reproducibility contracts depend on.
using ParamVector = std::vector<double, Eigen::aligned_allocator<double>>;

struct GcnDims {
  std::size_t in = 0;
  std::size_t h1 = 512;
  std::size_t h2 = 256;
  std::size_t h3 = 256;
};

/// Three graph-convolution layers plus a scalar output head. Parameters live
/// in one contiguous buffer so the optimizer and the finite-difference tests
/// can treat the model as a flat vector.
struct GcnModel {
  GcnDims dims;
  ParamVector params;

  static GcnModel init(const GcnDims& dims, Rng& rng);

  std::size_t param_count() const;
  std::size_t off_w1() const { return 0; }
  std::size_t off_b1() const { return off_w1() + dims.in * dims.h1; }
  std::size_t off_w2() const { return off_b1() + dims.h1; }
  std::size_t off_b2() const { return off_w2() + dims.h1 * dims.h2; }
  std::size_t off_w3() const { return off_b2() + dims.h2; }
  std::size_t off_b3() const { return off_w3() + dims.h2 * dims.h3; }
  std::size_t off_w_out() const { return off_b3() + dims.h3; }
  std::size_t off_b_out() const { return off_w_out() + dims.h3; }

  Eigen::Map<const RowMat> w1() const;
  Eigen::Map<const RowMat> w2() const;
  Eigen::Map<const RowMat> w3() const;
  Eigen::Map<const Eigen::VectorXd> b1() const;
  Eigen::Map<const Eigen::VectorXd> b2() const;
  Eigen::Map<const Eigen::VectorXd> b3() const;
  Eigen::Map<const Eigen::VectorXd> w_out() const;
  double b_out() const { return params[off_b_out()]; }
};

/// One layer of a neighbor-sampled computation subgraph: rows are output
/// frontier nodes, columns index into the input frontier, values come from
/// the globally normalized adjacency.
struct Block {
  std::size_t n_out = 0;
  std::size_t n_in = 0;
  std::vector<std::size_t> row_ptr;
  std::vector<std::int32_t> col;
  std::vector<double> value;
};

struct ComputationSubgraph {
  std::vector<std::int32_t> batch;                   // output nodes, in batch order
  std::vector<std::vector<std::int32_t>> frontiers;  // [0] innermost .. [hops] == batch
  std::vector<Block> blocks;                         // blocks[l]: frontiers[l] -> frontiers[l+1]
};

/// Builds the blocks needed for a `hops`-layer forward pass over `batch`.
/// Per frontier node at most `fanout` neighbors are sampled uniformly
/// without replacement; the node itself always joins the next frontier.
/// fanout >= degree keeps all neighbors and draws nothing from the rng, so
/// a saturating fanout reproduces unsampled training exactly.
ComputationSubgraph sample_neighborhood(const SampleGraph& graph,
                                        const NormalizedAdjacency& norm,
                                        std::span<const std::int32_t> batch,
                                        std::size_t fanout, int hops, Rng& rng,
                                        bool sampling_enabled = true);

struct ForwardCache {
  RowMat m1, z1, d1;
  RowMat m2, z2, d2;
  RowMat m3, z3, h3;
  RowMat mask1, mask2;  // dropout multipliers, empty when dropout inactive
  Eigen::VectorXd out;
};

/// Forward pass over a 3-block computation subgraph. Dropout (inverted, rate
/// cfg) applies to the inputs of layers 2 and 3 when active.
Eigen::VectorXd gcn_forward(const GcnModel& model, const ComputationSubgraph& sub,
                            std::span<const float> features, std::size_t feature_dim,
                            bool dropout_active, double dropout_rate, Rng* dropout_rng,
                            ForwardCache* cache = nullptr);

/// Gradient of a scalar loss w.r.t. all parameters given d(loss)/d(out).
ParamVector gcn_backward(const GcnModel& model, const ComputationSubgraph& sub,
                                 const ForwardCache& cache,
                                 const Eigen::VectorXd& out_grad);

/// Mean squared error over masked nodes only.
double masked_mse(std::span<const double> preds, std::span<const double> targets,
                  const std::vector<bool>& mask);

/// Full-graph forward pass (no sampling, dropout off); one score per node.
std::vector<double> gnn_extrapolate(const GcnModel& model, const SampleGraph& graph);
std::vector<double> gcn_full_forward(const GcnModel& model, const NormalizedAdjacency& norm,
                                     std::span<const float> features, std::size_t feature_dim);

struct GnnTrainConfig {
  int epochs = 25;
  std::size_t batch_nodes = 128;
  std::size_t fanout = 10;
  int hops = 3;
  bool neighbor_sampling = true;
  double val_fraction = 0.1;
  double learning_rate = 1e-3;
  double dropout = 0.5;
  std::size_t hidden1 = 512;
  std::size_t hidden2 = 256;
  std::size_t hidden3 = 256;
  std::uint64_t seed = 0;

  void validate() const;
};

struct EpochStats {
  double train_loss = 0.0;
  double val_pearson = 0.0;
};

struct GnnTrainResult {
  GcnModel model;  // parameters of the best-validation-Pearson epoch
  std::vector<EpochStats> history;
  int best_epoch = 0;  // 1-based
  std::vector<std::int32_t> train_ids;
  std::vector<std::int32_t> val_ids;
};

/// Trains on the in_subset rows of `subset_scores` (90/10 train/val split),
/// minimizing masked MSE over neighbor-sampled batches, and returns the
/// checkpoint with the highest validation Pearson.
GnnTrainResult train_gnn(const SampleGraph& graph, const ScoreTable& subset_scores,
                         const GnnTrainConfig& cfg);

/// Checkpoint bundle: one tensor file per parameter plus a manifest with
/// names, shapes and a config echo.
void save_gcn_model(const std::filesystem::path& dir, const GcnModel& model,
                    const std::vector<std::pair<std::string, std::string>>& config_echo = {});
GcnModel load_gcn_model(const std::filesystem::path& dir);

}  // namespace scorex
