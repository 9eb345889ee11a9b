#include "scorex/gcn.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "scorex/metrics.hpp"
#include "scorex/tensor_io.hpp"

namespace scorex {

namespace {

RowMat gather_features(std::span<const float> features, std::size_t feature_dim,
                       std::span<const std::int32_t> nodes) {
  RowMat out(nodes.size(), feature_dim);
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    const float* src = features.data() + static_cast<std::size_t>(nodes[i]) * feature_dim;
    for (std::size_t c = 0; c < feature_dim; ++c) out(static_cast<Eigen::Index>(i), c) = src[c];
  }
  return out;
}

RowMat block_apply(const Block& block, const RowMat& x) {
  RowMat out = RowMat::Zero(static_cast<Eigen::Index>(block.n_out), x.cols());
  for (std::size_t u = 0; u < block.n_out; ++u) {
    for (std::size_t e = block.row_ptr[u]; e < block.row_ptr[u + 1]; ++e) {
      out.row(static_cast<Eigen::Index>(u)) += block.value[e] * x.row(block.col[e]);
    }
  }
  return out;
}

RowMat block_apply_transpose(const Block& block, const RowMat& grad_out) {
  RowMat out = RowMat::Zero(static_cast<Eigen::Index>(block.n_in), grad_out.cols());
  for (std::size_t u = 0; u < block.n_out; ++u) {
    for (std::size_t e = block.row_ptr[u]; e < block.row_ptr[u + 1]; ++e) {
      out.row(block.col[e]) += block.value[e] * grad_out.row(static_cast<Eigen::Index>(u));
    }
  }
  return out;
}

RowMat dropout_mask(std::size_t rows, std::size_t cols, double rate, Rng& rng) {
  RowMat mask(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
  const double keep_scale = 1.0 / (1.0 - rate);
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < cols; ++c) {
      mask(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
          rng.uniform01() >= rate ? keep_scale : 0.0;
    }
  }
  return mask;
}

}  // namespace

std::size_t GcnModel::param_count() const { return off_b_out() + 1; }

Eigen::Map<const RowMat> GcnModel::w1() const {
  return {params.data() + off_w1(), static_cast<Eigen::Index>(dims.in),
          static_cast<Eigen::Index>(dims.h1)};
}
Eigen::Map<const RowMat> GcnModel::w2() const {
  return {params.data() + off_w2(), static_cast<Eigen::Index>(dims.h1),
          static_cast<Eigen::Index>(dims.h2)};
}
Eigen::Map<const RowMat> GcnModel::w3() const {
  return {params.data() + off_w3(), static_cast<Eigen::Index>(dims.h2),
          static_cast<Eigen::Index>(dims.h3)};
}
Eigen::Map<const Eigen::VectorXd> GcnModel::b1() const {
  return {params.data() + off_b1(), static_cast<Eigen::Index>(dims.h1)};
}
Eigen::Map<const Eigen::VectorXd> GcnModel::b2() const {
  return {params.data() + off_b2(), static_cast<Eigen::Index>(dims.h2)};
}
Eigen::Map<const Eigen::VectorXd> GcnModel::b3() const {
  return {params.data() + off_b3(), static_cast<Eigen::Index>(dims.h3)};
}
Eigen::Map<const Eigen::VectorXd> GcnModel::w_out() const {
  return {params.data() + off_w_out(), static_cast<Eigen::Index>(dims.h3)};
}

GcnModel GcnModel::init(const GcnDims& dims, Rng& rng) {
  require(dims.in >= 1 && dims.h1 >= 1 && dims.h2 >= 1 && dims.h3 >= 1,
          ErrorCode::ConfigInvalid, "layer widths must be positive");
  GcnModel model;
  model.dims = dims;
  model.params.assign(model.param_count(), 0.0);
  auto glorot = [&rng](double* data, std::size_t fan_in, std::size_t fan_out) {
    const double limit = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
    for (std::size_t i = 0; i < fan_in * fan_out; ++i) data[i] = rng.uniform(-limit, limit);
  };
  glorot(model.params.data() + model.off_w1(), dims.in, dims.h1);
  glorot(model.params.data() + model.off_w2(), dims.h1, dims.h2);
  glorot(model.params.data() + model.off_w3(), dims.h2, dims.h3);
  glorot(model.params.data() + model.off_w_out(), dims.h3, 1);
  return model;
}

ComputationSubgraph sample_neighborhood(const SampleGraph& graph,
                                        const NormalizedAdjacency& norm,
                                        std::span<const std::int32_t> batch,
                                        std::size_t fanout, int hops, Rng& rng,
                                        bool sampling_enabled) {
  require(!batch.empty(), ErrorCode::EmptyResult, "batch must be nonempty");
  require(hops >= 1, ErrorCode::ConfigInvalid, "need at least one hop");
  for (std::int32_t v : batch) {
    require(v >= 0 && static_cast<std::size_t>(v) < graph.n_nodes, ErrorCode::ShapeMismatch,
            "batch node outside graph");
  }

  ComputationSubgraph sub;
  sub.frontiers.resize(static_cast<std::size_t>(hops) + 1);
  sub.blocks.resize(static_cast<std::size_t>(hops));
  sub.batch.assign(batch.begin(), batch.end());
  sub.frontiers[static_cast<std::size_t>(hops)] = sub.batch;

  std::vector<std::int32_t> local_of(graph.n_nodes, -1);

  for (int layer = hops - 1; layer >= 0; --layer) {
    const auto& out_frontier = sub.frontiers[static_cast<std::size_t>(layer) + 1];
    // per output node: self + sampled neighbors, sorted ascending
    std::vector<std::vector<std::int32_t>> selected(out_frontier.size());
    for (std::size_t i = 0; i < out_frontier.size(); ++i) {
      const std::size_t u = static_cast<std::size_t>(out_frontier[i]);
      const auto nbrs = graph.neighbors(u);
      std::vector<std::int32_t>& sel = selected[i];
      if (!sampling_enabled || fanout >= nbrs.size()) {
        sel.assign(nbrs.begin(), nbrs.end());
      } else {
        std::vector<std::int32_t> pool(nbrs.begin(), nbrs.end());
        for (std::size_t s = 0; s < fanout; ++s) {
          const std::size_t j = s + static_cast<std::size_t>(rng.below(pool.size() - s));
          std::swap(pool[s], pool[j]);
        }
        pool.resize(fanout);
        std::sort(pool.begin(), pool.end());
        sel = std::move(pool);
      }
      // self joins via the normalization self-loop
      sel.insert(std::lower_bound(sel.begin(), sel.end(), out_frontier[i]), out_frontier[i]);
    }

    // input frontier: sorted union
    std::vector<std::int32_t> in_frontier;
    for (const auto& sel : selected) in_frontier.insert(in_frontier.end(), sel.begin(), sel.end());
    std::sort(in_frontier.begin(), in_frontier.end());
    in_frontier.erase(std::unique(in_frontier.begin(), in_frontier.end()), in_frontier.end());
    for (std::size_t i = 0; i < in_frontier.size(); ++i) {
      local_of[static_cast<std::size_t>(in_frontier[i])] = static_cast<std::int32_t>(i);
    }

    Block& block = sub.blocks[static_cast<std::size_t>(layer)];
    block.n_out = out_frontier.size();
    block.n_in = in_frontier.size();
    block.row_ptr.assign(block.n_out + 1, 0);
    for (std::size_t i = 0; i < out_frontier.size(); ++i) {
      block.row_ptr[i + 1] = block.row_ptr[i] + selected[i].size();
    }
    block.col.resize(block.row_ptr.back());
    block.value.resize(block.row_ptr.back());
    for (std::size_t i = 0; i < out_frontier.size(); ++i) {
      const std::size_t u = static_cast<std::size_t>(out_frontier[i]);
      const auto norm_cols = norm.row_cols(u);
      const auto norm_vals = norm.row_values(u);
      std::size_t out_e = block.row_ptr[i];
      std::size_t scan = 0;
      for (std::int32_t v : selected[i]) {
        while (scan < norm_cols.size() && norm_cols[scan] < v) ++scan;
        // selected nodes are always adjacency entries (or self), present in norm
        block.col[out_e] = local_of[static_cast<std::size_t>(v)];
        block.value[out_e] = norm_vals[scan];
        ++out_e;
      }
    }

    for (std::int32_t v : in_frontier) local_of[static_cast<std::size_t>(v)] = -1;
    sub.frontiers[static_cast<std::size_t>(layer)] = std::move(in_frontier);
  }
  return sub;
}

Eigen::VectorXd gcn_forward(const GcnModel& model, const ComputationSubgraph& sub,
                            std::span<const float> features, std::size_t feature_dim,
                            bool dropout_active, double dropout_rate, Rng* dropout_rng,
                            ForwardCache* cache) {
  require(sub.blocks.size() == 3, ErrorCode::ShapeMismatch,
          "forward pass needs a 3-block subgraph");
  require(feature_dim == model.dims.in, ErrorCode::DimensionMismatch,
          "feature width does not match model input width");
  require(!dropout_active || dropout_rng != nullptr, ErrorCode::ConfigInvalid,
          "dropout requires an rng");

  ForwardCache local;
  ForwardCache& c = cache ? *cache : local;

  const RowMat x0 = gather_features(features, feature_dim, sub.frontiers[0]);

  c.m1 = block_apply(sub.blocks[0], x0);
  c.z1 = (c.m1 * model.w1()).rowwise() + model.b1().transpose();
  RowMat h1 = c.z1.cwiseMax(0.0);
  if (dropout_active) {
    c.mask1 = dropout_mask(static_cast<std::size_t>(h1.rows()),
                           static_cast<std::size_t>(h1.cols()), dropout_rate, *dropout_rng);
    c.d1 = h1.cwiseProduct(c.mask1);
  } else {
    c.mask1.resize(0, 0);
    c.d1 = std::move(h1);
  }

  c.m2 = block_apply(sub.blocks[1], c.d1);
  c.z2 = (c.m2 * model.w2()).rowwise() + model.b2().transpose();
  RowMat h2 = c.z2.cwiseMax(0.0);
  if (dropout_active) {
    c.mask2 = dropout_mask(static_cast<std::size_t>(h2.rows()),
                           static_cast<std::size_t>(h2.cols()), dropout_rate, *dropout_rng);
    c.d2 = h2.cwiseProduct(c.mask2);
  } else {
    c.mask2.resize(0, 0);
    c.d2 = std::move(h2);
  }

  c.m3 = block_apply(sub.blocks[2], c.d2);
  c.z3 = (c.m3 * model.w3()).rowwise() + model.b3().transpose();
  c.h3 = c.z3.cwiseMax(0.0);

  c.out = c.h3 * model.w_out();
  c.out.array() += model.b_out();
  return c.out;
}

ParamVector gcn_backward(const GcnModel& model, const ComputationSubgraph& sub,
                         const ForwardCache& cache, const Eigen::VectorXd& out_grad) {
  ParamVector grads(model.param_count(), 0.0);
  auto grad_mat = [&grads](std::size_t off, std::size_t rows, std::size_t cols) {
    return Eigen::Map<RowMat>(grads.data() + off, static_cast<Eigen::Index>(rows),
                              static_cast<Eigen::Index>(cols));
  };
  auto grad_vec = [&grads](std::size_t off, std::size_t n) {
    return Eigen::Map<Eigen::VectorXd>(grads.data() + off, static_cast<Eigen::Index>(n));
  };

  const GcnDims& d = model.dims;

  // output head
  grad_vec(model.off_w_out(), d.h3).noalias() = cache.h3.transpose() * out_grad;
  grads[model.off_b_out()] = out_grad.sum();
  RowMat dh3 = out_grad * model.w_out().transpose();

  // layer 3
  RowMat dz3 = dh3.cwiseProduct((cache.z3.array() > 0.0).cast<double>().matrix());
  grad_mat(model.off_w3(), d.h2, d.h3).noalias() = cache.m3.transpose() * dz3;
  grad_vec(model.off_b3(), d.h3).noalias() = dz3.colwise().sum().transpose();
  RowMat dm3 = dz3 * model.w3().transpose();
  RowMat dd2 = block_apply_transpose(sub.blocks[2], dm3);
  if (cache.mask2.size() > 0) dd2 = dd2.cwiseProduct(cache.mask2);

  // layer 2
  RowMat dz2 = dd2.cwiseProduct((cache.z2.array() > 0.0).cast<double>().matrix());
  grad_mat(model.off_w2(), d.h1, d.h2).noalias() = cache.m2.transpose() * dz2;
  grad_vec(model.off_b2(), d.h2).noalias() = dz2.colwise().sum().transpose();
  RowMat dm2 = dz2 * model.w2().transpose();
  RowMat dd1 = block_apply_transpose(sub.blocks[1], dm2);
  if (cache.mask1.size() > 0) dd1 = dd1.cwiseProduct(cache.mask1);

  // layer 1
  RowMat dz1 = dd1.cwiseProduct((cache.z1.array() > 0.0).cast<double>().matrix());
  grad_mat(model.off_w1(), d.in, d.h1).noalias() = cache.m1.transpose() * dz1;
  grad_vec(model.off_b1(), d.h1).noalias() = dz1.colwise().sum().transpose();

  return grads;
}

double masked_mse(std::span<const double> preds, std::span<const double> targets,
                  const std::vector<bool>& mask) {
  require(preds.size() == targets.size() && preds.size() == mask.size(),
          ErrorCode::LengthMismatch, "masked_mse inputs differ in length");
  double acc = 0.0;
  std::size_t count = 0;
  for (std::size_t i = 0; i < preds.size(); ++i) {
    if (!mask[i]) continue;
    const double r = preds[i] - targets[i];
    acc += r * r;
    ++count;
  }
  require(count >= 1, ErrorCode::EmptyMask, "mask selects no nodes");
  return acc / static_cast<double>(count);
}

std::vector<double> gcn_full_forward(const GcnModel& model, const NormalizedAdjacency& norm,
                                     std::span<const float> features, std::size_t feature_dim) {
  require(feature_dim == model.dims.in, ErrorCode::DimensionMismatch,
          "feature width does not match model input width");
  const std::size_t n = norm.n_nodes;
  auto spmm = [&norm, n](const RowMat& h) {
    RowMat out = RowMat::Zero(static_cast<Eigen::Index>(n), h.cols());
    for (std::size_t u = 0; u < n; ++u) {
      for (std::size_t e = norm.row_ptr[u]; e < norm.row_ptr[u + 1]; ++e) {
        out.row(static_cast<Eigen::Index>(u)) += norm.value[e] * h.row(norm.col[e]);
      }
    }
    return out;
  };

  RowMat h(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(feature_dim));
  for (std::size_t u = 0; u < n; ++u) {
    for (std::size_t c = 0; c < feature_dim; ++c) {
      h(static_cast<Eigen::Index>(u), static_cast<Eigen::Index>(c)) =
          features[u * feature_dim + c];
    }
  }
  h = ((spmm(h) * model.w1()).rowwise() + model.b1().transpose()).cwiseMax(0.0);
  h = ((spmm(h) * model.w2()).rowwise() + model.b2().transpose()).cwiseMax(0.0);
  h = ((spmm(h) * model.w3()).rowwise() + model.b3().transpose()).cwiseMax(0.0);
  Eigen::VectorXd out = h * model.w_out();
  out.array() += model.b_out();
  return {out.data(), out.data() + out.size()};
}

std::vector<double> gnn_extrapolate(const GcnModel& model, const SampleGraph& graph) {
  const NormalizedAdjacency norm = normalize_adjacency(graph);
  return gcn_full_forward(model, norm, graph.features, graph.feature_dim);
}

void GnnTrainConfig::validate() const {
  require(epochs >= 1, ErrorCode::ConfigInvalid, "epochs must be at least 1");
  require(batch_nodes >= 1, ErrorCode::ConfigInvalid, "batch_nodes must be at least 1");
  require(val_fraction > 0.0 && val_fraction < 1.0, ErrorCode::ConfigInvalid,
          "val_fraction must lie in (0,1)");
  require(dropout >= 0.0 && dropout < 1.0, ErrorCode::ConfigInvalid,
          "dropout must lie in [0,1)");
  require(hops == 3, ErrorCode::ConfigInvalid, "model has exactly 3 graph layers");
}

namespace {

struct AdamState {
  std::vector<double> m, v;
  double beta1 = 0.9, beta2 = 0.999, eps = 1e-8;
  std::int64_t step = 0;

  explicit AdamState(std::size_t n) : m(n, 0.0), v(n, 0.0) {}

  void update(ParamVector& params, const ParamVector& grads, double lr) {
    ++step;
    const double bc1 = 1.0 - std::pow(beta1, static_cast<double>(step));
    const double bc2 = 1.0 - std::pow(beta2, static_cast<double>(step));
    for (std::size_t i = 0; i < params.size(); ++i) {
      m[i] = beta1 * m[i] + (1.0 - beta1) * grads[i];
      v[i] = beta2 * v[i] + (1.0 - beta2) * grads[i] * grads[i];
      params[i] -= lr * (m[i] / bc1) / (std::sqrt(v[i] / bc2) + eps);
    }
  }
};

double pearson_or_zero(std::span<const double> a, std::span<const double> b) {
  try {
    return pearson(a, b);
  } catch (const Error&) {
    return 0.0;  // degenerate predictions never win checkpoint selection
  }
}

}  // namespace

GnnTrainResult train_gnn(const SampleGraph& graph, const ScoreTable& subset_scores,
                         const GnnTrainConfig& cfg) {
  cfg.validate();

  std::vector<std::int32_t> subset_ids;
  std::vector<double> score_of(graph.n_nodes, 0.0);
  for (const ScoreRow& row : subset_scores.rows) {
    if (!row.in_subset) continue;
    require(row.sample_id >= 0 && static_cast<std::size_t>(row.sample_id) < graph.n_nodes,
            ErrorCode::ShapeMismatch, "subset id outside graph");
    subset_ids.push_back(static_cast<std::int32_t>(row.sample_id));
    score_of[static_cast<std::size_t>(row.sample_id)] = row.score;
  }
  require(!subset_ids.empty(), ErrorCode::SubsetTooSmall, "no in_subset rows to train on");

  Rng rng_split(derive_seed(cfg.seed, 0x5f));
  Rng rng_init(derive_seed(cfg.seed, 0x11));
  Rng rng_batch(derive_seed(cfg.seed, 0xb4));
  Rng rng_sample(derive_seed(cfg.seed, 0x5a));
  Rng rng_dropout(derive_seed(cfg.seed, 0xd0));

  // 90/10 train/validation split of the scored subset
  std::vector<std::int32_t> shuffled = subset_ids;
  rng_split.shuffle(shuffled);
  const std::size_t val_count = static_cast<std::size_t>(
      std::floor(cfg.val_fraction * static_cast<double>(shuffled.size()) + 0.5));
  require(val_count >= 2, ErrorCode::SubsetTooSmall,
          "validation split needs at least 2 nodes (got " + std::to_string(val_count) + ")");
  require(shuffled.size() - val_count >= 1, ErrorCode::SubsetTooSmall,
          "training split is empty");

  GnnTrainResult result;
  result.val_ids.assign(shuffled.begin(), shuffled.begin() + static_cast<std::ptrdiff_t>(val_count));
  result.train_ids.assign(shuffled.begin() + static_cast<std::ptrdiff_t>(val_count),
                          shuffled.end());

  std::vector<double> val_targets;
  val_targets.reserve(val_count);
  for (std::int32_t id : result.val_ids) val_targets.push_back(score_of[static_cast<std::size_t>(id)]);
  {
    const double first = val_targets.front();
    bool constant = true;
    for (double v : val_targets) constant = constant && v == first;
    require(!constant, ErrorCode::DegenerateValidation,
            "validation targets have zero variance; Pearson checkpointing undefined");
  }

  // standardize regression targets over the train split; the affine map is
  // folded back into the linear output head after training, so the returned
  // model predicts on the raw score scale
  double target_mean = 0.0;
  for (std::int32_t id : result.train_ids) target_mean += score_of[static_cast<std::size_t>(id)];
  target_mean /= static_cast<double>(result.train_ids.size());
  double target_var = 0.0;
  for (std::int32_t id : result.train_ids) {
    const double d = score_of[static_cast<std::size_t>(id)] - target_mean;
    target_var += d * d;
  }
  target_var /= static_cast<double>(result.train_ids.size());
  const double target_scale = target_var > 0.0 ? std::sqrt(target_var) : 1.0;
  std::vector<double> scaled_score(graph.n_nodes, 0.0);
  for (std::int32_t id : subset_ids) {
    scaled_score[static_cast<std::size_t>(id)] =
        (score_of[static_cast<std::size_t>(id)] - target_mean) / target_scale;
  }

  GcnDims dims{graph.feature_dim, cfg.hidden1, cfg.hidden2, cfg.hidden3};
  GcnModel model = GcnModel::init(dims, rng_init);
  AdamState adam(model.param_count());
  const NormalizedAdjacency norm = normalize_adjacency(graph);

  double best_pearson = -std::numeric_limits<double>::infinity();
  ParamVector best_params = model.params;
  result.best_epoch = 1;

  for (int epoch = 1; epoch <= cfg.epochs; ++epoch) {
    std::vector<std::int32_t> order = result.train_ids;
    rng_batch.shuffle(order);

    double loss_sum = 0.0;
    std::size_t loss_count = 0;
    for (std::size_t start = 0; start < order.size(); start += cfg.batch_nodes) {
      const std::size_t stop = std::min(order.size(), start + cfg.batch_nodes);
      std::span<const std::int32_t> batch(order.data() + start, stop - start);
      const ComputationSubgraph sub = sample_neighborhood(
          graph, norm, batch, cfg.fanout, cfg.hops, rng_sample, cfg.neighbor_sampling);

      ForwardCache cache;
      const Eigen::VectorXd preds =
          gcn_forward(model, sub, graph.features, graph.feature_dim,
                      cfg.dropout > 0.0, cfg.dropout, &rng_dropout, &cache);

      const double inv = 1.0 / static_cast<double>(batch.size());
      Eigen::VectorXd out_grad(preds.size());
      double batch_loss = 0.0;
      for (std::size_t i = 0; i < batch.size(); ++i) {
        const double target = scaled_score[static_cast<std::size_t>(batch[i])];
        const double r = preds[static_cast<Eigen::Index>(i)] - target;
        batch_loss += r * r;
        out_grad[static_cast<Eigen::Index>(i)] = 2.0 * r * inv;
      }
      loss_sum += batch_loss;
      loss_count += batch.size();

      const ParamVector grads = gcn_backward(model, sub, cache, out_grad);
      adam.update(model.params, grads, cfg.learning_rate);
    }

    // validation via the deterministic full-neighborhood pass
    const std::vector<double> all_preds =
        gcn_full_forward(model, norm, graph.features, graph.feature_dim);
    std::vector<double> val_preds;
    val_preds.reserve(val_count);
    for (std::int32_t id : result.val_ids) val_preds.push_back(all_preds[static_cast<std::size_t>(id)]);
    const double vp = pearson_or_zero(val_preds, val_targets);

    // report the loss on the raw score scale
    result.history.push_back(
        {loss_sum / static_cast<double>(loss_count) * target_scale * target_scale, vp});
    if (vp > best_pearson) {
      best_pearson = vp;
      best_params = model.params;
      result.best_epoch = epoch;
    }
  }

  model.params = std::move(best_params);
  // fold the target standardization into the output head
  for (std::size_t i = 0; i < model.dims.h3; ++i) {
    model.params[model.off_w_out() + i] *= target_scale;
  }
  model.params[model.off_b_out()] =
      model.params[model.off_b_out()] * target_scale + target_mean;
  result.model = std::move(model);
  return result;
}

void save_gcn_model(const std::filesystem::path& dir, const GcnModel& model,
                    const std::vector<std::pair<std::string, std::string>>& config_echo) {
  std::filesystem::create_directories(dir);
  struct Entry {
    const char* name;
    std::size_t off;
    std::vector<std::size_t> shape;
  };
  const GcnDims& d = model.dims;
  const std::vector<Entry> entries = {
      {"w1", model.off_w1(), {d.in, d.h1}},   {"b1", model.off_b1(), {d.h1}},
      {"w2", model.off_w2(), {d.h1, d.h2}},   {"b2", model.off_b2(), {d.h2}},
      {"w3", model.off_w3(), {d.h2, d.h3}},   {"b3", model.off_b3(), {d.h3}},
      {"w_out", model.off_w_out(), {d.h3, 1}}, {"b_out", model.off_b_out(), {1}},
  };
  std::string manifest;
  for (const Entry& e : entries) {
    const std::size_t count = DenseTensor::element_count(e.shape);
    std::vector<float> data(count);
    for (std::size_t i = 0; i < count; ++i) {
      data[i] = static_cast<float>(model.params[e.off + i]);
    }
    write_tensor(dir / (std::string(e.name) + ".npy"), DenseTensor(e.shape, std::move(data)));
    manifest += std::string("param=") + e.name + " shape=";
    for (std::size_t i = 0; i < e.shape.size(); ++i) {
      manifest += std::to_string(e.shape[i]);
      if (i + 1 < e.shape.size()) manifest += "x";
    }
    manifest += "\n";
  }
  for (const auto& [key, value] : config_echo) {
    manifest += key + "=" + value + "\n";
  }
  atomic_write(dir / "manifest.txt", manifest);
}

GcnModel load_gcn_model(const std::filesystem::path& dir) {
  auto load = [&dir](const char* name) { return read_tensor(dir / (std::string(name) + ".npy")); };
  const DenseTensor w1 = load("w1");
  const DenseTensor w2 = load("w2");
  const DenseTensor w3 = load("w3");
  require(w1.rank() == 2 && w2.rank() == 2 && w3.rank() == 2, ErrorCode::ShapeMismatch,
          "checkpoint weight tensors must be 2-d");
  GcnDims dims{w1.shape[0], w1.shape[1], w2.shape[1], w3.shape[1]};
  require(w2.shape[0] == dims.h1 && w3.shape[0] == dims.h2, ErrorCode::ShapeMismatch,
          "checkpoint layer widths do not chain");

  GcnModel model;
  model.dims = dims;
  model.params.assign(model.param_count(), 0.0);
  auto place = [&model](const DenseTensor& t, std::size_t off, std::size_t expect) {
    require(t.size() == expect, ErrorCode::ShapeMismatch, "checkpoint tensor size mismatch");
    for (std::size_t i = 0; i < t.size(); ++i) model.params[off + i] = t.data[i];
  };
  place(w1, model.off_w1(), dims.in * dims.h1);
  place(load("b1"), model.off_b1(), dims.h1);
  place(w2, model.off_w2(), dims.h1 * dims.h2);
  place(load("b2"), model.off_b2(), dims.h2);
  place(w3, model.off_w3(), dims.h2 * dims.h3);
  place(load("b3"), model.off_b3(), dims.h3);
  place(load("w_out"), model.off_w_out(), dims.h3);
  place(load("b_out"), model.off_b_out(), 1);
  return model;
}

}  // namespace scorex
