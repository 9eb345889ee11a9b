#include "scorex/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <numeric>

#include "scorex/tensor_io.hpp"

namespace scorex {

const char* scorer_kind_name(ScorerKind kind) {
  switch (kind) {
    case ScorerKind::du: return "du";
    case ScorerKind::tdds: return "tdds";
    case ScorerKind::unsupervised_du: return "unsup-du";
  }
  return "du";
}

ScorerKind scorer_kind_from_name(const std::string& name) {
  if (name == "du") return ScorerKind::du;
  if (name == "tdds") return ScorerKind::tdds;
  if (name == "unsup-du" || name == "unsupervised_du") return ScorerKind::unsupervised_du;
  fail(ErrorCode::ConfigInvalid, "unknown scorer '" + name + "'");
}

const char* extrapolator_kind_name(ExtrapolatorKind kind) {
  switch (kind) {
    case ExtrapolatorKind::knn: return "knn";
    case ExtrapolatorKind::gnn: return "gnn";
    case ExtrapolatorKind::none: return "none";
    case ExtrapolatorKind::random: return "random";
  }
  return "knn";
}

ExtrapolatorKind extrapolator_kind_from_name(const std::string& name) {
  if (name == "knn") return ExtrapolatorKind::knn;
  if (name == "gnn") return ExtrapolatorKind::gnn;
  if (name == "none") return ExtrapolatorKind::none;
  if (name == "random") return ExtrapolatorKind::random;
  fail(ErrorCode::ConfigInvalid, "unknown extrapolator '" + name + "'");
}

IndexSet sample_subset(std::int64_t n, double fraction, Rng& rng) {
  require(fraction > 0.0 && fraction < 1.0, ErrorCode::FractionOutOfRange,
          "subset fraction must lie in (0,1)");
  require(n >= 1, ErrorCode::FractionOutOfRange, "universe must be nonempty");
  const std::int64_t m = round_half_up(fraction * static_cast<double>(n));
  require(m >= 1, ErrorCode::FractionOutOfRange,
          "subset fraction rounds to zero samples");
  IndexSet set;
  set.universe_size = n;
  set.indices = rng.sample_without_replacement(n, m);
  return set;
}

ScoreTable merge_scores(const ScoreTable& subset_scores, const ScoreTable& extrapolated,
                        std::int64_t n) {
  std::vector<char> covered(static_cast<std::size_t>(n), 0);
  ScoreTable merged;
  merged.rows.resize(static_cast<std::size_t>(n));

  for (const ScoreRow& row : extrapolated.rows) {
    require(row.sample_id >= 0 && row.sample_id < n, ErrorCode::ShapeMismatch,
            "extrapolated id outside universe");
    ScoreRow out = row;
    out.in_subset = false;
    merged.rows[static_cast<std::size_t>(row.sample_id)] = out;
    covered[static_cast<std::size_t>(row.sample_id)] = 1;
  }
  for (const ScoreRow& row : subset_scores.rows) {
    require(row.sample_id >= 0 && row.sample_id < n, ErrorCode::ShapeMismatch,
            "subset id outside universe");
    ScoreRow out = row;
    out.provenance = Provenance::computed;  // subset rows always keep computed values
    out.in_subset = true;
    merged.rows[static_cast<std::size_t>(row.sample_id)] = out;
    covered[static_cast<std::size_t>(row.sample_id)] = 1;
  }
  for (std::int64_t id = 0; id < n; ++id) {
    require(covered[static_cast<std::size_t>(id)] != 0, ErrorCode::CoverageGap,
            "no score for sample " + std::to_string(id));
    merged.rows[static_cast<std::size_t>(id)].sample_id = id;
  }
  return merged;
}

IndexSet select_top(const ScoreTable& scores, double prune_rate, bool invert) {
  require(prune_rate > 0.0 && prune_rate < 1.0, ErrorCode::FractionOutOfRange,
          "prune rate must lie in (0,1)");
  const std::int64_t n = static_cast<std::int64_t>(scores.size());
  const std::int64_t keep = round_half_up((1.0 - prune_rate) * static_cast<double>(n));
  require(keep >= 1, ErrorCode::EmptyResult, "prune rate keeps zero samples");

  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) {
    const double si = scores.rows[i].score;
    const double sj = scores.rows[j].score;
    if (si != sj) return invert ? si < sj : si > sj;
    return scores.rows[i].sample_id < scores.rows[j].sample_id;
  });

  IndexSet kept;
  kept.universe_size = n;
  kept.indices.reserve(static_cast<std::size_t>(keep));
  for (std::int64_t i = 0; i < keep; ++i) {
    kept.indices.push_back(scores.rows[order[static_cast<std::size_t>(i)]].sample_id);
  }
  std::sort(kept.indices.begin(), kept.indices.end());
  return kept;
}

namespace {

class StageClock {
 public:
  explicit StageClock(std::vector<StageTiming>& sink) : sink_(sink) {}

  template <typename Fn>
  auto run(const std::string& stage, Fn&& fn) {
    const auto start = std::chrono::steady_clock::now();
    try {
      if constexpr (std::is_void_v<decltype(fn())>) {
        fn();
        record(stage, start);
      } else {
        auto value = fn();
        record(stage, start);
        return value;
      }
    } catch (const Error& e) {
      throw Error(e.code(), "[stage " + stage + "] " + e.what());
    }
  }

 private:
  void record(const std::string& stage, std::chrono::steady_clock::time_point start) {
    const std::chrono::duration<double> elapsed = std::chrono::steady_clock::now() - start;
    sink_.push_back({stage, elapsed.count()});
  }

  std::vector<StageTiming>& sink_;
};

ScoreTable compute_subset_scores(const PipelineConfig& cfg, const PipelineInputs& inputs,
                                 const IndexSet& subset) {
  ScorerConfig sc = cfg.scorer_cfg;
  sc.threads = cfg.deterministic ? 1 : cfg.threads;
  std::vector<double> all_scores;
  switch (cfg.scorer) {
    case ScorerKind::du: {
      ProbTrajectory probs;
      if (inputs.trajectory.rank() == 2) {
        probs = ProbTrajectory::from_tensor(inputs.trajectory);
      } else {
        require(inputs.labels.has_value(), ErrorCode::ConfigInvalid,
                "du over a (E,n,C) trajectory needs labels to pick the true-class column");
        probs = select_label_column(DistTrajectory::from_tensor(inputs.trajectory),
                                    *inputs.labels);
      }
      all_scores = du_score(probs, sc);
      break;
    }
    case ScorerKind::tdds:
      all_scores = tdds_score(DistTrajectory::from_tensor(inputs.trajectory), sc);
      break;
    case ScorerKind::unsupervised_du:
      all_scores = unsupervised_du(DistTrajectory::from_tensor(inputs.trajectory), sc);
      break;
  }
  require(all_scores.size() == static_cast<std::size_t>(subset.universe_size),
          ErrorCode::ShapeMismatch, "trajectory sample count does not match embeddings");

  ScoreTable table;
  table.rows.reserve(subset.size());
  for (std::int64_t id : subset.indices) {
    table.rows.push_back({id, all_scores[static_cast<std::size_t>(id)],
                          Provenance::computed, true});
  }
  return table;
}

ScoreTable extrapolate_scores(const PipelineConfig& cfg, const PipelineInputs& inputs,
                              const IndexSet& subset, const ScoreTable& subset_scores) {
  const std::size_t n = inputs.embeddings.dim(0);
  const std::size_t dim = inputs.embeddings.dim(1);
  const IndexSet residual = subset.complement();

  ScoreTable out;
  switch (cfg.extrapolator) {
    case ExtrapolatorKind::none:
      return out;  // no extrapolated rows; merge will demand full subset coverage
    case ExtrapolatorKind::random: {
      Rng rng(derive_seed(cfg.seed, 0x7a));
      out.rows.reserve(residual.size());
      for (std::int64_t id : residual.indices) {
        out.rows.push_back({id, rng.uniform01(), Provenance::random, false});
      }
      return out;
    }
    case ExtrapolatorKind::knn: {
      std::vector<float> subset_emb(subset.size() * dim);
      std::vector<double> scores(subset.size());
      for (std::size_t i = 0; i < subset.size(); ++i) {
        const std::size_t id = static_cast<std::size_t>(subset.indices[i]);
        std::copy_n(inputs.embeddings.data.begin() + static_cast<std::ptrdiff_t>(id * dim), dim,
                    subset_emb.begin() + static_cast<std::ptrdiff_t>(i * dim));
        scores[i] = subset_scores.rows[i].score;
      }
      std::vector<float> query_emb(residual.size() * dim);
      for (std::size_t i = 0; i < residual.size(); ++i) {
        const std::size_t id = static_cast<std::size_t>(residual.indices[i]);
        std::copy_n(inputs.embeddings.data.begin() + static_cast<std::ptrdiff_t>(id * dim), dim,
                    query_emb.begin() + static_cast<std::ptrdiff_t>(i * dim));
      }
      KnnExtrapolationConfig kc;
      kc.k = cfg.knn_k;
      kc.normalize_embeddings = cfg.knn_normalize;
      kc.threads = cfg.deterministic ? 1 : cfg.threads;
      const std::vector<double> predicted =
          knn_extrapolate(subset_emb, subset.size(), dim, scores, query_emb, residual.size(), kc);
      out.rows.reserve(residual.size());
      for (std::size_t i = 0; i < residual.size(); ++i) {
        out.rows.push_back({residual.indices[i], predicted[i], Provenance::extrapolated_knn,
                            false});
      }
      return out;
    }
    case ExtrapolatorKind::gnn: {
      std::size_t num_classes = 0;
      std::span<const std::int32_t> labels;
      if (inputs.labels) {
        labels = *inputs.labels;
        for (std::int32_t c : labels) {
          num_classes = std::max(num_classes, static_cast<std::size_t>(c) + 1);
        }
      }
      const SampleGraph graph =
          build_graph(inputs.embeddings.data, n, dim, cfg.graph_k, labels, num_classes,
                      cfg.deterministic ? 1 : cfg.threads);
      GnnTrainConfig gc = cfg.gnn;
      gc.seed = derive_seed(cfg.seed, 0x91);
      const GnnTrainResult trained = train_gnn(graph, subset_scores, gc);
      const std::vector<double> predicted = gnn_extrapolate(trained.model, graph);
      out.rows.reserve(residual.size());
      for (std::int64_t id : residual.indices) {
        out.rows.push_back({id, predicted[static_cast<std::size_t>(id)],
                            Provenance::extrapolated_gnn, false});
      }
      return out;
    }
  }
  return out;
}

}  // namespace

PruneResult run_pipeline(const PipelineConfig& cfg, const PipelineInputs& inputs) {
  require(inputs.embeddings.rank() == 2, ErrorCode::ShapeMismatch,
          "embeddings must have shape (n, d')");
  const std::int64_t n = static_cast<std::int64_t>(inputs.embeddings.dim(0));
  require(n >= 1, ErrorCode::ShapeMismatch, "need at least one sample");
  if (inputs.labels) {
    require(inputs.labels->size() == static_cast<std::size_t>(n), ErrorCode::ShapeMismatch,
            "labels length does not match embeddings");
  }

  PruneResult result;
  StageClock clock(result.timings);

  result.subset = clock.run("sample_subset", [&] {
    if (inputs.subset) {
      IndexSet set = *inputs.subset;
      require(set.universe_size == n, ErrorCode::ShapeMismatch,
              "provided subset universe does not match embeddings");
      set.validate();
      return set;
    }
    Rng rng(derive_seed(cfg.seed, 0x01));
    return sample_subset(n, cfg.subset_fraction, rng);
  });

  const ScoreTable subset_scores =
      clock.run("score_subset", [&] { return compute_subset_scores(cfg, inputs, result.subset); });

  const ScoreTable extrapolated = clock.run(
      "extrapolate", [&] { return extrapolate_scores(cfg, inputs, result.subset, subset_scores); });

  result.merged =
      clock.run("merge_scores", [&] { return merge_scores(subset_scores, extrapolated, n); });

  clock.run("select_top", [&] {
    for (double rate : cfg.prune_rates) {
      result.kept.emplace_back(rate, select_top(result.merged, rate, cfg.invert));
    }
  });

  if (inputs.ground_truth) {
    result.correlation = clock.run("correlation", [&] {
      const ScoreTable& gt = *inputs.ground_truth;
      require(gt.size() == static_cast<std::size_t>(n), ErrorCode::ShapeMismatch,
              "ground truth must cover all samples");
      const IndexSet residual = result.subset.complement();
      std::vector<double> a, b;
      a.reserve(residual.size());
      b.reserve(residual.size());
      for (std::int64_t id : residual.indices) {
        a.push_back(gt.rows[static_cast<std::size_t>(id)].score);
        b.push_back(result.merged.rows[static_cast<std::size_t>(id)].score);
      }
      return correlation_report(a, b, "residual");
    });
  }
  return result;
}

PruneResult run_pipeline(const PipelineConfig& cfg) {
  PipelineInputs inputs;
  require(!cfg.embeddings_path.empty(), ErrorCode::ConfigInvalid, "embeddings path required");
  require(!cfg.trajectory_path.empty(), ErrorCode::ConfigInvalid, "trajectory path required");
  inputs.embeddings = read_tensor(cfg.embeddings_path);
  inputs.trajectory = read_tensor(cfg.trajectory_path);
  if (!cfg.labels_path.empty()) {
    const DenseTensor raw = read_tensor(cfg.labels_path);
    require(raw.rank() == 1, ErrorCode::ShapeMismatch, "labels tensor must be 1-d");
    std::vector<std::int32_t> labels(raw.size());
    for (std::size_t i = 0; i < raw.size(); ++i) {
      const float v = raw.data[i];
      require(v >= 0.0f && v == std::floor(v), ErrorCode::LabelOutOfRange,
              "labels must be non-negative integers");
      labels[i] = static_cast<std::int32_t>(v);
    }
    inputs.labels = std::move(labels);
  }
  if (!cfg.ground_truth_path.empty()) {
    inputs.ground_truth = read_score_table(cfg.ground_truth_path);
  }
  if (!cfg.subset_path.empty()) {
    inputs.subset = read_index_set(cfg.subset_path);
  }
  return run_pipeline(cfg, inputs);
}

}  // namespace scorex
