#pragma once

#include <optional>
#include <string>
#include <vector>

#include "scorex/gcn.hpp"
#include "scorex/knn.hpp"
#include "scorex/metrics.hpp"
#include "scorex/rng.hpp"
#include "scorex/scorers.hpp"
#include "scorex/tensor.hpp"

namespace scorex {

enum class ScorerKind { du, tdds, unsupervised_du };
enum class ExtrapolatorKind { knn, gnn, none, random };

const char* scorer_kind_name(ScorerKind kind);
ScorerKind scorer_kind_from_name(const std::string& name);
const char* extrapolator_kind_name(ExtrapolatorKind kind);
ExtrapolatorKind extrapolator_kind_from_name(const std::string& name);

struct PipelineConfig {
  // inputs (ignored when in-memory inputs are passed directly)
  std::string embeddings_path;
  std::string trajectory_path;        // (E,n) for du, (E,n,C) otherwise
  std::string labels_path;            // optional; one-hot features + du column select
  std::string ground_truth_path;      // optional; enables the correlation report
  std::string subset_path;            // optional; fixed subset instead of sampling

  ScorerKind scorer = ScorerKind::du;
  ExtrapolatorKind extrapolator = ExtrapolatorKind::knn;
  double subset_fraction = 0.2;
  std::size_t knn_k = 20;
  bool knn_normalize = false;
  std::size_t graph_k = 10;
  GnnTrainConfig gnn;
  ScorerConfig scorer_cfg;
  std::vector<double> prune_rates = {0.1, 0.2, 0.5, 0.8, 0.9, 0.95};
  std::uint64_t seed = 0;
  bool invert = false;  // keep lowest-scoring instead of highest
  bool deterministic = false;
  int threads = 1;
};

struct PipelineInputs {
  DenseTensor embeddings;                     // (n, d')
  DenseTensor trajectory;                     // (E,n) or (E,n,C)
  std::optional<std::vector<std::int32_t>> labels;
  std::optional<ScoreTable> ground_truth;     // full-table reference scores
  std::optional<IndexSet> subset;             // overrides stage-I sampling
};

struct StageTiming {
  std::string stage;
  double seconds = 0.0;
};

struct PruneResult {
  IndexSet subset;
  ScoreTable merged;
  std::vector<std::pair<double, IndexSet>> kept;  // one entry per prune rate
  std::optional<CorrelationReport> correlation;   // residual-set scope
  std::vector<StageTiming> timings;
};

/// m = round(fraction * n) distinct uniform indices.
IndexSet sample_subset(std::int64_t n, double fraction, Rng& rng);

/// Subset rows keep their computed values; extrapolated rows fill the rest.
/// Extrapolated values for subset ids are discarded. All n ids must end up
/// covered exactly once.
ScoreTable merge_scores(const ScoreTable& subset_scores, const ScoreTable& extrapolated,
                        std::int64_t n);

/// Keeps the round((1 - prune_rate) * n) highest-scoring ids, ties broken by
/// lower id. With invert, keeps the lowest-scoring instead.
IndexSet select_top(const ScoreTable& scores, double prune_rate, bool invert = false);

PruneResult run_pipeline(const PipelineConfig& cfg, const PipelineInputs& inputs);
PruneResult run_pipeline(const PipelineConfig& cfg);  // loads inputs from the paths

/// round-half-up, shared by every cardinality rule in the pipeline
inline std::int64_t round_half_up(double x) {
  return static_cast<std::int64_t>(std::floor(x + 0.5));
}

}  // namespace scorex
