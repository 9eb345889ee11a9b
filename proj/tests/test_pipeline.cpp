#include <doctest.h>

#include <numeric>

#include "scorex/pipeline.hpp"
#include "scorex/rng.hpp"

using namespace scorex;

namespace {

ScoreTable make_table(const std::vector<double>& scores) {
  ScoreTable table;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    table.rows.push_back({static_cast<std::int64_t>(i), scores[i], Provenance::computed, true});
  }
  return table;
}

PipelineInputs synthetic_inputs(std::size_t n, std::uint64_t seed) {
  Rng rng(seed);
  PipelineInputs inputs;
  inputs.embeddings.shape = {n, 4};
  inputs.embeddings.data.resize(n * 4);
  for (auto& v : inputs.embeddings.data) v = static_cast<float>(rng.normal());
  const std::size_t epochs = 12;
  inputs.trajectory.shape = {epochs, n};
  inputs.trajectory.data.resize(epochs * n);
  for (auto& v : inputs.trajectory.data) v = static_cast<float>(rng.uniform01());
  return inputs;
}

}  // namespace

TEST_CASE("sample_subset cardinality and determinism") {
  Rng rng(3);
  const IndexSet set = sample_subset(10, 0.2, rng);
  CHECK(set.size() == 2);
  CHECK(set.universe_size == 10);
  set.validate();

  Rng a(9), b(9);
  CHECK(sample_subset(100, 0.3, a).indices == sample_subset(100, 0.3, b).indices);

  CHECK_THROWS_AS(sample_subset(10, 0.0, rng), Error);
  CHECK_THROWS_AS(sample_subset(10, 1.0, rng), Error);
}

TEST_CASE("sample_subset draws uniformly") {
  std::vector<int> hits(100, 0);
  const int draws = 10000;
  Rng rng(1234);
  for (int t = 0; t < draws; ++t) {
    for (std::int64_t id : sample_subset(100, 0.2, rng).indices) {
      ++hits[static_cast<std::size_t>(id)];
    }
  }
  for (int h : hits) {
    const double freq = static_cast<double>(h) / draws;
    CHECK(freq == doctest::Approx(0.20).epsilon(0.1));  // 0.20 +/- 0.02
  }
}

TEST_CASE("merge_scores precedence and coverage") {
  ScoreTable subset;
  subset.rows = {{0, 1.0, Provenance::computed, true}, {1, 2.0, Provenance::computed, true}};

  ScoreTable extrapolated;
  extrapolated.rows = {{1, -9.0, Provenance::extrapolated_knn, false},
                       {2, 3.0, Provenance::extrapolated_knn, false},
                       {3, 4.0, Provenance::extrapolated_knn, false},
                       {4, 5.0, Provenance::extrapolated_knn, false}};

  const ScoreTable merged = merge_scores(subset, extrapolated, 5);
  REQUIRE(merged.size() == 5);
  CHECK(merged.rows[1].score == 2.0);  // subset value wins over extrapolated
  CHECK(merged.rows[1].provenance == Provenance::computed);
  CHECK(merged.rows[1].in_subset);
  for (std::size_t i = 2; i < 5; ++i) {
    CHECK(merged.rows[i].provenance == Provenance::extrapolated_knn);
    CHECK_FALSE(merged.rows[i].in_subset);
  }

  // missing id 4 -> coverage gap
  extrapolated.rows.pop_back();
  CHECK_THROWS_AS(merge_scores(subset, extrapolated, 5), Error);

  // empty residual set: merged equals subset table
  const ScoreTable just_subset = merge_scores(subset, ScoreTable{}, 2);
  REQUIRE(just_subset.size() == 2);
  CHECK(just_subset.rows[0].score == 1.0);
  CHECK(just_subset.rows[1].score == 2.0);
}

TEST_CASE("select_top keeps the highest scores with id ties") {
  const ScoreTable table = make_table({0.9, 0.1, 0.5, 0.5});
  const IndexSet kept = select_top(table, 0.5);
  CHECK(kept.indices == std::vector<std::int64_t>{0, 2});

  const ScoreTable big = make_table(std::vector<double>(1000, 1.0));
  CHECK(select_top(big, 0.95).size() == 50);
  // all equal: lowest ids kept
  const IndexSet tie = select_top(make_table({3.0, 3.0, 3.0, 3.0}), 0.5);
  CHECK(tie.indices == std::vector<std::int64_t>{0, 1});

  const IndexSet inverted = select_top(table, 0.5, /*invert=*/true);
  CHECK(inverted.indices == std::vector<std::int64_t>{1, 2});
}

TEST_CASE("select_top boundary dominance on random scores") {
  Rng rng(44);
  std::vector<double> scores(57);
  for (auto& v : scores) v = rng.normal();
  const ScoreTable table = make_table(scores);
  for (double rate : {0.1, 0.5, 0.9}) {
    const IndexSet kept = select_top(table, rate);
    CHECK(kept.size() ==
          static_cast<std::size_t>(round_half_up((1.0 - rate) * 57.0)));
    double min_kept = 1e300, max_dropped = -1e300;
    for (std::int64_t id = 0; id < 57; ++id) {
      if (kept.contains(id)) {
        min_kept = std::min(min_kept, scores[static_cast<std::size_t>(id)]);
      } else {
        max_dropped = std::max(max_dropped, scores[static_cast<std::size_t>(id)]);
      }
    }
    CHECK(min_kept >= max_dropped);
  }
}

TEST_CASE("run_pipeline knn covers every sample with correct provenance") {
  PipelineConfig cfg;
  cfg.scorer = ScorerKind::du;
  cfg.extrapolator = ExtrapolatorKind::knn;
  cfg.subset_fraction = 0.4;
  cfg.knn_k = 3;
  cfg.prune_rates = {0.5};
  cfg.seed = 17;

  const PipelineInputs inputs = synthetic_inputs(50, 17);
  const PruneResult result = run_pipeline(cfg, inputs);

  REQUIRE(result.merged.size() == 50);
  std::size_t computed = 0;
  for (const ScoreRow& row : result.merged.rows) {
    if (row.in_subset) {
      CHECK(row.provenance == Provenance::computed);
      ++computed;
    } else {
      CHECK(row.provenance == Provenance::extrapolated_knn);
    }
  }
  CHECK(computed == result.subset.size());
  CHECK(result.subset.size() == 20);
  REQUIRE(result.kept.size() == 1);
  CHECK(result.kept[0].second.size() == 25);
  CHECK(result.timings.size() >= 5);
}

TEST_CASE("run_pipeline is deterministic given seed") {
  PipelineConfig cfg;
  cfg.extrapolator = ExtrapolatorKind::random;
  cfg.subset_fraction = 0.3;
  cfg.prune_rates = {0.2, 0.8};
  cfg.seed = 5;
  cfg.deterministic = true;

  const PipelineInputs inputs = synthetic_inputs(40, 8);
  const PruneResult a = run_pipeline(cfg, inputs);
  const PruneResult b = run_pipeline(cfg, inputs);
  REQUIRE(a.merged.size() == b.merged.size());
  for (std::size_t i = 0; i < a.merged.size(); ++i) {
    CHECK(a.merged.rows[i].score == b.merged.rows[i].score);
  }
  for (std::size_t r = 0; r < a.kept.size(); ++r) {
    CHECK(a.kept[r].second.indices == b.kept[r].second.indices);
  }
}

TEST_CASE("extrapolator none requires the subset to cover everything") {
  PipelineConfig cfg;
  cfg.extrapolator = ExtrapolatorKind::none;
  cfg.subset_fraction = 0.5;
  cfg.prune_rates = {0.5};
  cfg.seed = 2;
  const PipelineInputs inputs = synthetic_inputs(20, 3);
  try {
    run_pipeline(cfg, inputs);
    FAIL("expected CoverageGap");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::CoverageGap);
    CHECK(std::string(e.what()).find("merge_scores") != std::string::npos);
  }

  // subset_fraction near 1 rounds to the whole set: standard pruning
  PipelineConfig full = cfg;
  full.subset_fraction = 0.999;
  const PruneResult result = run_pipeline(full, inputs);
  CHECK(result.merged.size() == 20);
  for (const ScoreRow& row : result.merged.rows) {
    CHECK(row.provenance == Provenance::computed);
    CHECK(row.in_subset);
  }
}

TEST_CASE("run_pipeline reports residual correlation when ground truth given") {
  PipelineConfig cfg;
  cfg.extrapolator = ExtrapolatorKind::knn;
  cfg.subset_fraction = 0.25;
  cfg.knn_k = 5;
  cfg.prune_rates = {0.5};
  cfg.seed = 23;

  PipelineInputs inputs = synthetic_inputs(60, 29);
  ScoreTable gt;
  Rng rng(30);
  for (std::int64_t id = 0; id < 60; ++id) {
    gt.rows.push_back({id, rng.uniform01(), Provenance::computed, false});
  }
  inputs.ground_truth = gt;

  const PruneResult result = run_pipeline(cfg, inputs);
  REQUIRE(result.correlation.has_value());
  CHECK(result.correlation->scope == "residual");
  CHECK(result.correlation->n_pairs == 60 - result.subset.size());
}

TEST_CASE("run_pipeline honors a provided subset") {
  PipelineConfig cfg;
  cfg.extrapolator = ExtrapolatorKind::knn;
  cfg.knn_k = 2;
  cfg.prune_rates = {0.5};
  cfg.seed = 31;

  PipelineInputs inputs = synthetic_inputs(30, 31);
  IndexSet fixed;
  fixed.universe_size = 30;
  fixed.indices = {0, 3, 7, 12, 19, 25};
  inputs.subset = fixed;

  const PruneResult result = run_pipeline(cfg, inputs);
  CHECK(result.subset.indices == fixed.indices);
  for (std::int64_t id : fixed.indices) {
    CHECK(result.merged.rows[static_cast<std::size_t>(id)].in_subset);
  }
}

TEST_CASE("random extrapolator fills residual rows with uniform scores") {
  PipelineConfig cfg;
  cfg.extrapolator = ExtrapolatorKind::random;
  cfg.subset_fraction = 0.2;
  cfg.prune_rates = {0.5};
  cfg.seed = 37;
  const PipelineInputs inputs = synthetic_inputs(50, 41);
  const PruneResult result = run_pipeline(cfg, inputs);
  for (const ScoreRow& row : result.merged.rows) {
    if (!row.in_subset) {
      CHECK(row.provenance == Provenance::random);
      CHECK(row.score >= 0.0);
      CHECK(row.score < 1.0);
    }
  }
}
