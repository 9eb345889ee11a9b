#include <doctest.h>

#include <cmath>
#include <numeric>

#include "scorex/scorers.hpp"
#include "scorex/synth.hpp"

using namespace scorex;

TEST_CASE("gen_blobs balance, determinism and noise accounting") {
  BlobDatasetConfig cfg;
  cfg.n = 103;
  cfg.classes = 5;
  cfg.dim = 4;
  cfg.noise_rate = 0.2;
  cfg.seed = 9;
  const BlobDataset a = gen_blobs(cfg);
  const BlobDataset b = gen_blobs(cfg);
  CHECK(a.x == b.x);
  CHECK(a.labels == b.labels);

  std::vector<int> counts(5, 0);
  for (std::int32_t c : a.true_labels) ++counts[static_cast<std::size_t>(c)];
  const auto [lo, hi] = std::minmax_element(counts.begin(), counts.end());
  CHECK(*hi - *lo <= 1);

  std::size_t noisy = 0;
  for (std::uint8_t f : a.noisy) noisy += f;
  CHECK(noisy == 21);  // round(0.2 * 103)

  BlobDatasetConfig bad = cfg;
  bad.classes = 1;
  CHECK_THROWS_AS(gen_blobs(bad), Error);
}

TEST_CASE("probe reaches high train accuracy on separable blobs") {
  BlobDatasetConfig cfg;
  cfg.n = 200;
  cfg.classes = 4;
  cfg.dim = 6;
  cfg.sigma = 0.05;  // tight clusters, linearly separable in practice
  cfg.noise_rate = 0.0;
  cfg.n_test = 80;
  cfg.seed = 11;
  const BlobDataset ds = gen_blobs(cfg);

  ProbeConfig pc;
  pc.epochs = 15;
  pc.hidden = 16;
  pc.seed = 12;
  const ProbeRun run = train_probe(ds, pc);

  // training accuracy from the recorded final-epoch distributions
  const std::size_t last = run.trajectory.epochs - 1;
  std::size_t correct = 0;
  for (std::size_t i = 0; i < run.trajectory.samples; ++i) {
    const auto dist = run.trajectory.dist(last, i);
    std::size_t best = 0;
    for (std::size_t c = 1; c < dist.size(); ++c) {
      if (dist[c] > dist[best]) best = c;
    }
    if (static_cast<std::int32_t>(best) == ds.labels[i]) ++correct;
  }
  CHECK(static_cast<double>(correct) / static_cast<double>(cfg.n) >= 0.99);
}

TEST_CASE("probe trajectories are valid scorer inputs") {
  BlobDatasetConfig cfg;
  cfg.n = 60;
  cfg.classes = 3;
  cfg.dim = 4;
  cfg.sigma = 1.0;
  cfg.seed = 13;
  const BlobDataset ds = gen_blobs(cfg);

  ProbeConfig pc;
  pc.epochs = 13;  // J+3 with default J=10
  pc.hidden = 8;
  pc.seed = 14;
  const ProbeRun run = train_probe(ds, pc);

  CHECK(run.trajectory.epochs == 13);
  CHECK(run.trajectory.samples == 60);
  CHECK(run.trajectory.classes == 3);
  for (std::size_t e = 0; e < run.trajectory.epochs; ++e) {
    for (std::size_t i = 0; i < run.trajectory.samples; ++i) {
      double sum = 0.0;
      for (float v : run.trajectory.dist(e, i)) sum += v;
      CHECK(sum == doctest::Approx(1.0).epsilon(1e-4));
    }
  }

  ScorerConfig sc;
  const auto du = du_score(select_label_column(run.trajectory, ds.labels), sc);
  const auto tdds = tdds_score(run.trajectory, sc);
  CHECK(du.size() == 60);
  CHECK(tdds.size() == 60);

  CHECK(run.embeddings.size() == 60 * 8);
  for (float v : run.embeddings) CHECK(std::isfinite(v));
}

TEST_CASE("probe training is reproducible and loss decreases") {
  BlobDatasetConfig cfg;
  cfg.n = 90;
  cfg.classes = 3;
  cfg.dim = 5;
  cfg.sigma = 0.3;
  cfg.seed = 15;
  const BlobDataset ds = gen_blobs(cfg);

  ProbeConfig pc;
  pc.epochs = 12;
  pc.hidden = 12;
  pc.seed = 16;
  const ProbeRun a = train_probe(ds, pc);
  const ProbeRun b = train_probe(ds, pc);
  CHECK(a.trajectory.values == b.trajectory.values);
  CHECK(a.embeddings == b.embeddings);
  CHECK(a.test_accuracy == b.test_accuracy);
  CHECK(a.test_accuracy.back() >= a.test_accuracy.front());
}

TEST_CASE("train_probe restricted to a subset still records everyone") {
  BlobDatasetConfig cfg;
  cfg.n = 50;
  cfg.classes = 2;
  cfg.dim = 3;
  cfg.seed = 17;
  const BlobDataset ds = gen_blobs(cfg);

  std::vector<std::int32_t> half;
  for (std::int32_t i = 0; i < 25; ++i) half.push_back(i);

  ProbeConfig pc;
  pc.epochs = 12;
  pc.hidden = 8;
  pc.seed = 18;
  const ProbeRun run = train_probe(ds, pc, &half);
  CHECK(run.trajectory.samples == 50);
  CHECK(run.train_on == half);
}

TEST_CASE("eval_downstream equals a full train run when nothing is pruned") {
  BlobDatasetConfig cfg;
  cfg.n = 80;
  cfg.classes = 4;
  cfg.dim = 4;
  cfg.sigma = 0.5;
  cfg.n_test = 60;
  cfg.seed = 19;
  const BlobDataset ds = gen_blobs(cfg);

  ProbeConfig pc;
  pc.epochs = 12;
  pc.hidden = 10;
  pc.seed = 20;

  IndexSet all;
  all.universe_size = 80;
  all.indices.resize(80);
  std::iota(all.indices.begin(), all.indices.end(), std::int64_t{0});

  const double pruned_acc = eval_downstream(ds, all, pc);
  const ProbeRun full = train_probe(ds, pc);
  CHECK(pruned_acc == full.test_accuracy.back());
  CHECK(pruned_acc >= 0.0);
  CHECK(pruned_acc <= 1.0);

  IndexSet empty;
  empty.universe_size = 80;
  CHECK_THROWS_AS(eval_downstream(ds, empty, pc), Error);
}

TEST_CASE("one kept sample per class still beats chance on separable data") {
  BlobDatasetConfig cfg;
  cfg.n = 120;
  cfg.classes = 4;
  cfg.dim = 6;
  cfg.sigma = 0.05;
  cfg.n_test = 100;
  cfg.seed = 23;
  const BlobDataset ds = gen_blobs(cfg);

  // labels are round-robin, so ids 0..3 cover every class
  IndexSet kept;
  kept.universe_size = 120;
  kept.indices = {0, 1, 2, 3};

  ProbeConfig pc;
  pc.epochs = 25;
  pc.hidden = 16;
  pc.batch = 4;
  pc.seed = 24;
  const double acc = eval_downstream(ds, kept, pc);
  CHECK(acc > 0.5);  // chance is 0.25
}

TEST_CASE("noisy samples score higher DU than clean ones on average") {
  // long training lets the probe slowly memorize wrong labels; the resulting
  // probability fluctuation is exactly what DU measures
  ScorerConfig sc;  // J = 10
  int wins = 0;
  for (std::uint64_t seed : {41ull, 42ull, 43ull}) {
    BlobDatasetConfig cfg;
    cfg.n = 300;
    cfg.classes = 5;
    cfg.dim = 8;
    cfg.sigma = 1.0;
    cfg.noise_rate = 0.10;
    cfg.n_test = 50;
    cfg.seed = seed;
    const BlobDataset ds = gen_blobs(cfg);

    ProbeConfig pc;
    pc.epochs = 150;
    pc.hidden = 128;
    pc.learning_rate = 1.0;
    pc.batch = 32;
    pc.seed = seed + 100;
    const ProbeRun run = train_probe(ds, pc);

    const auto scores = du_score(select_label_column(run.trajectory, ds.labels), sc);
    double noisy_mean = 0.0, clean_mean = 0.0;
    std::size_t noisy_count = 0, clean_count = 0;
    for (std::size_t i = 0; i < scores.size(); ++i) {
      if (ds.noisy[i]) {
        noisy_mean += scores[i];
        ++noisy_count;
      } else {
        clean_mean += scores[i];
        ++clean_count;
      }
    }
    noisy_mean /= static_cast<double>(noisy_count);
    clean_mean /= static_cast<double>(clean_count);
    if (noisy_mean > clean_mean) ++wins;
  }
  CHECK(wins == 3);
}
