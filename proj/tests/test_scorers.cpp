#include <doctest.h>

#include <algorithm>
#include <numeric>

#include "oracles.hpp"
#include "scorex/rng.hpp"
#include "scorex/scorers.hpp"

using namespace scorex;

namespace {

DistTrajectory random_dist_trajectory(std::size_t epochs, std::size_t samples,
                                      std::size_t classes, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<float> values(epochs * samples * classes);
  for (std::size_t e = 0; e < epochs; ++e) {
    for (std::size_t i = 0; i < samples; ++i) {
      double sum = 0.0;
      std::vector<double> raw(classes);
      for (std::size_t c = 0; c < classes; ++c) {
        raw[c] = -std::log(1.0 - rng.uniform01());
        sum += raw[c];
      }
      for (std::size_t c = 0; c < classes; ++c) {
        values[(e * samples + i) * classes + c] = static_cast<float>(raw[c] / sum);
      }
    }
  }
  // float rounding can leave slices off by ~1e-7; renormalize the largest entry
  for (std::size_t e = 0; e < epochs; ++e) {
    for (std::size_t i = 0; i < samples; ++i) {
      float* row = values.data() + (e * samples + i) * classes;
      float total = 0.0f;
      for (std::size_t c = 0; c < classes; ++c) total += row[c];
      row[0] += 1.0f - total;
    }
  }
  return DistTrajectory(epochs, samples, classes, std::move(values));
}

}  // namespace

TEST_CASE("du_window_std basics") {
  CHECK(du_window_std(std::vector<float>{0.5f, 0.5f, 0.5f}) == 0.0);
  CHECK(du_window_std(std::vector<float>{0.2f, 0.8f}) ==
        doctest::Approx(0.4242640750339558).epsilon(1e-12));
  // permutation symmetry
  Rng rng(3);
  std::vector<float> w(6);
  for (auto& v : w) v = static_cast<float>(rng.uniform01());
  std::vector<float> p = w;
  std::sort(p.begin(), p.end());
  CHECK(du_window_std(w) == du_window_std(p));
  CHECK_THROWS_AS(du_window_std(std::vector<float>{0.5f}), Error);
}

TEST_CASE("du_score matches the hand-derived example") {
  ProbTrajectory traj(4, 1, {0.2f, 0.8f, 0.8f, 0.8f});
  ScorerConfig cfg;
  cfg.window = 2;
  const auto scores = du_score(traj, cfg);
  CHECK(scores[0] == doctest::Approx(0.2121320375169779).epsilon(1e-12));
}

TEST_CASE("du_score is zero on constant trajectories") {
  std::vector<float> values(6 * 4, 0.0f);
  for (std::size_t e = 0; e < 6; ++e) {
    for (std::size_t i = 0; i < 4; ++i) values[e * 4 + i] = 0.1f * (static_cast<float>(i) + 1.0f);
  }
  ProbTrajectory traj(6, 4, values);
  ScorerConfig cfg;
  cfg.window = 3;
  for (double s : du_score(traj, cfg)) CHECK(s == 0.0);
}

TEST_CASE("du_score is sample-permutation equivariant") {
  Rng rng(11);
  const std::size_t epochs = 12, n = 9;
  std::vector<float> values(epochs * n);
  for (auto& v : values) v = static_cast<float>(rng.uniform01());
  ProbTrajectory traj(epochs, n, values);

  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), std::size_t{0});
  rng.shuffle(perm);
  std::vector<float> permuted(epochs * n);
  for (std::size_t e = 0; e < epochs; ++e) {
    for (std::size_t i = 0; i < n; ++i) permuted[e * n + perm[i]] = values[e * n + i];
  }
  ProbTrajectory traj_p(epochs, n, permuted);

  ScorerConfig cfg;
  const auto a = du_score(traj, cfg);
  const auto b = du_score(traj_p, cfg);
  for (std::size_t i = 0; i < n; ++i) CHECK(a[i] == b[perm[i]]);
}

TEST_CASE("du_score rejects short trajectories") {
  ProbTrajectory traj(3, 1, {0.1f, 0.2f, 0.3f});
  ScorerConfig cfg;
  cfg.window = 3;  // needs E >= 4
  CHECK_THROWS_AS(du_score(traj, cfg), Error);
}

TEST_CASE("pseudo_labels argmax with lowest-index ties") {
  const std::vector<float> dists = {0.1f, 0.7f, 0.2f,   // -> 1
                                    0.5f, 0.5f, 0.0f,   // tie -> 0
                                    0.25f, 0.25f, 0.5f};
  const auto labels = pseudo_labels(dists, 3, 3);
  CHECK(labels == std::vector<std::int32_t>{1, 0, 2});
  const std::vector<float> uniform = {0.25f, 0.25f, 0.25f, 0.25f};
  CHECK(pseudo_labels(uniform, 1, 4)[0] == 0);
}

TEST_CASE("unsupervised_du equals du over the pseudo-label column") {
  const DistTrajectory traj = random_dist_trajectory(8, 5, 3, 42);
  ScorerConfig cfg;
  cfg.window = 4;
  const auto direct = unsupervised_du(traj, cfg);

  const std::size_t last = traj.epochs - 1;
  std::span<const float> final_block(traj.values.data() + last * traj.samples * traj.classes,
                                     traj.samples * traj.classes);
  const auto labels = pseudo_labels(final_block, traj.samples, traj.classes);
  const auto composed = du_score(select_label_column(traj, labels), cfg);
  for (std::size_t i = 0; i < direct.size(); ++i) CHECK(direct[i] == composed[i]);
}

TEST_CASE("unsupervised_du single-sample example") {
  // class-1 probabilities 0.2, 0.8, 0.8, 0.8 with final argmax = 1
  std::vector<float> values = {0.8f, 0.2f, 0.2f, 0.8f, 0.2f, 0.8f, 0.2f, 0.8f};
  DistTrajectory traj(4, 1, 2, values);
  ScorerConfig cfg;
  cfg.window = 2;
  CHECK(unsupervised_du(traj, cfg)[0] == doctest::Approx(0.2121320375169779).epsilon(1e-12));
}

TEST_CASE("tdds_delta examples") {
  const std::vector<float> p = {0.5f, 0.5f};
  CHECK(tdds_delta(p, p, 1e-12) == 0.0);
  const std::vector<float> q = {0.9f, 0.1f};
  CHECK(tdds_delta(p, q, 1e-12) == doctest::Approx(0.36806416840458001).epsilon(1e-12));
  const std::vector<float> onehot_a = {1.0f, 0.0f};
  const std::vector<float> onehot_b = {0.0f, 1.0f};
  CHECK(tdds_delta(onehot_a, onehot_b, 1e-12) ==
        doctest::Approx(27.631021115928547).epsilon(1e-12));
}

TEST_CASE("tdds_delta(p, p) == 0 for random distributions") {
  const DistTrajectory traj = random_dist_trajectory(1, 20, 6, 7);
  for (std::size_t i = 0; i < traj.samples; ++i) {
    const auto d = traj.dist(0, i);
    CHECK(tdds_delta(d, d, 1e-12) == 0.0);
  }
}

TEST_CASE("tdds_score zero cases") {
  ScorerConfig cfg;
  cfg.window = 2;
  // identical predictions every epoch -> all deltas zero
  std::vector<float> flat;
  for (int e = 0; e < 5; ++e) {
    flat.insert(flat.end(), {0.3f, 0.7f});
  }
  DistTrajectory constant(5, 1, 2, flat);
  CHECK(tdds_score(constant, cfg)[0] == 0.0);

  // alternating between two distributions: |delta| constant per window
  std::vector<float> alt;
  for (int e = 0; e < 6; ++e) {
    if (e % 2 == 0) {
      alt.insert(alt.end(), {0.3f, 0.7f});
    } else {
      alt.insert(alt.end(), {0.7f, 0.3f});
    }
  }
  DistTrajectory alternating(6, 1, 2, alt);
  CHECK(tdds_score(alternating, cfg)[0] == doctest::Approx(0.0).epsilon(1e-15));
}

TEST_CASE("tdds_score matches the frozen hand case") {
  const std::vector<float> values = {0.7f, 0.3f, 0.4f, 0.6f, 0.9f, 0.1f, 0.5f, 0.5f};
  DistTrajectory traj(4, 1, 2, values);
  ScorerConfig cfg;
  cfg.window = 2;
  cfg.beta = 0.9;
  CHECK(tdds_score(traj, cfg)[0] ==
        doctest::Approx(0.0065014390041652258).epsilon(1e-10));
  const auto ref = oracle::tdds_score(values, 4, 1, 2, 2, 0.9, 1e-12);
  CHECK(tdds_score(traj, cfg)[0] == doctest::Approx(ref[0]).epsilon(1e-12));
}

TEST_CASE("tdds_score precondition") {
  const DistTrajectory traj = random_dist_trajectory(11, 2, 3, 5);
  ScorerConfig cfg;  // J = 10 needs E >= 12
  CHECK_THROWS_AS(tdds_score(traj, cfg), Error);
}

TEST_CASE("scorers match naive oracles on random trajectories") {
  ScorerConfig cfg;  // J = 10 defaults
  for (std::uint64_t seed : {101ull, 202ull, 303ull}) {
    const DistTrajectory traj = random_dist_trajectory(12, 32, 5, seed);

    const auto tdds_impl = tdds_score(traj, cfg);
    const auto tdds_ref =
        oracle::tdds_score(traj.values, 12, 32, 5, 10, cfg.beta, cfg.prob_floor);
    const auto unsup_impl = unsupervised_du(traj, cfg);
    const auto unsup_ref = oracle::unsupervised_du(traj.values, 12, 32, 5, 10);

    std::vector<std::int32_t> labels(32);
    Rng rng(seed ^ 0xf00d);
    for (auto& l : labels) l = static_cast<std::int32_t>(rng.below(5));
    const ProbTrajectory probs = select_label_column(traj, labels);
    const auto du_impl = du_score(probs, cfg);
    const auto du_ref = oracle::du_score(probs.values, 12, 32, 10);

    for (std::size_t i = 0; i < 32; ++i) {
      CHECK(tdds_impl[i] == doctest::Approx(tdds_ref[i]).epsilon(1e-9));
      CHECK(unsup_impl[i] == doctest::Approx(unsup_ref[i]).epsilon(1e-9));
      CHECK(du_impl[i] == doctest::Approx(du_ref[i]).epsilon(1e-9));
      CHECK(tdds_impl[i] >= 0.0);
      CHECK(unsup_impl[i] >= 0.0);
      CHECK(du_impl[i] >= 0.0);
    }
  }
}

TEST_CASE("scorer outputs are deterministic and thread-count independent") {
  const DistTrajectory traj = random_dist_trajectory(12, 24, 4, 5150);
  ScorerConfig one;
  ScorerConfig four;
  four.threads = 4;
  const auto a = tdds_score(traj, one);
  const auto b = tdds_score(traj, four);
  CHECK(a == b);
  const auto c = unsupervised_du(traj, one);
  const auto d = unsupervised_du(traj, four);
  CHECK(c == d);
}
