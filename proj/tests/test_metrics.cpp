#include <doctest.h>

#include <cmath>

#include "scorex/metrics.hpp"
#include "scorex/rng.hpp"

using namespace scorex;

TEST_CASE("pearson exact values") {
  const std::vector<double> a = {1, 2, 3};
  CHECK(pearson(a, std::vector<double>{2, 4, 6}) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(pearson(a, std::vector<double>{3, 2, 1}) == doctest::Approx(-1.0).epsilon(1e-12));
  CHECK(pearson(a, std::vector<double>{1, 3, 2}) == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("pearson degenerate input") {
  const std::vector<double> flat = {2, 2, 2};
  const std::vector<double> a = {1, 2, 3};
  CHECK_THROWS_AS(pearson(a, flat), Error);
  CHECK_THROWS_AS(pearson(a, std::vector<double>{1.0}), Error);
}

TEST_CASE("pearson affine invariance up to sign") {
  Rng rng(5);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<double> a(20);
    for (auto& v : a) v = rng.normal();
    std::vector<double> pos(20), neg(20);
    const double alpha = 0.5 + rng.uniform01() * 3.0;
    const double gamma = rng.normal();
    for (std::size_t i = 0; i < a.size(); ++i) {
      pos[i] = alpha * a[i] + gamma;
      neg[i] = -alpha * a[i] + gamma;
    }
    CHECK(pearson(a, pos) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(pearson(a, neg) == doctest::Approx(-1.0).epsilon(1e-12));
  }
}

TEST_CASE("spearman values and ties") {
  const std::vector<double> a = {1, 2, 3};
  CHECK(spearman(a, std::vector<double>{1, 3, 2}) == doctest::Approx(0.5).epsilon(1e-12));

  // monotone transform invariance
  Rng rng(6);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<double> x(15), y(15);
    for (std::size_t i = 0; i < x.size(); ++i) {
      x[i] = rng.normal();
      y[i] = std::exp(0.5 * x[i]) + 3.0;  // strictly increasing in x
    }
    CHECK(spearman(x, y) == doctest::Approx(1.0).epsilon(1e-12));
  }

  const auto ranks = average_ranks(std::vector<double>{1, 1, 2});
  CHECK(ranks == std::vector<double>{1.5, 1.5, 3.0});
}

TEST_CASE("rank_report basics") {
  const std::vector<double> gt = {0.9, 0.5, 0.3, 0.1};

  SUBCASE("identical scores give zero differences") {
    const auto report = rank_report(gt, gt, 2);
    for (auto d : report.abs_rank_diff) CHECK(d == 0);
  }

  SUBCASE("full reversal gives n-1 extremes") {
    std::vector<double> neg(gt.size());
    for (std::size_t i = 0; i < gt.size(); ++i) neg[i] = -gt[i];
    const auto report = rank_report(gt, neg, 1);
    CHECK(report.abs_rank_diff[0] == 3);
    CHECK(report.abs_rank_diff[3] == 3);
  }

  SUBCASE("one swapped pair gives exactly two unit differences") {
    std::vector<double> pred = gt;
    std::swap(pred[1], pred[2]);
    const auto report = rank_report(gt, pred, 4);
    CHECK(report.abs_rank_diff == std::vector<std::int64_t>{0, 1, 1, 0});
    CHECK(report.highest_discrepancy[0] == 1);
    CHECK(report.highest_discrepancy[1] == 2);
  }

  SUBCASE("swapping gt and pred preserves magnitudes") {
    Rng rng(8);
    std::vector<double> pred(gt.size());
    for (auto& v : pred) v = rng.uniform01();
    const auto fwd = rank_report(gt, pred, 2);
    const auto bwd = rank_report(pred, gt, 2);
    CHECK(fwd.abs_rank_diff == bwd.abs_rank_diff);
  }
}

TEST_CASE("rank_report length mismatch") {
  CHECK_THROWS_AS(rank_report(std::vector<double>{1, 2}, std::vector<double>{1}, 1), Error);
}

TEST_CASE("score_histogram") {
  SUBCASE("all equal lands in one bin") {
    const std::vector<double> flat(17, 3.5);
    const auto hist = score_histogram(flat, 5);
    std::size_t total = 0, occupied = 0;
    for (auto c : hist.counts) {
      total += c;
      occupied += c > 0 ? 1 : 0;
    }
    CHECK(total == 17);
    CHECK(occupied == 1);
  }

  SUBCASE("uniform grid of 100 over 10 bins gives 10 per bin") {
    std::vector<double> grid(100);
    for (std::size_t i = 0; i < 100; ++i) grid[i] = static_cast<double>(i);
    const auto hist = score_histogram(grid, 10);
    for (auto c : hist.counts) CHECK(c == 10);
  }

  SUBCASE("counts always conserve n") {
    Rng rng(12);
    for (int trial = 0; trial < 20; ++trial) {
      std::vector<double> scores(1 + rng.below(200));
      for (auto& v : scores) v = rng.normal();
      const auto hist = score_histogram(scores, 1 + rng.below(12));
      std::size_t total = 0;
      for (auto c : hist.counts) total += c;
      CHECK(total == scores.size());
    }
  }
}

TEST_CASE("correlation report carries scope") {
  const std::vector<double> a = {1, 2, 3, 4};
  const std::vector<double> b = {1.1, 2.3, 2.9, 4.2};
  const auto report = correlation_report(a, b, "residual");
  CHECK(report.scope == "residual");
  CHECK(report.n_pairs == 4);
  CHECK(std::fabs(report.pearson) <= 1.0 + 1e-12);
  CHECK(std::fabs(report.spearman) <= 1.0 + 1e-12);
}
