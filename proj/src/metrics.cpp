#include "scorex/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "scorex/tensor_io.hpp"

namespace scorex {

double pearson(std::span<const double> a, std::span<const double> b) {
  require(a.size() == b.size(), ErrorCode::LengthMismatch, "input lengths differ");
  require(a.size() >= 2, ErrorCode::DegenerateInput, "need at least 2 pairs");
  const double n = static_cast<double>(a.size());
  double mean_a = 0.0, mean_b = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    mean_a += a[i];
    mean_b += b[i];
  }
  mean_a /= n;
  mean_b /= n;
  double cov = 0.0, var_a = 0.0, var_b = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double da = a[i] - mean_a;
    const double db = b[i] - mean_b;
    cov += da * db;
    var_a += da * da;
    var_b += db * db;
  }
  require(var_a > 0.0 && var_b > 0.0, ErrorCode::DegenerateInput,
          "zero variance input makes correlation undefined");
  return cov / std::sqrt(var_a * var_b);
}

std::vector<double> average_ranks(std::span<const double> values) {
  const std::size_t n = values.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) {
    if (values[i] != values[j]) return values[i] < values[j];
    return i < j;
  });
  std::vector<double> ranks(n, 0.0);
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    while (j + 1 < n && values[order[j + 1]] == values[order[i]]) ++j;
    // positions i..j share the value; average of 1-based ranks i+1..j+1
    const double avg = (static_cast<double>(i + 1) + static_cast<double>(j + 1)) / 2.0;
    for (std::size_t p = i; p <= j; ++p) ranks[order[p]] = avg;
    i = j + 1;
  }
  return ranks;
}

double spearman(std::span<const double> a, std::span<const double> b) {
  require(a.size() == b.size(), ErrorCode::LengthMismatch, "input lengths differ");
  const std::vector<double> ra = average_ranks(a);
  const std::vector<double> rb = average_ranks(b);
  return pearson(ra, rb);
}

CorrelationReport correlation_report(std::span<const double> a, std::span<const double> b,
                                     std::string scope) {
  CorrelationReport report;
  report.pearson = pearson(a, b);
  report.spearman = spearman(a, b);
  report.n_pairs = a.size();
  report.scope = std::move(scope);
  return report;
}

namespace {

// position of each sample when sorted by descending score, ties by id
std::vector<std::int64_t> descending_rank_positions(std::span<const double> scores) {
  const std::size_t n = scores.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) {
    if (scores[i] != scores[j]) return scores[i] > scores[j];
    return i < j;
  });
  std::vector<std::int64_t> position(n, 0);
  for (std::size_t p = 0; p < n; ++p) position[order[p]] = static_cast<std::int64_t>(p);
  return position;
}

}  // namespace

RankDiffReport rank_report(std::span<const double> gt_scores,
                           std::span<const double> pred_scores, std::size_t top_m) {
  require(gt_scores.size() == pred_scores.size(), ErrorCode::LengthMismatch,
          "score vectors differ in length");
  require(!gt_scores.empty(), ErrorCode::LengthMismatch, "need at least one sample");
  const std::size_t n = gt_scores.size();
  const auto gt_pos = descending_rank_positions(gt_scores);
  const auto pred_pos = descending_rank_positions(pred_scores);

  RankDiffReport report;
  report.abs_rank_diff.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    report.abs_rank_diff[i] = std::llabs(gt_pos[i] - pred_pos[i]);
  }

  std::vector<std::int64_t> ids(n);
  std::iota(ids.begin(), ids.end(), std::int64_t{0});
  const std::size_t m = std::min(top_m, n);

  auto by_diff_desc = [&](std::int64_t i, std::int64_t j) {
    const auto di = report.abs_rank_diff[static_cast<std::size_t>(i)];
    const auto dj = report.abs_rank_diff[static_cast<std::size_t>(j)];
    if (di != dj) return di > dj;
    return i < j;
  };
  auto by_diff_asc = [&](std::int64_t i, std::int64_t j) {
    const auto di = report.abs_rank_diff[static_cast<std::size_t>(i)];
    const auto dj = report.abs_rank_diff[static_cast<std::size_t>(j)];
    if (di != dj) return di < dj;
    return i < j;
  };

  std::vector<std::int64_t> work = ids;
  std::partial_sort(work.begin(), work.begin() + static_cast<std::ptrdiff_t>(m), work.end(),
                    by_diff_desc);
  report.highest_discrepancy.assign(work.begin(), work.begin() + static_cast<std::ptrdiff_t>(m));
  work = ids;
  std::partial_sort(work.begin(), work.begin() + static_cast<std::ptrdiff_t>(m), work.end(),
                    by_diff_asc);
  report.lowest_discrepancy.assign(work.begin(), work.begin() + static_cast<std::ptrdiff_t>(m));
  return report;
}

Histogram score_histogram(std::span<const double> scores, std::size_t n_bins) {
  require(n_bins >= 1, ErrorCode::ConfigInvalid, "need at least one bin");
  require(!scores.empty(), ErrorCode::DegenerateInput, "need at least one score");
  for (double v : scores) {
    require(std::isfinite(v), ErrorCode::NonFinite, "scores must be finite");
  }
  const auto [lo_it, hi_it] = std::minmax_element(scores.begin(), scores.end());
  const double lo = *lo_it;
  const double hi = *hi_it;

  Histogram hist;
  hist.edges.resize(n_bins + 1);
  const double width = (hi - lo) / static_cast<double>(n_bins);
  for (std::size_t b = 0; b <= n_bins; ++b) {
    hist.edges[b] = lo + width * static_cast<double>(b);
  }
  hist.edges.back() = hi;
  hist.counts.assign(n_bins, 0);
  for (double v : scores) {
    std::size_t bin = 0;
    if (hi > lo) {
      bin = static_cast<std::size_t>((v - lo) / (hi - lo) * static_cast<double>(n_bins));
      if (bin >= n_bins) bin = n_bins - 1;  // max value lands in the last bin
    }
    ++hist.counts[bin];
  }
  return hist;
}

std::string encode_histogram_csv(const Histogram& hist) {
  std::string out = "bin_lo,bin_hi,count\n";
  for (std::size_t b = 0; b < hist.counts.size(); ++b) {
    out += format_score(hist.edges[b]);
    out += ',';
    out += format_score(hist.edges[b + 1]);
    out += ',';
    out += std::to_string(hist.counts[b]);
    out += '\n';
  }
  return out;
}

std::string encode_rank_report_csv(const RankDiffReport& report) {
  std::string out = "sample_id,abs_rank_diff,group\n";
  auto emit = [&](std::span<const std::int64_t> ids, const char* group) {
    for (std::int64_t id : ids) {
      out += std::to_string(id);
      out += ',';
      out += std::to_string(report.abs_rank_diff[static_cast<std::size_t>(id)]);
      out += ',';
      out += group;
      out += '\n';
    }
  };
  emit(report.highest_discrepancy, "highest");
  emit(report.lowest_discrepancy, "lowest");
  return out;
}

}  // namespace scorex
