#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "scorex/error.hpp"

namespace scorex {

struct CorrelationReport {
  double pearson = 0.0;
  double spearman = 0.0;
  std::size_t n_pairs = 0;
  std::string scope = "all";  // which samples the pairs came from
};

/// Product-moment correlation; throws DegenerateInput on zero variance.
double pearson(std::span<const double> a, std::span<const double> b);

/// Pearson correlation of average ranks (ties get the mean of the ranks
/// they span).
double spearman(std::span<const double> a, std::span<const double> b);

/// 1-based fractional ranks with average-rank tie handling.
std::vector<double> average_ranks(std::span<const double> values);

CorrelationReport correlation_report(std::span<const double> a, std::span<const double> b,
                                     std::string scope);

struct RankDiffReport {
  std::vector<std::int64_t> abs_rank_diff;      // per sample id
  std::vector<std::int64_t> highest_discrepancy;  // top_m ids, largest |drank| first
  std::vector<std::int64_t> lowest_discrepancy;   // top_m ids, smallest |drank| first
};

/// Ranks both score vectors by descending score (ties by id) and reports
/// per-sample absolute rank differences plus the extremes.
RankDiffReport rank_report(std::span<const double> gt_scores,
                           std::span<const double> pred_scores, std::size_t top_m);

struct Histogram {
  std::vector<double> edges;        // n_bins + 1 edges over [min, max]
  std::vector<std::size_t> counts;  // n_bins counts, summing to n
};

Histogram score_histogram(std::span<const double> scores, std::size_t n_bins);

std::string encode_histogram_csv(const Histogram& hist);
std::string encode_rank_report_csv(const RankDiffReport& report);

}  // namespace scorex
