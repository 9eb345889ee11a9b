// Independent straight-from-the-formula reference implementations used to
// check the library. Deliberately naive: plain loops, no shared code with
// the implementations under test.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <vector>

namespace oracle {

// mean over sliding windows of the sample standard deviation
inline std::vector<double> du_score(const std::vector<float>& probs, std::size_t epochs,
                                    std::size_t samples, std::size_t window) {
  std::vector<double> out(samples, 0.0);
  const std::size_t n_windows = epochs - window;
  for (std::size_t i = 0; i < samples; ++i) {
    double total = 0.0;
    for (std::size_t k = 0; k < n_windows; ++k) {
      double mean = 0.0;
      for (std::size_t j = 0; j < window; ++j) mean += probs[(k + j) * samples + i];
      mean /= static_cast<double>(window);
      double ss = 0.0;
      for (std::size_t j = 0; j < window; ++j) {
        const double d = probs[(k + j) * samples + i] - mean;
        ss += d * d;
      }
      total += std::sqrt(ss / static_cast<double>(window - 1));
    }
    out[i] = total / static_cast<double>(n_windows);
  }
  return out;
}

inline double kl_delta(const float* prev, const float* next, std::size_t classes,
                       double floor_value) {
  double acc = 0.0;
  for (std::size_t c = 0; c < classes; ++c) {
    const double p = std::max(static_cast<double>(prev[c]), floor_value);
    const double q = std::max(static_cast<double>(next[c]), floor_value);
    acc += static_cast<double>(next[c]) * std::log(q / p);
  }
  return acc;
}

// exponentially decayed within-window variance of |delta|
inline std::vector<double> tdds_score(const std::vector<float>& dists, std::size_t epochs,
                                      std::size_t samples, std::size_t classes,
                                      std::size_t window, double beta, double floor_value) {
  std::vector<double> out(samples, 0.0);
  const std::size_t k_max = epochs - 1;
  for (std::size_t i = 0; i < samples; ++i) {
    std::vector<double> absd(k_max + 1, 0.0);
    for (std::size_t k = 1; k <= k_max; ++k) {
      const float* prev = dists.data() + ((k - 1) * samples + i) * classes;
      const float* next = dists.data() + (k * samples + i) * classes;
      absd[k] = std::fabs(kl_delta(prev, next, classes, floor_value));
    }
    double score = 0.0;
    for (std::size_t k = window; k <= k_max; ++k) {
      double inner = 0.0;
      for (std::size_t j = k - window + 1; j <= k; ++j) {
        double mean = 0.0;
        for (std::size_t m = k - window + 1; m <= k; ++m) mean += absd[m];
        mean /= static_cast<double>(window);
        inner += (absd[j] - mean) * (absd[j] - mean);
      }
      score += beta * std::pow(1.0 - beta, static_cast<double>(k_max - k)) * inner;
    }
    out[i] = score;
  }
  return out;
}

inline std::vector<double> unsupervised_du(const std::vector<float>& dists, std::size_t epochs,
                                           std::size_t samples, std::size_t classes,
                                           std::size_t window) {
  std::vector<float> column(epochs * samples);
  for (std::size_t i = 0; i < samples; ++i) {
    const float* final_row = dists.data() + ((epochs - 1) * samples + i) * classes;
    std::size_t label = 0;
    for (std::size_t c = 1; c < classes; ++c) {
      if (final_row[c] > final_row[label]) label = c;
    }
    for (std::size_t e = 0; e < epochs; ++e) {
      column[e * samples + i] = dists[(e * samples + i) * classes + label];
    }
  }
  return du_score(column, epochs, samples, window);
}

struct NaiveNeighbor {
  std::int64_t id;
  double distance;
};

// O(r * d) scan with (distance, id) ordering
inline std::vector<NaiveNeighbor> knn_query(const std::vector<float>& points, std::size_t count,
                                            std::size_t dim, const float* query, std::size_t k,
                                            std::optional<std::int64_t> exclude = {}) {
  std::vector<NaiveNeighbor> all;
  for (std::size_t r = 0; r < count; ++r) {
    if (exclude && static_cast<std::int64_t>(r) == *exclude) continue;
    double d2 = 0.0;
    for (std::size_t c = 0; c < dim; ++c) {
      const double diff = static_cast<double>(query[c]) - static_cast<double>(points[r * dim + c]);
      d2 += diff * diff;
    }
    all.push_back({static_cast<std::int64_t>(r), std::sqrt(d2)});
  }
  std::sort(all.begin(), all.end(), [](const NaiveNeighbor& a, const NaiveNeighbor& b) {
    if (a.distance != b.distance) return a.distance < b.distance;
    return a.id < b.id;
  });
  if (all.size() > k) all.resize(k);
  return all;
}

// unshifted Eq-style weighted average over the k nearest subset points
inline std::vector<double> knn_extrapolate(const std::vector<float>& subset, std::size_t m,
                                           std::size_t dim, const std::vector<double>& scores,
                                           const std::vector<float>& queries, std::size_t q,
                                           std::size_t k) {
  std::vector<double> out(q, 0.0);
  const std::size_t kk = std::min(k, m);
  for (std::size_t i = 0; i < q; ++i) {
    const auto neighbors = knn_query(subset, m, dim, queries.data() + i * dim, kk);
    double wsum = 0.0, acc = 0.0;
    for (const auto& nb : neighbors) {
      const double w = std::exp(-nb.distance);
      wsum += w;
      acc += w * scores[static_cast<std::size_t>(nb.id)];
    }
    out[i] = acc / wsum;
  }
  return out;
}

}  // namespace oracle
