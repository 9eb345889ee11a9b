#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "scorex/error.hpp"

namespace scorex {

/// Immutable reference set for exact nearest-neighbor queries under
/// Euclidean distance. Brute force by design: desk-scale sizes keep it fast
/// and the results deterministic.
struct KnnIndex {
  std::size_t dim = 0;
  std::vector<float> points;      // r x dim, row-major
  std::vector<std::int64_t> ids;  // r, unique

  std::size_t size() const { return ids.size(); }
  std::span<const float> point(std::size_t row) const {
    return {points.data() + row * dim, dim};
  }
};

struct Neighbor {
  std::int64_t id = 0;
  double distance = 0.0;
};

/// Neighbors sorted ascending by distance, exact ties by smaller id.
using NeighborList = std::vector<Neighbor>;

KnnIndex build_index(std::span<const float> points, std::size_t count, std::size_t dim);
KnnIndex build_index(std::span<const float> points, std::size_t count, std::size_t dim,
                     std::span<const std::int64_t> ids);

NeighborList knn_query(const KnnIndex& index, std::span<const float> query, std::size_t k,
                       std::optional<std::int64_t> exclude_id = std::nullopt);

struct KnnExtrapolationConfig {
  std::size_t k = 20;
  bool normalize_embeddings = false;  // optional unit-norm preprocessing
  int threads = 1;
};

/// Exp-of-negative-distance weighted neighbor average. Weights are computed
/// as exp(-(d_i - d_min)), which cancels in the normalization but cannot
/// underflow when every distance is large. Output for each query lies inside
/// [min, max] of its k neighbor scores.
std::vector<double> knn_extrapolate(std::span<const float> subset_embeddings,
                                    std::size_t subset_count, std::size_t dim,
                                    std::span<const double> subset_scores,
                                    std::span<const float> query_embeddings,
                                    std::size_t query_count,
                                    const KnnExtrapolationConfig& cfg);

}  // namespace scorex
