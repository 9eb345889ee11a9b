#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "scorex/error.hpp"

namespace scorex {

/// kNN sample graph: undirected weighted adjacency in CSR form (no stored
/// self-edges) plus the node feature matrix. Edge weight is
/// exp(-euclidean distance) in embedding space.
struct SampleGraph {
  std::size_t n_nodes = 0;
  std::size_t feature_dim = 0;
  std::vector<float> features;  // n x f, embeddings (+ one-hot labels if given)

  std::vector<std::size_t> row_ptr;  // n + 1
  std::vector<std::int32_t> col;     // neighbors, ascending per row
  std::vector<double> weight;

  std::size_t degree(std::size_t node) const { return row_ptr[node + 1] - row_ptr[node]; }
  std::size_t max_degree() const;
  /// Weight of edge (u, v); 0 if absent.
  double edge_weight(std::size_t u, std::size_t v) const;
  std::span<const std::int32_t> neighbors(std::size_t node) const {
    return {col.data() + row_ptr[node], degree(node)};
  }
  std::span<const float> feature_row(std::size_t node) const {
    return {features.data() + node * feature_dim, feature_dim};
  }
};

/// Builds the kNN graph: directed k-nearest edges (self excluded)
/// symmetrized by union. Optional labels append a one-hot block to the
/// feature matrix.
SampleGraph build_graph(std::span<const float> embeddings, std::size_t n_nodes,
                        std::size_t dim, std::size_t k,
                        std::span<const std::int32_t> labels = {},
                        std::size_t num_classes = 0, int threads = 1);

/// Symmetric renormalized operator A_hat = D^{-1/2} (A + I) D^{-1/2} with
/// unit self-loops; D is the diagonal degree of A + I. CSR with self entries
/// included, columns ascending per row.
struct NormalizedAdjacency {
  std::size_t n_nodes = 0;
  std::vector<std::size_t> row_ptr;
  std::vector<std::int32_t> col;
  std::vector<double> value;
  std::vector<double> degree;  // 1 + weighted degree, per node

  std::span<const std::int32_t> row_cols(std::size_t node) const {
    return {col.data() + row_ptr[node], row_ptr[node + 1] - row_ptr[node]};
  }
  std::span<const double> row_values(std::size_t node) const {
    return {value.data() + row_ptr[node], row_ptr[node + 1] - row_ptr[node]};
  }
};

NormalizedAdjacency normalize_adjacency(const SampleGraph& graph);

}  // namespace scorex
