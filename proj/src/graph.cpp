#include "scorex/graph.hpp"

#include <algorithm>
#include <cmath>

#include "scorex/knn.hpp"
#include "scorex/parallel.hpp"

namespace scorex {

std::size_t SampleGraph::max_degree() const {
  std::size_t best = 0;
  for (std::size_t u = 0; u < n_nodes; ++u) best = std::max(best, degree(u));
  return best;
}

double SampleGraph::edge_weight(std::size_t u, std::size_t v) const {
  const auto nbrs = neighbors(u);
  const auto it = std::lower_bound(nbrs.begin(), nbrs.end(), static_cast<std::int32_t>(v));
  if (it != nbrs.end() && *it == static_cast<std::int32_t>(v)) {
    return weight[row_ptr[u] + static_cast<std::size_t>(it - nbrs.begin())];
  }
  return 0.0;
}

SampleGraph build_graph(std::span<const float> embeddings, std::size_t n_nodes,
                        std::size_t dim, std::size_t k,
                        std::span<const std::int32_t> labels, std::size_t num_classes,
                        int threads) {
  require(n_nodes >= 2, ErrorCode::TooFewNodes, "graph needs at least 2 nodes");
  require(k >= 1, ErrorCode::ConfigInvalid, "k must be at least 1");
  require(embeddings.size() == n_nodes * dim, ErrorCode::DimensionMismatch,
          "embedding buffer does not match n x dim");
  if (!labels.empty()) {
    require(labels.size() == n_nodes, ErrorCode::DimensionMismatch,
            "label vector length does not match node count");
    require(num_classes >= 1, ErrorCode::ConfigInvalid, "num_classes required with labels");
    for (std::int32_t c : labels) {
      require(c >= 0 && static_cast<std::size_t>(c) < num_classes, ErrorCode::LabelOutOfRange,
              "label " + std::to_string(c) + " outside class range");
    }
  }

  const KnnIndex index = build_index(embeddings, n_nodes, dim);
  const std::size_t k_eff = std::min(k, n_nodes - 1);

  // directed kNN lists, self excluded
  std::vector<NeighborList> directed(n_nodes);
  parallel_for(n_nodes, threads, [&](std::size_t u) {
    directed[u] = knn_query(index, embeddings.subspan(u * dim, dim), k_eff,
                            static_cast<std::int64_t>(u));
  });

  // symmetrize by union; distance is symmetric so both directions agree
  struct Edge {
    std::int32_t u, v;
    double w;
  };
  std::vector<Edge> edges;
  edges.reserve(n_nodes * k_eff * 2);
  for (std::size_t u = 0; u < n_nodes; ++u) {
    for (const Neighbor& nb : directed[u]) {
      const double w = std::exp(-nb.distance);
      edges.push_back({static_cast<std::int32_t>(u), static_cast<std::int32_t>(nb.id), w});
      edges.push_back({static_cast<std::int32_t>(nb.id), static_cast<std::int32_t>(u), w});
    }
  }
  std::sort(edges.begin(), edges.end(), [](const Edge& a, const Edge& b) {
    if (a.u != b.u) return a.u < b.u;
    return a.v < b.v;
  });

  SampleGraph graph;
  graph.n_nodes = n_nodes;
  graph.row_ptr.assign(n_nodes + 1, 0);
  for (std::size_t i = 0; i < edges.size(); ++i) {
    if (i > 0 && edges[i].u == edges[i - 1].u && edges[i].v == edges[i - 1].v) continue;
    graph.col.push_back(edges[i].v);
    graph.weight.push_back(edges[i].w);
    ++graph.row_ptr[static_cast<std::size_t>(edges[i].u) + 1];
  }
  for (std::size_t u = 0; u < n_nodes; ++u) graph.row_ptr[u + 1] += graph.row_ptr[u];

  // features: embeddings plus optional one-hot label block
  graph.feature_dim = dim + (labels.empty() ? 0 : num_classes);
  graph.features.assign(n_nodes * graph.feature_dim, 0.0f);
  for (std::size_t u = 0; u < n_nodes; ++u) {
    std::copy_n(embeddings.begin() + static_cast<std::ptrdiff_t>(u * dim), dim,
                graph.features.begin() + static_cast<std::ptrdiff_t>(u * graph.feature_dim));
    if (!labels.empty()) {
      graph.features[u * graph.feature_dim + dim + static_cast<std::size_t>(labels[u])] = 1.0f;
    }
  }
  return graph;
}

NormalizedAdjacency normalize_adjacency(const SampleGraph& graph) {
  const std::size_t n = graph.n_nodes;
  NormalizedAdjacency norm;
  norm.n_nodes = n;
  norm.degree.resize(n);
  for (std::size_t u = 0; u < n; ++u) {
    double d = 1.0;  // unit self-loop
    for (std::size_t e = graph.row_ptr[u]; e < graph.row_ptr[u + 1]; ++e) {
      d += graph.weight[e];
    }
    norm.degree[u] = d;
  }

  norm.row_ptr.assign(n + 1, 0);
  for (std::size_t u = 0; u < n; ++u) {
    norm.row_ptr[u + 1] = norm.row_ptr[u] + graph.degree(u) + 1;
  }
  norm.col.resize(norm.row_ptr[n]);
  norm.value.resize(norm.row_ptr[n]);
  for (std::size_t u = 0; u < n; ++u) {
    std::size_t out = norm.row_ptr[u];
    bool self_done = false;
    const std::int32_t self = static_cast<std::int32_t>(u);
    for (std::size_t e = graph.row_ptr[u]; e < graph.row_ptr[u + 1]; ++e) {
      const std::int32_t v = graph.col[e];
      if (!self_done && self < v) {
        norm.col[out] = self;
        norm.value[out] = 1.0 / norm.degree[u];
        ++out;
        self_done = true;
      }
      norm.col[out] = v;
      norm.value[out] =
          graph.weight[e] / std::sqrt(norm.degree[u] * norm.degree[static_cast<std::size_t>(v)]);
      ++out;
    }
    if (!self_done) {
      norm.col[out] = self;
      norm.value[out] = 1.0 / norm.degree[u];
      ++out;
    }
  }
  return norm;
}

}  // namespace scorex
