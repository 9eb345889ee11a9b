#include "scorex/knn.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <unordered_set>

#include "scorex/parallel.hpp"

namespace scorex {

namespace {

double squared_distance(std::span<const float> a, std::span<const float> b) {
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = static_cast<double>(a[i]) - static_cast<double>(b[i]);
    acc += d * d;
  }
  return acc;
}

void check_finite(std::span<const float> values, const char* what) {
  for (float v : values) {
    require(std::isfinite(v), ErrorCode::NonFinite, std::string(what) + " must be finite");
  }
}

}  // namespace

KnnIndex build_index(std::span<const float> points, std::size_t count, std::size_t dim) {
  std::vector<std::int64_t> ids(count);
  std::iota(ids.begin(), ids.end(), std::int64_t{0});
  return build_index(points, count, dim, ids);
}

KnnIndex build_index(std::span<const float> points, std::size_t count, std::size_t dim,
                     std::span<const std::int64_t> ids) {
  require(count >= 1, ErrorCode::EmptyReference, "reference set is empty");
  require(dim >= 1, ErrorCode::DimensionMismatch, "dimension must be at least 1");
  require(points.size() == count * dim, ErrorCode::DimensionMismatch,
          "points buffer does not match count x dim");
  require(ids.size() == count, ErrorCode::DimensionMismatch, "ids length mismatch");
  check_finite(points, "reference points");
  std::unordered_set<std::int64_t> seen;
  for (std::int64_t id : ids) {
    require(seen.insert(id).second, ErrorCode::DuplicateId,
            "duplicate reference id " + std::to_string(id));
  }
  KnnIndex index;
  index.dim = dim;
  index.points.assign(points.begin(), points.end());
  index.ids.assign(ids.begin(), ids.end());
  return index;
}

NeighborList knn_query(const KnnIndex& index, std::span<const float> query, std::size_t k,
                       std::optional<std::int64_t> exclude_id) {
  require(k >= 1, ErrorCode::DimensionMismatch, "k must be at least 1");
  require(query.size() == index.dim, ErrorCode::DimensionMismatch,
          "query dimension does not match index");
  check_finite(query, "query point");

  struct Candidate {
    double d2;
    std::int64_t id;
  };
  std::vector<Candidate> candidates;
  candidates.reserve(index.size());
  for (std::size_t row = 0; row < index.size(); ++row) {
    const std::int64_t id = index.ids[row];
    if (exclude_id && id == *exclude_id) continue;
    candidates.push_back({squared_distance(query, index.point(row)), id});
  }

  const std::size_t take = std::min(k, candidates.size());
  auto less = [](const Candidate& a, const Candidate& b) {
    if (a.d2 != b.d2) return a.d2 < b.d2;
    return a.id < b.id;
  };
  std::partial_sort(candidates.begin(), candidates.begin() + static_cast<std::ptrdiff_t>(take),
                    candidates.end(), less);

  NeighborList out;
  out.reserve(take);
  for (std::size_t i = 0; i < take; ++i) {
    out.push_back({candidates[i].id, std::sqrt(candidates[i].d2)});
  }
  return out;
}

std::vector<double> knn_extrapolate(std::span<const float> subset_embeddings,
                                    std::size_t subset_count, std::size_t dim,
                                    std::span<const double> subset_scores,
                                    std::span<const float> query_embeddings,
                                    std::size_t query_count,
                                    const KnnExtrapolationConfig& cfg) {
  require(subset_count >= 1, ErrorCode::EmptySubset, "subset is empty");
  require(cfg.k >= 1, ErrorCode::DimensionMismatch, "k must be at least 1");
  require(subset_scores.size() == subset_count, ErrorCode::DimensionMismatch,
          "subset scores length mismatch");
  require(query_embeddings.size() == query_count * dim, ErrorCode::DimensionMismatch,
          "query buffer does not match count x dim");

  std::vector<float> subset_copy;
  std::vector<float> query_copy;
  std::span<const float> subset_view = subset_embeddings;
  std::span<const float> query_view = query_embeddings;
  if (cfg.normalize_embeddings) {
    auto unit_rows = [dim](std::span<const float> src, std::size_t rows) {
      std::vector<float> out(src.begin(), src.end());
      for (std::size_t r = 0; r < rows; ++r) {
        double norm2 = 0.0;
        for (std::size_t c = 0; c < dim; ++c) {
          const double v = out[r * dim + c];
          norm2 += v * v;
        }
        if (norm2 > 0.0) {
          const double inv = 1.0 / std::sqrt(norm2);
          for (std::size_t c = 0; c < dim; ++c) {
            out[r * dim + c] = static_cast<float>(out[r * dim + c] * inv);
          }
        }
      }
      return out;
    };
    subset_copy = unit_rows(subset_embeddings, subset_count);
    query_copy = unit_rows(query_embeddings, query_count);
    subset_view = subset_copy;
    query_view = query_copy;
  }

  const KnnIndex index = build_index(subset_view, subset_count, dim);
  const std::size_t k = std::min(cfg.k, subset_count);

  std::vector<double> out(query_count, 0.0);
  parallel_for(query_count, cfg.threads, [&](std::size_t q) {
    const NeighborList neighbors =
        knn_query(index, query_view.subspan(q * dim, dim), k);
    const double d_min = neighbors.front().distance;
    double weight_sum = 0.0;
    double weighted = 0.0;
    for (const Neighbor& nb : neighbors) {
      const double w = std::exp(-(nb.distance - d_min));
      weight_sum += w;
      weighted += w * subset_scores[static_cast<std::size_t>(nb.id)];
    }
    out[q] = weighted / weight_sum;
  });
  return out;
}

}  // namespace scorex
