#pragma once

#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <vector>

#include "scorex/error.hpp"

namespace scorex {

/// Dense row-major float32 array. The on-disk form is the NPY v1.0
/// container restricted to little-endian f4, C order.
struct DenseTensor {
  std::vector<std::size_t> shape;
  std::vector<float> data;

  DenseTensor() = default;
  DenseTensor(std::vector<std::size_t> shape_, std::vector<float> data_)
      : shape(std::move(shape_)), data(std::move(data_)) {
    require(data.size() == element_count(shape), ErrorCode::ShapeMismatch,
            "tensor data length does not match shape");
  }

  static std::size_t element_count(const std::vector<std::size_t>& shape) {
    std::size_t n = 1;
    for (std::size_t d : shape) n *= d;
    return n;
  }

  static DenseTensor zeros(std::vector<std::size_t> shape) {
    std::size_t n = element_count(shape);
    return DenseTensor(std::move(shape), std::vector<float>(n, 0.0f));
  }

  std::size_t size() const { return data.size(); }
  std::size_t rank() const { return shape.size(); }

  std::size_t dim(std::size_t axis) const {
    require(axis < shape.size(), ErrorCode::ShapeMismatch, "axis out of range");
    return shape[axis];
  }

  bool same_shape(const DenseTensor& other) const { return shape == other.shape; }
};

/// Sorted set of unique sample indices drawn from a universe of known size.
struct IndexSet {
  std::vector<std::int64_t> indices;  // sorted ascending, unique
  std::int64_t universe_size = 0;

  std::size_t size() const { return indices.size(); }
  bool contains(std::int64_t id) const;
  /// Sorted complement within the universe.
  IndexSet complement() const;
  /// Validates sortedness, uniqueness and bounds.
  void validate() const;
};

enum class Provenance : std::uint8_t {
  computed,
  extrapolated_knn,
  extrapolated_gnn,
  random,
};

const char* provenance_name(Provenance p);
Provenance provenance_from_name(const std::string& name);

struct ScoreRow {
  std::int64_t sample_id = 0;
  double score = 0.0;
  Provenance provenance = Provenance::computed;
  bool in_subset = false;
};

/// Per-sample importance scores, kept sorted by sample_id.
struct ScoreTable {
  std::vector<ScoreRow> rows;

  std::size_t size() const { return rows.size(); }
  void sort_by_id();
  /// Throws DuplicateId on repeated sample ids (table must be sorted).
  void check_unique_ids() const;
  std::vector<double> scores() const;
  std::vector<std::int64_t> ids() const;
  const ScoreRow* find(std::int64_t sample_id) const;
};

}  // namespace scorex
