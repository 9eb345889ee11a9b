#include "scorex/tensor.hpp"

#include <algorithm>

namespace scorex {

bool IndexSet::contains(std::int64_t id) const {
  return std::binary_search(indices.begin(), indices.end(), id);
}

IndexSet IndexSet::complement() const {
  IndexSet out;
  out.universe_size = universe_size;
  out.indices.reserve(static_cast<std::size_t>(universe_size) - indices.size());
  std::size_t pos = 0;
  for (std::int64_t id = 0; id < universe_size; ++id) {
    if (pos < indices.size() && indices[pos] == id) {
      ++pos;
    } else {
      out.indices.push_back(id);
    }
  }
  return out;
}

void IndexSet::validate() const {
  for (std::size_t i = 0; i < indices.size(); ++i) {
    require(indices[i] >= 0 && indices[i] < universe_size, ErrorCode::ShapeMismatch,
            "index outside universe");
    if (i > 0) {
      require(indices[i] > indices[i - 1], ErrorCode::DuplicateId,
              "indices not strictly increasing");
    }
  }
}

const char* provenance_name(Provenance p) {
  switch (p) {
    case Provenance::computed: return "computed";
    case Provenance::extrapolated_knn: return "extrapolated_knn";
    case Provenance::extrapolated_gnn: return "extrapolated_gnn";
    case Provenance::random: return "random";
  }
  return "computed";
}

Provenance provenance_from_name(const std::string& name) {
  if (name == "computed") return Provenance::computed;
  if (name == "extrapolated_knn") return Provenance::extrapolated_knn;
  if (name == "extrapolated_gnn") return Provenance::extrapolated_gnn;
  if (name == "random") return Provenance::random;
  fail(ErrorCode::ParseError, "unknown provenance '" + name + "'");
}

void ScoreTable::sort_by_id() {
  std::sort(rows.begin(), rows.end(),
            [](const ScoreRow& a, const ScoreRow& b) { return a.sample_id < b.sample_id; });
}

void ScoreTable::check_unique_ids() const {
  for (std::size_t i = 1; i < rows.size(); ++i) {
    require(rows[i].sample_id != rows[i - 1].sample_id, ErrorCode::DuplicateId,
            "duplicate sample_id " + std::to_string(rows[i].sample_id));
  }
}

std::vector<double> ScoreTable::scores() const {
  std::vector<double> out;
  out.reserve(rows.size());
  for (const auto& r : rows) out.push_back(r.score);
  return out;
}

std::vector<std::int64_t> ScoreTable::ids() const {
  std::vector<std::int64_t> out;
  out.reserve(rows.size());
  for (const auto& r : rows) out.push_back(r.sample_id);
  return out;
}

const ScoreRow* ScoreTable::find(std::int64_t sample_id) const {
  auto it = std::lower_bound(rows.begin(), rows.end(), sample_id,
                             [](const ScoreRow& r, std::int64_t id) { return r.sample_id < id; });
  if (it != rows.end() && it->sample_id == sample_id) return &*it;
  return nullptr;
}

}  // namespace scorex
