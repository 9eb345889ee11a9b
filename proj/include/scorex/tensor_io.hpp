#pragma once

#include <filesystem>
#include <string>

#include "scorex/tensor.hpp"

namespace scorex {

/// Reads a dense float32 tensor from an NPY v1.0 file (little-endian f4,
/// C order). Set allow_nonfinite to accept NaN/Inf payloads.
DenseTensor read_tensor(const std::filesystem::path& path, bool allow_nonfinite = false);

/// Parses NPY bytes already in memory; same contract as read_tensor.
DenseTensor parse_tensor(const std::string& bytes, bool allow_nonfinite = false);

/// Writes the NPY v1.0 encoding of the tensor. Deterministic bytes; the
/// file lands via write-to-temp + rename so failures leave no partial output.
void write_tensor(const std::filesystem::path& path, const DenseTensor& tensor);

/// NPY bytes without touching the filesystem.
std::string encode_tensor(const DenseTensor& tensor);

/// CSV score table with header sample_id,score,provenance,in_subset.
/// Scores carry 9 significant digits.
ScoreTable read_score_table(const std::filesystem::path& path);
void write_score_table(const std::filesystem::path& path, const ScoreTable& table);
std::string encode_score_table(const ScoreTable& table);
ScoreTable parse_score_table(const std::string& text);

/// Index sets as plain text: one header line "universe_size=<n>" followed by
/// one index per line, sorted ascending.
IndexSet read_index_set(const std::filesystem::path& path);
void write_index_set(const std::filesystem::path& path, const IndexSet& set);

/// Shared atomic file write used by everything that emits output files.
void atomic_write(const std::filesystem::path& path, const std::string& bytes);
std::string read_file_bytes(const std::filesystem::path& path);

/// Formats a double with 9 significant digits, locale-independent.
std::string format_score(double value);

}  // namespace scorex
