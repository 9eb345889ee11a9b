#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "scorex/pipeline.hpp"

namespace scorex {

inline constexpr const char* kVersion = "scorex-0.1.0";

std::uint64_t fnv1a64(const std::string& bytes);
std::uint64_t file_digest(const std::filesystem::path& path);

/// Text run manifest: resolved config echo, seed, per-stage timings and the
/// emitted files with content digests. Timings are skipped in deterministic
/// mode so reruns produce byte-identical manifests.
class RunManifest {
 public:
  explicit RunManifest(std::string command) : command_(std::move(command)) {}

  void set_seed(std::uint64_t seed) { seed_ = seed; }
  void add_config(const std::string& key, const std::string& value);
  void add_timing(const std::string& stage, double seconds);
  void add_timings(const std::vector<StageTiming>& timings);
  /// Registers an emitted file; the digest is computed from disk.
  void add_output(const std::filesystem::path& path);

  std::string encode(bool include_timings) const;
  void write(const std::filesystem::path& path, bool include_timings) const;

 private:
  std::string command_;
  std::uint64_t seed_ = 0;
  std::vector<std::pair<std::string, std::string>> config_;
  std::vector<StageTiming> timings_;
  std::vector<std::pair<std::string, std::uint64_t>> outputs_;
};

}  // namespace scorex
