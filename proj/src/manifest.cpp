#include "scorex/manifest.hpp"

#include <cstdio>

#include "scorex/tensor_io.hpp"

namespace scorex {

std::uint64_t fnv1a64(const std::string& bytes) {
  std::uint64_t hash = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    hash ^= c;
    hash *= 0x100000001b3ULL;
  }
  return hash;
}

std::uint64_t file_digest(const std::filesystem::path& path) {
  return fnv1a64(read_file_bytes(path));
}

void RunManifest::add_config(const std::string& key, const std::string& value) {
  config_.emplace_back(key, value);
}

void RunManifest::add_timing(const std::string& stage, double seconds) {
  timings_.push_back({stage, seconds});
}

void RunManifest::add_timings(const std::vector<StageTiming>& timings) {
  for (const auto& t : timings) timings_.push_back(t);
}

void RunManifest::add_output(const std::filesystem::path& path) {
  outputs_.emplace_back(path.string(), file_digest(path));
}

std::string RunManifest::encode(bool include_timings) const {
  std::string out;
  out += "version=" + std::string(kVersion) + "\n";
  out += "command=" + command_ + "\n";
  out += "seed=" + std::to_string(seed_) + "\n";
  out += "digest_algo=fnv1a64\n";
  for (const auto& [key, value] : config_) {
    out += "config." + key + "=" + value + "\n";
  }
  if (include_timings) {
    for (const auto& t : timings_) {
      char buf[64];
      std::snprintf(buf, sizeof buf, "%.6f", t.seconds);
      out += "timing." + t.stage + "=" + buf + "\n";
    }
  }
  for (const auto& [path, digest] : outputs_) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(digest));
    out += "output=" + path + " digest=" + buf + "\n";
  }
  return out;
}

void RunManifest::write(const std::filesystem::path& path, bool include_timings) const {
  atomic_write(path, encode(include_timings));
}

}  // namespace scorex
