#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "scorex/error.hpp"

namespace scorex {

/// Minimal [section] key = value config file. Values are plain strings;
/// typed getters parse on access. Keys are addressed as "section.key"
/// (keys before any section header live in the "" section as plain "key").
class KeyValueConfig {
 public:
  static KeyValueConfig parse(const std::string& text);
  static KeyValueConfig parse_file(const std::filesystem::path& path);

  bool has(const std::string& key) const { return values_.count(key) > 0; }
  void set(const std::string& key, std::string value) { values_[key] = std::move(value); }

  std::string get_string(const std::string& key) const;
  std::string get_string(const std::string& key, const std::string& fallback) const;
  double get_double(const std::string& key, double fallback) const;
  std::int64_t get_int(const std::string& key, std::int64_t fallback) const;
  bool get_bool(const std::string& key, bool fallback) const;
  std::vector<double> get_double_list(const std::string& key,
                                      const std::vector<double>& fallback) const;

  /// Sorted key=value lines, for manifests.
  std::vector<std::pair<std::string, std::string>> entries() const;

 private:
  std::map<std::string, std::string> values_;
};

}  // namespace scorex
