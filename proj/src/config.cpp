#include "scorex/config.hpp"

#include <charconv>
#include <sstream>

#include "scorex/tensor_io.hpp"

namespace scorex {

namespace {

std::string trim(const std::string& s) {
  std::size_t a = 0, b = s.size();
  while (a < b && (s[a] == ' ' || s[a] == '\t' || s[a] == '\r')) ++a;
  while (b > a && (s[b - 1] == ' ' || s[b - 1] == '\t' || s[b - 1] == '\r')) --b;
  return s.substr(a, b - a);
}

}  // namespace

KeyValueConfig KeyValueConfig::parse(const std::string& text) {
  KeyValueConfig cfg;
  std::istringstream in(text);
  std::string line;
  std::string section;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string t = trim(line);
    if (t.empty() || t[0] == '#' || t[0] == ';') continue;
    if (t.front() == '[') {
      require(t.back() == ']', ErrorCode::ParseError,
              "unterminated section header at line " + std::to_string(line_no));
      section = trim(t.substr(1, t.size() - 2));
      continue;
    }
    const std::size_t eq = t.find('=');
    require(eq != std::string::npos, ErrorCode::ParseError,
            "expected key=value at line " + std::to_string(line_no));
    std::string key = trim(t.substr(0, eq));
    require(!key.empty(), ErrorCode::ParseError,
            "empty key at line " + std::to_string(line_no));
    if (!section.empty()) key = section + "." + key;
    cfg.values_[key] = trim(t.substr(eq + 1));
  }
  return cfg;
}

KeyValueConfig KeyValueConfig::parse_file(const std::filesystem::path& path) {
  return parse(read_file_bytes(path));
}

std::string KeyValueConfig::get_string(const std::string& key) const {
  auto it = values_.find(key);
  require(it != values_.end(), ErrorCode::ConfigInvalid, "missing config key '" + key + "'");
  return it->second;
}

std::string KeyValueConfig::get_string(const std::string& key,
                                       const std::string& fallback) const {
  auto it = values_.find(key);
  return it == values_.end() ? fallback : it->second;
}

double KeyValueConfig::get_double(const std::string& key, double fallback) const {
  auto it = values_.find(key);
  if (it == values_.end()) return fallback;
  double value = 0.0;
  const std::string& s = it->second;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  require(ec == std::errc() && ptr == s.data() + s.size(), ErrorCode::ConfigInvalid,
          "config key '" + key + "' is not a number: '" + s + "'");
  return value;
}

std::int64_t KeyValueConfig::get_int(const std::string& key, std::int64_t fallback) const {
  auto it = values_.find(key);
  if (it == values_.end()) return fallback;
  std::int64_t value = 0;
  const std::string& s = it->second;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  require(ec == std::errc() && ptr == s.data() + s.size(), ErrorCode::ConfigInvalid,
          "config key '" + key + "' is not an integer: '" + s + "'");
  return value;
}

bool KeyValueConfig::get_bool(const std::string& key, bool fallback) const {
  auto it = values_.find(key);
  if (it == values_.end()) return fallback;
  if (it->second == "true" || it->second == "1") return true;
  if (it->second == "false" || it->second == "0") return false;
  fail(ErrorCode::ConfigInvalid, "config key '" + key + "' is not a boolean");
}

std::vector<double> KeyValueConfig::get_double_list(
    const std::string& key, const std::vector<double>& fallback) const {
  auto it = values_.find(key);
  if (it == values_.end()) return fallback;
  std::vector<double> out;
  std::string item;
  std::istringstream in(it->second);
  while (std::getline(in, item, ',')) {
    item = trim(item);
    if (item.empty()) continue;
    double value = 0.0;
    auto [ptr, ec] = std::from_chars(item.data(), item.data() + item.size(), value);
    require(ec == std::errc() && ptr == item.data() + item.size(), ErrorCode::ConfigInvalid,
            "config key '" + key + "' has a non-numeric item '" + item + "'");
    out.push_back(value);
  }
  require(!out.empty(), ErrorCode::ConfigInvalid, "config key '" + key + "' lists no values");
  return out;
}

std::vector<std::pair<std::string, std::string>> KeyValueConfig::entries() const {
  return {values_.begin(), values_.end()};
}

}  // namespace scorex
