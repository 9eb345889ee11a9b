#include "scorex/tensor_io.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>

namespace scorex {

namespace fs = std::filesystem;

namespace {

constexpr char kMagic[6] = {'\x93', 'N', 'U', 'M', 'P', 'Y'};

void check_finite(const DenseTensor& t) {
  for (float v : t.data) {
    require(std::isfinite(v), ErrorCode::NonFinite,
            "tensor contains NaN/Inf (pass allow flag to accept)");
  }
}

// Minimal parser for the python dict literal in the NPY header. Accepts the
// layout numpy emits plus reasonable whitespace variation; anything else is
// HeaderMalformed.
struct HeaderFields {
  std::string descr;
  bool fortran_order = false;
  std::vector<std::size_t> shape;
};

class DictParser {
 public:
  explicit DictParser(std::string_view text) : text_(text) {}

  HeaderFields parse() {
    HeaderFields out;
    skip_ws();
    expect('{');
    bool saw_descr = false, saw_order = false, saw_shape = false;
    while (true) {
      skip_ws();
      if (peek() == '}') {
        ++pos_;
        break;
      }
      std::string key = parse_string();
      skip_ws();
      expect(':');
      skip_ws();
      if (key == "descr") {
        out.descr = parse_string();
        saw_descr = true;
      } else if (key == "fortran_order") {
        out.fortran_order = parse_bool();
        saw_order = true;
      } else if (key == "shape") {
        out.shape = parse_shape();
        saw_shape = true;
      } else {
        fail(ErrorCode::HeaderMalformed, "unknown header key '" + key + "'");
      }
      skip_ws();
      if (peek() == ',') {
        ++pos_;
        continue;
      }
      skip_ws();
      expect('}');
      break;
    }
    require(saw_descr && saw_order && saw_shape, ErrorCode::HeaderMalformed,
            "header missing required keys");
    skip_ws();
    while (pos_ < text_.size()) {
      char c = text_[pos_++];
      require(c == ' ' || c == '\n' || c == '\t' || c == '\r', ErrorCode::HeaderMalformed,
              "trailing bytes after header dict");
    }
    return out;
  }

 private:
  char peek() const {
    require(pos_ < text_.size(), ErrorCode::HeaderMalformed, "truncated header");
    return text_[pos_];
  }

  void expect(char c) {
    require(peek() == c, ErrorCode::HeaderMalformed,
            std::string("expected '") + c + "' in header");
    ++pos_;
  }

  void skip_ws() {
    while (pos_ < text_.size() &&
           (text_[pos_] == ' ' || text_[pos_] == '\t' || text_[pos_] == '\n' ||
            text_[pos_] == '\r')) {
      ++pos_;
    }
  }

  std::string parse_string() {
    char quote = peek();
    require(quote == '\'' || quote == '"', ErrorCode::HeaderMalformed,
            "expected quoted string in header");
    ++pos_;
    std::string out;
    while (true) {
      require(pos_ < text_.size(), ErrorCode::HeaderMalformed, "unterminated string");
      char c = text_[pos_++];
      if (c == quote) break;
      out.push_back(c);
    }
    return out;
  }

  bool parse_bool() {
    if (text_.substr(pos_, 4) == "True") {
      pos_ += 4;
      return true;
    }
    if (text_.substr(pos_, 5) == "False") {
      pos_ += 5;
      return false;
    }
    fail(ErrorCode::HeaderMalformed, "expected True/False in header");
  }

  std::vector<std::size_t> parse_shape() {
    expect('(');
    std::vector<std::size_t> dims;
    while (true) {
      skip_ws();
      if (peek() == ')') {
        ++pos_;
        break;
      }
      std::size_t start = pos_;
      while (pos_ < text_.size() && text_[pos_] >= '0' && text_[pos_] <= '9') ++pos_;
      require(pos_ > start && pos_ - start <= 12, ErrorCode::HeaderMalformed,
              "expected dimension in shape tuple");
      std::size_t value = 0;
      auto sv = text_.substr(start, pos_ - start);
      std::from_chars(sv.data(), sv.data() + sv.size(), value);
      dims.push_back(value);
      skip_ws();
      if (peek() == ',') {
        ++pos_;
        continue;
      }
      expect(')');
      break;
    }
    return dims;
  }

  std::string_view text_;
  std::size_t pos_ = 0;
};

}  // namespace

DenseTensor parse_tensor(const std::string& bytes, bool allow_nonfinite) {
  require(bytes.size() >= 10, ErrorCode::BadMagic, "file too short for NPY container");
  require(std::memcmp(bytes.data(), kMagic, 6) == 0, ErrorCode::BadMagic,
          "missing NPY magic bytes");
  const unsigned char major = static_cast<unsigned char>(bytes[6]);
  const unsigned char minor = static_cast<unsigned char>(bytes[7]);
  require(major == 1 && minor == 0, ErrorCode::BadMagic,
          "unsupported NPY format version " + std::to_string(major) + "." +
              std::to_string(minor));
  const std::size_t header_len = static_cast<unsigned char>(bytes[8]) |
                                 (static_cast<std::size_t>(static_cast<unsigned char>(bytes[9]))
                                  << 8);
  require(bytes.size() >= 10 + header_len, ErrorCode::HeaderMalformed,
          "declared header length exceeds file size");
  require(header_len > 0 && bytes[10 + header_len - 1] == '\n', ErrorCode::HeaderMalformed,
          "header not newline-terminated");

  HeaderFields fields = DictParser(std::string_view(bytes).substr(10, header_len)).parse();
  require(fields.descr == "<f4", ErrorCode::UnsupportedDtype,
          "only little-endian f4 supported, got '" + fields.descr + "'");
  require(!fields.fortran_order, ErrorCode::UnsupportedDtype,
          "fortran_order payloads not supported");

  const std::size_t count = DenseTensor::element_count(fields.shape);
  require(count <= (std::size_t{1} << 34), ErrorCode::HeaderMalformed,
          "declared shape unreasonably large");
  const std::size_t payload = bytes.size() - 10 - header_len;
  require(payload == count * 4, ErrorCode::ShapeMismatch,
          "payload holds " + std::to_string(payload / 4) + " floats but shape wants " +
              std::to_string(count));

  DenseTensor out;
  out.shape = std::move(fields.shape);
  out.data.resize(count);
  if (count > 0) std::memcpy(out.data.data(), bytes.data() + 10 + header_len, count * 4);
  if (!allow_nonfinite) check_finite(out);
  return out;
}

DenseTensor read_tensor(const fs::path& path, bool allow_nonfinite) {
  return parse_tensor(read_file_bytes(path), allow_nonfinite);
}

std::string encode_tensor(const DenseTensor& tensor) {
  require(tensor.data.size() == DenseTensor::element_count(tensor.shape),
          ErrorCode::ShapeMismatch, "tensor data length does not match shape");

  std::string dict = "{'descr': '<f4', 'fortran_order': False, 'shape': (";
  for (std::size_t i = 0; i < tensor.shape.size(); ++i) {
    dict += std::to_string(tensor.shape[i]);
    if (tensor.shape.size() == 1) {
      dict += ",";
    } else if (i + 1 < tensor.shape.size()) {
      dict += ", ";
    }
  }
  dict += "), }";
  // pad so magic+version+len+header is a multiple of 64, ending in newline
  std::size_t unpadded = 10 + dict.size() + 1;
  std::size_t padded = (unpadded + 63) / 64 * 64;
  dict.append(padded - unpadded, ' ');
  dict.push_back('\n');
  require(dict.size() < 65536, ErrorCode::HeaderMalformed, "header too large for v1.0");

  std::string out;
  out.reserve(10 + dict.size() + tensor.data.size() * 4);
  out.append(kMagic, 6);
  out.push_back('\x01');
  out.push_back('\x00');
  out.push_back(static_cast<char>(dict.size() & 0xff));
  out.push_back(static_cast<char>((dict.size() >> 8) & 0xff));
  out += dict;
  const std::size_t payload_offset = out.size();
  out.resize(out.size() + tensor.data.size() * 4);
  if (!tensor.data.empty()) {
    std::memcpy(out.data() + payload_offset, tensor.data.data(), tensor.data.size() * 4);
  }
  return out;
}

void write_tensor(const fs::path& path, const DenseTensor& tensor) {
  atomic_write(path, encode_tensor(tensor));
}

std::string format_score(double value) {
  char buf[64];
  int n = std::snprintf(buf, sizeof buf, "%.9g", value);
  require(n > 0 && n < static_cast<int>(sizeof buf), ErrorCode::IoError, "score format failed");
  return std::string(buf, static_cast<std::size_t>(n));
}

std::string encode_score_table(const ScoreTable& table) {
  std::string out = "sample_id,score,provenance,in_subset\n";
  for (const auto& row : table.rows) {
    out += std::to_string(row.sample_id);
    out += ',';
    out += format_score(row.score);
    out += ',';
    out += provenance_name(row.provenance);
    out += ',';
    out += row.in_subset ? "true" : "false";
    out += '\n';
  }
  return out;
}

void write_score_table(const fs::path& path, const ScoreTable& table) {
  atomic_write(path, encode_score_table(table));
}

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      fields.push_back(cur);
      cur.clear();
    } else if (c != '\r') {
      cur.push_back(c);
    }
  }
  fields.push_back(cur);
  return fields;
}

double parse_double_field(const std::string& s) {
  double value = 0.0;
  const char* begin = s.data();
  const char* end = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(begin, end, value);
  require(ec == std::errc() && ptr == end, ErrorCode::ParseError,
          "bad numeric field '" + s + "'");
  return value;
}

std::int64_t parse_int_field(const std::string& s) {
  std::int64_t value = 0;
  const char* begin = s.data();
  const char* end = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(begin, end, value);
  require(ec == std::errc() && ptr == end, ErrorCode::ParseError,
          "bad integer field '" + s + "'");
  return value;
}

bool parse_bool_field(const std::string& s) {
  if (s == "true" || s == "1") return true;
  if (s == "false" || s == "0") return false;
  fail(ErrorCode::ParseError, "bad boolean field '" + s + "'");
}

}  // namespace

ScoreTable parse_score_table(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  require(static_cast<bool>(std::getline(in, line)), ErrorCode::ParseError,
          "empty score table file");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  require(line == "sample_id,score,provenance,in_subset", ErrorCode::ParseError,
          "unexpected score table header '" + line + "'");

  ScoreTable table;
  while (std::getline(in, line)) {
    if (line.empty() || line == "\r") continue;
    auto fields = split_csv_line(line);
    require(fields.size() == 4, ErrorCode::ParseError, "malformed row '" + line + "'");
    ScoreRow row;
    row.sample_id = parse_int_field(fields[0]);
    row.score = parse_double_field(fields[1]);
    row.provenance = provenance_from_name(fields[2]);
    row.in_subset = parse_bool_field(fields[3]);
    table.rows.push_back(row);
  }
  table.sort_by_id();
  table.check_unique_ids();
  return table;
}

ScoreTable read_score_table(const fs::path& path) {
  return parse_score_table(read_file_bytes(path));
}

IndexSet read_index_set(const fs::path& path) {
  std::string text = read_file_bytes(path);
  std::istringstream in(text);
  std::string line;
  require(static_cast<bool>(std::getline(in, line)), ErrorCode::ParseError,
          "empty index set file");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  const std::string prefix = "universe_size=";
  require(line.rfind(prefix, 0) == 0, ErrorCode::ParseError,
          "index set must start with universe_size=");
  IndexSet set;
  set.universe_size = parse_int_field(line.substr(prefix.size()));
  while (std::getline(in, line)) {
    if (line.empty() || line == "\r") continue;
    if (line.back() == '\r') line.pop_back();
    set.indices.push_back(parse_int_field(line));
  }
  set.validate();
  return set;
}

void write_index_set(const fs::path& path, const IndexSet& set) {
  set.validate();
  std::string out = "universe_size=" + std::to_string(set.universe_size) + "\n";
  for (std::int64_t id : set.indices) {
    out += std::to_string(id);
    out += '\n';
  }
  atomic_write(path, out);
}

void atomic_write(const fs::path& path, const std::string& bytes) {
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    require(out.good(), ErrorCode::IoError, "cannot open " + tmp.string());
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    out.flush();
    require(out.good(), ErrorCode::IoError, "write failed for " + tmp.string());
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) {
    fs::remove(tmp);
    fail(ErrorCode::IoError, "rename failed for " + path.string() + ": " + ec.message());
  }
}

std::string read_file_bytes(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  require(in.good(), ErrorCode::IoError, "cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  require(!in.bad(), ErrorCode::IoError, "read failed for " + path.string());
  return buf.str();
}

}  // namespace scorex
