#include <doctest.h>

#include <cmath>
#include <cstring>
#include <filesystem>
#include <fstream>

#include "scorex/rng.hpp"
#include "scorex/tensor_io.hpp"

using namespace scorex;
namespace fs = std::filesystem;

namespace {

fs::path temp_dir() {
  static const fs::path dir = [] {
    fs::path p = fs::temp_directory_path() / "scorex_io_tests";
    fs::create_directories(p);
    return p;
  }();
  return dir;
}

}  // namespace

TEST_CASE("tensor round-trip is bit exact") {
  DenseTensor t({3, 2}, {0.0f, 0.0f, 0.0f, 0.0f, 0.0f, 0.0f});
  const fs::path path = temp_dir() / "zeros.npy";
  write_tensor(path, t);
  const DenseTensor back = read_tensor(path);
  CHECK(back.shape == t.shape);
  CHECK(back.data == t.data);

  Rng rng(17);
  std::vector<float> values(105);
  for (auto& v : values) v = static_cast<float>(rng.normal());
  DenseTensor random({5, 7, 3}, values);
  const fs::path path2 = temp_dir() / "random.npy";
  write_tensor(path2, random);
  const DenseTensor back2 = read_tensor(path2);
  CHECK(back2.shape == random.shape);
  CHECK(std::memcmp(back2.data.data(), random.data.data(), 105 * 4) == 0);
}

TEST_CASE("writes are deterministic") {
  DenseTensor t({2, 2}, {1.5f, -2.25f, 3.0f, 0.125f});
  CHECK(encode_tensor(t) == encode_tensor(t));
}

TEST_CASE("empty tensor round-trips") {
  DenseTensor t({0, 3}, {});
  const std::string bytes = encode_tensor(t);
  const DenseTensor back = parse_tensor(bytes);
  CHECK(back.shape == std::vector<std::size_t>{0, 3});
  CHECK(back.data.empty());
}

TEST_CASE("single value survives exactly") {
  DenseTensor t({1, 1}, {1.5f});
  const DenseTensor back = parse_tensor(encode_tensor(t));
  CHECK(back.data[0] == 1.5f);
}

TEST_CASE("bad magic is rejected") {
  std::string bytes = encode_tensor(DenseTensor({2}, {1.0f, 2.0f}));
  bytes[0] = '\x00';
  CHECK_THROWS_WITH_AS(parse_tensor(bytes), doctest::Contains("magic"), Error);
  try {
    parse_tensor(bytes);
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::BadMagic);
  }
}

TEST_CASE("payload shorter than declared shape is a ShapeMismatch") {
  // header says (4,), payload has 3 floats
  DenseTensor t({4}, {1.0f, 2.0f, 3.0f, 4.0f});
  std::string bytes = encode_tensor(t);
  bytes.resize(bytes.size() - 4);
  try {
    parse_tensor(bytes);
    FAIL("expected ShapeMismatch");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::ShapeMismatch);
  }
}

TEST_CASE("wrong dtype is rejected") {
  std::string bytes = encode_tensor(DenseTensor({1}, {1.0f}));
  const std::size_t pos = bytes.find("<f4");
  REQUIRE(pos != std::string::npos);
  bytes[pos + 2] = '8';
  try {
    parse_tensor(bytes);
    FAIL("expected UnsupportedDtype");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::UnsupportedDtype);
  }
}

TEST_CASE("NaN payload rejected unless allowed") {
  DenseTensor t({1}, {std::nanf("")});
  const std::string bytes = encode_tensor(t);
  try {
    parse_tensor(bytes);
    FAIL("expected NonFinite");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::NonFinite);
  }
  const DenseTensor back = parse_tensor(bytes, /*allow_nonfinite=*/true);
  CHECK(std::isnan(back.data[0]));
}

TEST_CASE("score table round-trip") {
  ScoreTable table;
  table.rows = {
      {0, 0.123456789, Provenance::computed, true},
      {1, -2.5e-7, Provenance::extrapolated_knn, false},
      {2, 3.0, Provenance::random, false},
  };
  const fs::path path = temp_dir() / "scores.csv";
  write_score_table(path, table);
  const ScoreTable back = read_score_table(path);
  REQUIRE(back.size() == 3);
  for (std::size_t i = 0; i < 3; ++i) {
    CHECK(back.rows[i].sample_id == table.rows[i].sample_id);
    CHECK(back.rows[i].score == doctest::Approx(table.rows[i].score).epsilon(1e-9));
    CHECK(back.rows[i].provenance == table.rows[i].provenance);
    CHECK(back.rows[i].in_subset == table.rows[i].in_subset);
  }
}

TEST_CASE("empty score table is header only") {
  const std::string text = encode_score_table(ScoreTable{});
  CHECK(text == "sample_id,score,provenance,in_subset\n");
  CHECK(parse_score_table(text).size() == 0);
}

TEST_CASE("duplicate sample ids rejected") {
  const std::string text =
      "sample_id,score,provenance,in_subset\n"
      "3,1.0,computed,true\n"
      "3,2.0,computed,true\n";
  try {
    parse_score_table(text);
    FAIL("expected DuplicateId");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::DuplicateId);
  }
}

TEST_CASE("malformed score rows are ParseError") {
  const std::string text = "sample_id,score,provenance,in_subset\n1,not_a_number,computed,true\n";
  CHECK_THROWS_AS(parse_score_table(text), Error);
}

TEST_CASE("index set round-trip and validation") {
  IndexSet set;
  set.universe_size = 10;
  set.indices = {1, 4, 7};
  const fs::path path = temp_dir() / "subset.idx";
  write_index_set(path, set);
  const IndexSet back = read_index_set(path);
  CHECK(back.universe_size == 10);
  CHECK(back.indices == set.indices);

  IndexSet bad;
  bad.universe_size = 3;
  bad.indices = {0, 5};
  CHECK_THROWS_AS(bad.validate(), Error);
}

TEST_CASE("fuzzed headers never crash, always typed errors") {
  const DenseTensor t({4, 3}, std::vector<float>(12, 0.5f));
  const std::string good = encode_tensor(t);
  Rng rng(99);
  int rejected = 0;
  for (int trial = 0; trial < 2000; ++trial) {
    std::string bytes = good;
    const int mutations = 1 + static_cast<int>(rng.below(4));
    for (int m = 0; m < mutations; ++m) {
      const std::size_t pos = static_cast<std::size_t>(rng.below(bytes.size()));
      bytes[pos] = static_cast<char>(rng.below(256));
    }
    if (rng.below(4) == 0) bytes.resize(static_cast<std::size_t>(rng.below(bytes.size() + 1)));
    try {
      (void)parse_tensor(bytes);
    } catch (const Error&) {
      ++rejected;  // typed error is the only acceptable failure
    }
  }
  CHECK(rejected > 0);
}
