#include "scorex/rng.hpp"

#include <algorithm>
#include <numeric>

namespace scorex {

std::vector<std::int64_t> Rng::sample_without_replacement(std::int64_t n, std::int64_t m) {
  std::vector<std::int64_t> pool(static_cast<std::size_t>(n));
  std::iota(pool.begin(), pool.end(), std::int64_t{0});
  // partial Fisher-Yates: first m slots end up a uniform m-subset
  for (std::int64_t i = 0; i < m; ++i) {
    std::int64_t j = i + static_cast<std::int64_t>(below(static_cast<std::uint64_t>(n - i)));
    std::swap(pool[static_cast<std::size_t>(i)], pool[static_cast<std::size_t>(j)]);
  }
  pool.resize(static_cast<std::size_t>(m));
  std::sort(pool.begin(), pool.end());
  return pool;
}

}  // namespace scorex
