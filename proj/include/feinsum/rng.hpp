#pragma once

#include <cstdint>
#include <random>
#include <vector>

namespace feinsum {

// mt19937_64 output is pinned by the standard, so seeded draws are
// reproducible across platforms as long as we avoid the distribution
// classes (their algorithms are implementation-defined).
inline std::uint64_t draw_below(std::mt19937_64& rng, std::uint64_t bound) {
  // rejection sampling keeps the draw unbiased
  std::uint64_t limit = bound * (UINT64_MAX / bound);
  std::uint64_t x;
  do {
    x = rng();
  } while (x >= limit);
  return x % bound;
}

inline std::int64_t draw_range(std::mt19937_64& rng, std::int64_t lo, std::int64_t hi) {
  return lo + static_cast<std::int64_t>(draw_below(rng, static_cast<std::uint64_t>(hi - lo + 1)));
}

template <class T>
void shuffle_vec(std::mt19937_64& rng, std::vector<T>& v) {
  for (size_t i = v.size(); i > 1; --i) {
    size_t j = static_cast<size_t>(draw_below(rng, i));
    std::swap(v[i - 1], v[j]);
  }
}

// identity permutation of size n, for callers that then shuffle it
inline std::vector<int> iota_perm(int n) {
  std::vector<int> p(n);
  for (int i = 0; i < n; ++i) p[i] = i;
  return p;
}

}  // namespace feinsum
