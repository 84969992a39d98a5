#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>

namespace regx {

using Rng = std::mt19937_64;

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Independent stream seed from a base seed and a list of stream ids (graph
/// id, epoch, role, ...). Order-sensitive.
inline std::uint64_t derive_seed(std::uint64_t seed,
                                 std::initializer_list<std::uint64_t> ids) {
  std::uint64_t s = splitmix64(seed);
  for (auto id : ids) s = splitmix64(s ^ splitmix64(id + 0x632be59bd9b4e019ULL));
  return s;
}

/// Uniform in [0, 1) from the top 53 bits.
inline double uniform01(Rng& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

/// Uniform in [lo, hi] inclusive.
inline int uniform_int(Rng& rng, int lo, int hi) {
  const auto span = static_cast<std::uint64_t>(hi - lo) + 1;
  // rejection sampling keeps the draw unbiased and platform independent
  const std::uint64_t limit = UINT64_MAX - UINT64_MAX % span;
  std::uint64_t r;
  do {
    r = rng();
  } while (r >= limit);
  return lo + static_cast<int>(r % span);
}

/// Fisher-Yates with uniform_int, so the permutation does not depend on the
/// standard library's distribution implementation.
template <typename It>
void shuffle(It first, It last, Rng& rng) {
  const auto n = static_cast<int>(last - first);
  for (int i = n - 1; i > 0; --i) {
    const int j = uniform_int(rng, 0, i);
    std::swap(first[i], first[j]);
  }
}

}  // namespace regx
