#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <utility>

namespace bike {

// std::mt19937_64 output is fixed by the standard; the helpers below avoid
// the implementation-defined std::*_distribution types so seeded results are
// identical across toolchains.
using rng_t = std::mt19937_64;

// Uniform integer in [0, bound) via Lemire's multiply-and-reject.
inline std::uint64_t uniform_below(rng_t& rng, std::uint64_t const bound) {
  auto x = rng();
  auto m = static_cast<unsigned __int128>(x) * bound;
  auto low = static_cast<std::uint64_t>(m);
  if (low < bound) {
    auto const threshold = (0 - bound) % bound;
    while (low < threshold) {
      x = rng();
      m = static_cast<unsigned __int128>(x) * bound;
      low = static_cast<std::uint64_t>(m);
    }
  }
  return static_cast<std::uint64_t>(m >> 64U);
}

// Uniform double in [0, 1) from the top 53 bits.
inline double uniform01(rng_t& rng) {
  return static_cast<double>(rng() >> 11U) * 0x1.0p-53;
}

// Forward Fisher-Yates: position i is fixed after step i, so the first k
// elements only depend on the first k draws.
template <typename T>
void partial_shuffle(std::span<T> v, std::size_t const k, rng_t& rng) {
  for (auto i = std::size_t{0}; i < k && i + 1 < v.size(); ++i) {
    auto const j = i + uniform_below(rng, v.size() - i);
    using std::swap;
    swap(v[i], v[j]);
  }
}

}  // namespace bike
