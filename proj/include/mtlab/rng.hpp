#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <utility>

namespace mtlab {

// Stafford "mix13" finalizer (the splitmix64 output stage).
constexpr std::uint64_t fmix64(std::uint64_t x) {
  x ^= x >> 30;
  x *= 0xbf58476d1ce4e5b9ULL;
  x ^= x >> 27;
  x *= 0x94d049bb133111ebULL;
  x ^= x >> 31;
  return x;
}

/// Derive an independent sub-seed: fmix64(a + 0x9e3779b97f4a7c15 * (b + 1)).
/// Row j of a tuple stream uses mix_seed(master, j).
constexpr std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b) {
  return fmix64(a + 0x9e3779b97f4a7c15ULL * (b + 1));
}

using Rng = std::mt19937_64;

/// Uniform integer in [0, bound) by modulo rejection. Bit-exact across
/// platforms, unlike std::uniform_int_distribution.
inline std::uint64_t uniform_below(Rng& rng, std::uint64_t bound) {
  const std::uint64_t threshold = (0 - bound) % bound;
  for (;;) {
    const std::uint64_t x = rng();
    if (x >= threshold) return x % bound;
  }
}

inline double uniform01(Rng& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

template <class T>
void shuffle(std::span<T> items, Rng& rng) {
  for (std::size_t i = 0; i + 1 < items.size(); ++i) {
    const std::size_t r = i + uniform_below(rng, items.size() - i);
    std::swap(items[i], items[r]);
  }
}

}  // namespace mtlab
