#pragma once

// Portable random streams. std::mt19937_64 output is fixed by the standard,
// but the std distributions and std::shuffle are not, so bounded draws and
// shuffles are done here.

#include <cmath>
#include <cstdint>
#include <random>
#include <span>
#include <utility>

namespace aqc {

using Rng = std::mt19937_64;

constexpr std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Mixes several integers into one seed.
constexpr std::uint64_t derive_seed(std::uint64_t base, std::uint64_t a, std::uint64_t b = 0) {
  return splitmix64(splitmix64(splitmix64(base) ^ a) ^ b);
}

/// Uniform integer in [0, bound) by rejection; bound > 0.
inline std::uint64_t uniform_below(Rng& rng, std::uint64_t bound) {
  const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % bound);
  std::uint64_t v;
  do {
    v = rng();
  } while (v >= limit);
  return v % bound;
}

/// Uniform double in [0, 1) with 53 random bits.
inline double uniform_unit(Rng& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

inline double standard_normal(Rng& rng) {
  // Box-Muller; one draw per call keeps the stream position simple
  double u1 = uniform_unit(rng);
  double u2 = uniform_unit(rng);
  if (u1 <= 0.0) u1 = 0x1.0p-53;
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586 * u2);
}

template <class T>
void fisher_yates(std::span<T> items, Rng& rng) {
  for (std::size_t i = items.size(); i > 1; --i) {
    std::size_t j = static_cast<std::size_t>(uniform_below(rng, i));
    std::swap(items[i - 1], items[j]);
  }
}

}  // namespace aqc
