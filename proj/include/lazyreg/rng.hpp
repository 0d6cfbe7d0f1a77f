#pragma once

// Deterministic random helpers. std::shuffle and the standard distribution
// objects produce implementation-defined sequences, so everything that must
// be reproducible across runs (and toolchains) is hand-rolled on top of
// mt19937_64, whose output is fully pinned by the standard.

#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <vector>

namespace lazyreg {

// Uniform draw in [0, m), rejection-sampled to avoid modulo bias.
inline std::uint64_t bounded_uint(std::mt19937_64& rng, std::uint64_t m) {
  const std::uint64_t max = std::numeric_limits<std::uint64_t>::max();
  const std::uint64_t limit = max - max % m;
  std::uint64_t v = rng();
  while (v >= limit) v = rng();
  return v % m;
}

// Uniform in [0, 1) with 53 random bits.
inline double uniform_unit(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

inline double uniform_range(std::mt19937_64& rng, double lo, double hi) {
  return lo + (hi - lo) * uniform_unit(rng);
}

// Box-Muller; draws two uniforms per call.
inline double standard_normal(std::mt19937_64& rng) {
  const double u1 = 1.0 - uniform_unit(rng);  // (0, 1], keeps log finite
  const double u2 = uniform_unit(rng);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586477 * u2);
}

// Fisher-Yates permutation of 0..n-1.
inline std::vector<std::int64_t> shuffled_indices(std::int64_t n,
                                                  std::mt19937_64& rng) {
  std::vector<std::int64_t> idx(static_cast<std::size_t>(n));
  for (std::int64_t i = 0; i < n; ++i) idx[static_cast<std::size_t>(i)] = i;
  for (std::int64_t i = n - 1; i > 0; --i) {
    const auto j = static_cast<std::int64_t>(
        bounded_uint(rng, static_cast<std::uint64_t>(i) + 1));
    std::swap(idx[static_cast<std::size_t>(i)], idx[static_cast<std::size_t>(j)]);
  }
  return idx;
}

// Per-epoch generator so train and train_dense walk identical orders.
inline std::mt19937_64 epoch_rng(std::uint64_t seed, std::int64_t epoch) {
  return std::mt19937_64(
      seed ^ (0x9e3779b97f4a7c15ULL * (static_cast<std::uint64_t>(epoch) + 1)));
}

}  // namespace lazyreg
