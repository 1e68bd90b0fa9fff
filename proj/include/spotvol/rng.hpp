#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace spotvol::rng {

/// Independent generator for stream `index` of a seed; depends only on (seed, index).
inline std::mt19937_64 stream(std::uint64_t seed, std::uint64_t index) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32)};
  return std::mt19937_64(seq);
}

// The helpers below avoid the standard distributions, whose algorithms are
// implementation-defined, so that seeded output is identical across toolchains.

/// Uniform integer in [0, bound) by Lemire's multiply-and-reject method.
inline std::uint64_t uniform_below(std::mt19937_64& gen, std::uint64_t bound) {
  unsigned __int128 m = static_cast<unsigned __int128>(gen()) * bound;
  auto low = static_cast<std::uint64_t>(m);
  if (low < bound) {
    const std::uint64_t threshold = (0 - bound) % bound;
    while (low < threshold) {
      m = static_cast<unsigned __int128>(gen()) * bound;
      low = static_cast<std::uint64_t>(m);
    }
  }
  return static_cast<std::uint64_t>(m >> 64);
}

/// Uniform double in [0, 1) with 53 random bits.
inline double uniform01(std::mt19937_64& gen) {
  return static_cast<double>(gen() >> 11) * 0x1.0p-53;
}

/// Exponential variate with the given mean.
inline double exponential(std::mt19937_64& gen, double mean) {
  return -mean * std::log1p(-uniform01(gen));
}

}  // namespace spotvol::rng
