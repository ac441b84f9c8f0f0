#pragma once

#include <cstdint>
#include <random>

namespace streamks {

using Rng = std::mt19937_64;

/// Uniform draw on the open interval (0, 1) with 53 random bits.
///
/// Hand-rolled rather than std::uniform_real_distribution so that a seed
/// produces the same stream with every standard library.
inline double uniform_open01(Rng& rng) {
  return (static_cast<double>(rng() >> 11) + 0.5) * 0x1.0p-53;
}

/// Generator for stream `stream_index` of trial seed `seed`.
inline Rng make_rng(std::uint64_t seed, std::uint64_t stream_index = 0) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream_index),
                    static_cast<std::uint32_t>(stream_index >> 32)};
  return Rng(seq);
}

}  // namespace streamks
