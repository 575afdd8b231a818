#pragma once

#include <cstdint>
#include <random>

namespace instab {

constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

/// Counter-derived seed for an independent stream. Streams derived from the
/// same (seed, stream, index) triple are identical regardless of the order in
/// which they are created.
constexpr std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream,
                                    std::uint64_t index) noexcept {
  return splitmix64(splitmix64(seed ^ splitmix64(stream)) + index);
}

using Rng = std::mt19937_64;

inline Rng make_rng(std::uint64_t seed, std::uint64_t stream = 0,
                    std::uint64_t index = 0) {
  return Rng(derive_seed(seed, stream, index));
}

}  // namespace instab
