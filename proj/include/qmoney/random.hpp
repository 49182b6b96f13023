#pragma once

#include <cstdint>

namespace qmoney {

// Counter-based randomness: every draw is a pure function of
// (seed, cell index, purpose tag), so results do not depend on iteration
// order or thread count.
enum class DrawTag : std::uint64_t {
  Loss = 1,
  Strategy = 2,
  QuantumSuccess = 3,
  Replacement = 4,
  SwapSide = 5,
  Verify = 6,
};

constexpr std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

constexpr std::uint64_t counter_hash(std::uint64_t seed, std::uint64_t index, DrawTag tag) {
  return splitmix64(seed ^ splitmix64(index * 0xD1B54A32D192ED03ull ^
                                      splitmix64(static_cast<std::uint64_t>(tag))));
}

/// Uniform double in [0, 1).
constexpr double counter_uniform(std::uint64_t seed, std::uint64_t index, DrawTag tag) {
  return static_cast<double>(counter_hash(seed, index, tag) >> 11) * 0x1.0p-53;
}

}  // namespace qmoney
