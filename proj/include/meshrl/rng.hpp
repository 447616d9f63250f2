#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <string_view>

namespace meshrl {

// Counter-based random streams. Every draw is a pure function of
// (seed, stream, counter), so values can be recomputed for any step
// without replaying a generator.

constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

constexpr std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream,
                                 std::uint64_t counter) noexcept {
  return splitmix64(splitmix64(splitmix64(seed) ^ stream) ^ counter);
}

/// Stable sub-seed for a named purpose ("collect", "fit", ...).
constexpr std::uint64_t derive_seed(std::uint64_t seed, std::string_view tag) noexcept {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (char c : tag) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ULL;
  }
  return splitmix64(seed ^ h);
}

/// Uniform double in [0, 1) with 53 random bits.
constexpr double counter_uniform(std::uint64_t seed, std::uint64_t stream,
                                 std::uint64_t counter) noexcept {
  return static_cast<double>(mix_seed(seed, stream, counter) >> 11) * 0x1.0p-53;
}

/// Uniform integer in [0, n) by multiply-shift (bias below 2^-64 * n).
inline std::uint64_t counter_index(std::uint64_t seed, std::uint64_t stream,
                                   std::uint64_t counter, std::uint64_t n) noexcept {
  const unsigned __int128 wide =
      static_cast<unsigned __int128>(mix_seed(seed, stream, counter)) * n;
  return static_cast<std::uint64_t>(wide >> 64);
}

/// Standard normal via Box-Muller on two independent counter draws.
inline double counter_normal(std::uint64_t seed, std::uint64_t stream,
                             std::uint64_t counter) noexcept {
  const double u1 = 1.0 - counter_uniform(seed, stream, 2 * counter);  // (0, 1]
  const double u2 = counter_uniform(seed, stream, 2 * counter + 1);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

}  // namespace meshrl
