#pragma once

#include <cstdint>
#include <random>

namespace qamht {

/// SplitMix64 finalizer. Used to derive independent stream seeds.
constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Seed for the stream identified by (seed, index). Streams for different
/// indices are decorrelated, so shots/restarts can run in any order.
constexpr std::uint64_t stream_seed(std::uint64_t seed, std::uint64_t index,
                                    std::uint64_t domain = 0) noexcept {
  return splitmix64(splitmix64(seed ^ splitmix64(domain)) + splitmix64(index + 0x632be59bd9b4e019ULL));
}

using Engine = std::mt19937_64;

inline Engine make_stream(std::uint64_t seed, std::uint64_t index, std::uint64_t domain = 0) {
  return Engine{stream_seed(seed, index, domain)};
}

/// Uniform double in [0, 1) with 53 random bits, independent of the
/// standard library's distribution implementation.
inline double uniform01(Engine& eng) {
  return static_cast<double>(eng() >> 11) * 0x1.0p-53;
}

// Domain tags keep streams of different subsystems apart.
namespace rng_domain {
inline constexpr std::uint64_t kShots = 1;
inline constexpr std::uint64_t kTrajectories = 2;
inline constexpr std::uint64_t kSqa = 3;
inline constexpr std::uint64_t kScenario = 4;
inline constexpr std::uint64_t kClutter = 5;
inline constexpr std::uint64_t kShuffle = 6;
}  // namespace rng_domain

}  // namespace qamht
