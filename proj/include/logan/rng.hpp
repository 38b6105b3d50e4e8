#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>

namespace logan {

using Rng = std::mt19937_64;

// splitmix64 finalizer
constexpr std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Child seed for a named sub-stream. Stable across runs and platforms.
inline std::uint64_t derive_seed(std::uint64_t base, std::initializer_list<std::uint64_t> path) {
  std::uint64_t s = mix64(base);
  for (auto p : path) s = mix64(s ^ mix64(p + 0x632be59bd9b4e019ULL));
  return s;
}

// Stream tags used with derive_seed.
namespace stream {
inline constexpr std::uint64_t model = 1;
inline constexpr std::uint64_t data = 2;
inline constexpr std::uint64_t split = 3;
inline constexpr std::uint64_t bootstrap = 4;
inline constexpr std::uint64_t replication = 5;
}  // namespace stream

}  // namespace logan
