#pragma once

#include <bit>
#include <cstdint>
#include <string_view>

namespace codei {

// Stable across platforms and runs, unlike std::hash.
inline constexpr std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline constexpr std::uint64_t hash_mix(std::uint64_t seed, std::uint64_t v) {
  return splitmix64(seed ^ splitmix64(v));
}

inline std::uint64_t hash_double(std::uint64_t seed, double v) {
  if (v == 0.0) v = 0.0;  // fold -0
  return hash_mix(seed, std::bit_cast<std::uint64_t>(v));
}

inline constexpr std::uint64_t hash_string(std::uint64_t seed, std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (char c : s) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ULL;
  }
  return hash_mix(seed, h);
}

}  // namespace codei
