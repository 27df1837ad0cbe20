#pragma once

// Deterministic random streams.  Every randomized routine derives its own
// engine from (master seed, stream name) so adding or reordering consumers
// never shifts anybody else's draws.

#include <cstdint>
#include <random>
#include <string_view>

namespace ssrg {

inline std::uint64_t fnv1a(std::string_view s) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

inline std::mt19937_64 make_rng(std::uint64_t master_seed, std::string_view stream_name) {
  return std::mt19937_64(splitmix64(master_seed ^ fnv1a(stream_name)));
}

}  // namespace ssrg
