#pragma once

#include <cstdint>
#include <random>
#include <string>

namespace ueba {

/// splitmix64 finalizer, used both as a mixing step and for deriving
/// independent child seeds from a parent seed and a stream label.
inline std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Deterministic seed-splitting rule: child = mix(parent, fnv1a(stream_id)).
/// Every stage of the pipeline derives its own stream from the global seed,
/// so stages can be re-run in isolation with identical randomness.
inline std::uint64_t derive_seed(std::uint64_t parent, const std::string& stream_id) {
  std::uint64_t h = 1469598103934665603ULL;  // FNV-1a 64 offset basis
  for (unsigned char c : stream_id) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return mix64(parent ^ h);
}

inline std::uint64_t derive_seed(std::uint64_t parent, std::uint64_t stream_index) {
  return mix64(parent ^ mix64(stream_index));
}

using Rng = std::mt19937_64;

}  // namespace ueba
