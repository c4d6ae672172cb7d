#pragma once

#include <cstdint>
#include <random>

namespace stabreg {

using Rng = std::mt19937_64;

// Derives a stream-specific seed from a replication seed. Runs that share a
// replication seed but differ in policy parameters keep identical arrival and
// supply streams (common random numbers), because every purpose draws from
// its own engine.
inline std::uint64_t stream_seed(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ull * (stream + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

enum class RngStream : std::uint64_t {
  Supply = 0,     // realized service rate draws
  Predict = 1,    // prediction hits and guesses
  Arrivals = 2,   // exogenous demand
  Routing = 3,    // per-vehicle turning draws
  Policy = 4,     // controller randomization
};

inline Rng make_stream(std::uint64_t seed, RngStream s) {
  return Rng(stream_seed(seed, static_cast<std::uint64_t>(s)));
}

}  // namespace stabreg
