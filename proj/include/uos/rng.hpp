#pragma once

#include <cstdint>
#include <random>

namespace uos {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

// Named-stream seed derivation. Every random draw in the library flows from
// a master seed through this mixer, so independent work items (trials, cells,
// restarts) get decorrelated streams and results do not depend on scheduling.
//
// Stream id convention used across the project:
//   derive_seed(master, tag)                  top-level stream
//   derive_seed(master, cell, trial)          sweep trial
//   derive_seed(master, cell, trial, part)    sub-stream of a trial
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t a,
                                 std::uint64_t b = 0, std::uint64_t c = 0) {
  std::uint64_t s = splitmix64(master);
  s = splitmix64(s ^ splitmix64(a));
  s = splitmix64(s ^ splitmix64(b));
  s = splitmix64(s ^ splitmix64(c));
  return s;
}

inline std::mt19937_64 make_engine(std::uint64_t seed) {
  return std::mt19937_64(seed);
}

}  // namespace uos
