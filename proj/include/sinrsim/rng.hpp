#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>
#include <vector>

namespace sinrsim {

using Engine = std::mt19937_64;

// Stream identifiers keep topology, pool, arrival and decision randomness
// independent of one another even when they share a master seed.
enum class StreamTag : std::uint64_t {
  topology = 1,
  pool = 2,
  arrivals = 3,
  decisions = 4,
};

/// Engine seeded from a (seed, path...) tuple through std::seed_seq, so the
/// resulting sequence depends only on the tuple and not on execution order.
inline Engine derive_stream(std::uint64_t seed, std::initializer_list<std::uint64_t> path) {
  std::vector<std::uint32_t> words;
  words.reserve(2 * (path.size() + 1));
  auto push = [&words](std::uint64_t v) {
    words.push_back(static_cast<std::uint32_t>(v & 0xffffffffu));
    words.push_back(static_cast<std::uint32_t>(v >> 32));
  };
  push(seed);
  for (auto v : path) push(v);
  std::seed_seq seq(words.begin(), words.end());
  return Engine(seq);
}

inline std::uint64_t derive_seed(std::uint64_t seed, std::initializer_list<std::uint64_t> path) {
  return derive_stream(seed, path)();
}

}  // namespace sinrsim
