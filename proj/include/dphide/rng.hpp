#pragma once

#include <bit>
#include <cstdint>
#include <initializer_list>
#include <random>
#include <vector>

namespace dphide {

using Engine = std::mt19937_64;

/// Independent engine for one unit of work, keyed by the experiment seed and
/// the work coordinates (sample size, contamination level, replication...).
/// The stream depends only on the key, never on which thread draws it.
inline Engine substream(std::uint64_t seed, std::initializer_list<std::uint64_t> key) {
  std::vector<std::uint32_t> words;
  words.reserve(2 * (key.size() + 1));
  auto push = [&words](std::uint64_t v) {
    words.push_back(static_cast<std::uint32_t>(v));
    words.push_back(static_cast<std::uint32_t>(v >> 32));
  };
  push(seed);
  for (std::uint64_t k : key) push(k);
  std::seed_seq seq(words.begin(), words.end());
  return Engine(seq);
}

/// Bit pattern of a double, for use as a substream key.
inline std::uint64_t key_of(double value) {
  return std::bit_cast<std::uint64_t>(value);
}

}  // namespace dphide
