#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>
#include <vector>

namespace kspnet {

using Rng = std::mt19937_64;

/// Generator for a named substream of a seed, e.g. (seed, sample index, stream id).
/// Different key tuples give independent, reproducible streams.
inline Rng MakeRng(std::initializer_list<std::uint64_t> keys)
{
  std::vector<std::uint32_t> words;
  words.reserve(keys.size() * 2);
  for (auto k : keys) {
    words.push_back(std::uint32_t(k & 0xffffffffu));
    words.push_back(std::uint32_t(k >> 32));
  }
  std::seed_seq seq(words.begin(), words.end());
  return Rng(seq);
}

} // namespace kspnet
