#pragma once

#include <cstdint>
#include <random>
#include <string_view>
#include <vector>

namespace polygcl {

using Rng = std::mt19937_64;

// SplitMix64 step; advances `state` and returns the mixed output.
std::uint64_t splitmix64(std::uint64_t& state);

// Derives an independent stream seed for a named subsystem ("model",
// "augment", "probe", ...) from the master seed. Toggling one subsystem never
// perturbs the streams of the others.
std::uint64_t derive_seed(std::uint64_t master, std::string_view subsystem);
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index);

// Uniform double in [0, 1) built from the top 53 bits. Unlike
// std::uniform_real_distribution this is identical across standard libraries.
inline double uniform01(Rng& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

// Unbiased integer in [0, bound).
std::uint64_t uniform_index(Rng& rng, std::uint64_t bound);

// Fisher-Yates shuffle with `uniform_index`.
template <typename T>
void shuffle(std::vector<T>& items, Rng& rng) {
  for (std::size_t i = items.size(); i > 1; --i) {
    const std::size_t j = uniform_index(rng, i);
    std::swap(items[i - 1], items[j]);
  }
}

}  // namespace polygcl
