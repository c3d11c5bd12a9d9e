#pragma once

#include <cstdint>
#include <random>
#include <utility>
#include <vector>

namespace dangspeech {

// The standard distributions are not specified bit-for-bit, so shuffles
// are done by hand to keep outputs identical across standard libraries.
using Rng = std::mt19937_64;

// Uniform in [0, n) by rejection sampling. n > 0.
inline std::uint64_t uniform_index(Rng& rng, std::uint64_t n) {
  const std::uint64_t limit = Rng::max() - (Rng::max() % n + 1) % n;
  std::uint64_t x;
  do {
    x = rng();
  } while (x > limit);
  return x % n;
}

template <typename T>
void shuffle(std::vector<T>& v, Rng& rng) {
  for (std::size_t i = v.size(); i > 1; --i) {
    const std::size_t j = uniform_index(rng, i);
    std::swap(v[i - 1], v[j]);
  }
}

}  // namespace dangspeech
