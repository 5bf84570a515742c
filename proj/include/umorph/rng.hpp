#pragma once

#include <cstdint>
#include <random>
#include <vector>

namespace umorph {

// std::uniform_int_distribution and std::shuffle are implementation
// defined, so bounded draws and shuffles are hand rolled on top of
// mt19937_64 to keep seeded runs byte-identical across platforms.
inline std::uint64_t bounded(std::mt19937_64& rng, std::uint64_t n) {
  return rng() % n;
}

// Uniform double in [0, 1) with 53 bits of randomness.
inline double unit_real(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

template <typename T>
void deterministic_shuffle(std::vector<T>& v, std::mt19937_64& rng) {
  for (std::size_t i = v.size(); i > 1; --i) {
    std::swap(v[i - 1], v[bounded(rng, i)]);
  }
}

}  // namespace umorph
