#pragma once

#include <cstdint>
#include <random>

namespace cptrrt {

// SplitMix64 finalizer; used to derive independent sub-seeds from one base seed.
inline std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Sub-seed for `stream` under `base`. derive_seed(derive_seed(s, a), b) is the
// documented way to split further.
inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream) {
  return mix64(mix64(base) ^ mix64(stream + 0x632be59bd9b4e019ULL));
}

using Engine = std::mt19937_64;

// Uniform double in [0, 1) from the top 53 bits; portable across standard libraries.
inline double unit_uniform(Engine& eng) {
  return static_cast<double>(eng() >> 11) * 0x1.0p-53;
}

// Fair +-1 draw from the top bit.
inline int rademacher(Engine& eng) { return (eng() >> 63) ? 1 : -1; }

}  // namespace cptrrt
