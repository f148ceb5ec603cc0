#ifndef ODYN_RNG_HPP
#define ODYN_RNG_HPP

#include <cstdint>

namespace odyn {

// SplitMix64.  Small, fast, and good enough for Monte Carlo sampling; chosen
// because substreams keyed on (seed, block) make parallel aggregates
// independent of scheduling.
struct SplitMix64 {
  std::uint64_t state;

  explicit SplitMix64(std::uint64_t seed) : state(seed) {}

  std::uint64_t next() {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ull);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }

  // uniform in [0,1)
  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }
};

// Deterministic substream key for block-parallel sampling.
inline std::uint64_t substream_seed(std::uint64_t seed, std::uint64_t block) {
  SplitMix64 mix(seed ^ (0x632be59bd9b4e019ull * (block + 1)));
  return mix.next();
}

}  // namespace odyn

#endif
