#pragma once

#include <cstdint>
#include <random>
#include <vector>

namespace qka {

// Seedable randomness source for every sampled choice in the simulator.
//
// All protocol, adversary, and measurement sampling draws from a
// RandomStream, so a run is a pure function of (configuration, seed).
// Independent streams for e.g. Monte Carlo trials come from substream(),
// which mixes (seed, index) through the splitmix64 finalizer so that
// trial streams never overlap by construction of distinct seeds.
class RandomStream {
 public:
  explicit RandomStream(uint64_t seed) : engine_(seed) {}

  static RandomStream substream(uint64_t seed, uint64_t index);

  // Uniform double in [0, 1), 53 significant bits.
  double u01() { return (engine_() >> 11) * 0x1.0p-53; }

  // Uniform bit.
  int bit() { return static_cast<int>(engine_() >> 63); }

  // Uniform integer in [0, n); rejection-sampled, no modulo bias.
  uint64_t uniform_below(uint64_t n);

  std::vector<uint8_t> bytes(std::size_t count);

  // Index into a discrete distribution given by non-negative weights that
  // sum to ~1; rounding slack collapses onto the last positive weight.
  std::size_t sample_discrete(const std::vector<double>& weights);

 private:
  std::mt19937_64 engine_;
};

uint64_t splitmix64(uint64_t x);

}  // namespace qka
