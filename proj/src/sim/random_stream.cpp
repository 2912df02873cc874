#include "sim/random_stream.hpp"

#include <stdexcept>

namespace qka {

uint64_t splitmix64(uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

RandomStream RandomStream::substream(uint64_t seed, uint64_t index) {
  return RandomStream(splitmix64(splitmix64(seed) ^ (index + 1)));
}

uint64_t RandomStream::uniform_below(uint64_t n) {
  if (n == 0) throw std::invalid_argument("uniform_below(0)");
  const uint64_t limit = UINT64_MAX - UINT64_MAX % n;
  uint64_t x;
  do {
    x = engine_();
  } while (x >= limit);
  return x % n;
}

std::vector<uint8_t> RandomStream::bytes(std::size_t count) {
  std::vector<uint8_t> out(count);
  std::size_t i = 0;
  while (i < count) {
    uint64_t word = engine_();
    for (int b = 0; b < 8 && i < count; ++b, ++i) {
      out[i] = static_cast<uint8_t>(word >> (8 * b));
    }
  }
  return out;
}

std::size_t RandomStream::sample_discrete(const std::vector<double>& weights) {
  if (weights.empty()) throw std::invalid_argument("empty distribution");
  const double u = u01();
  double cum = 0.0;
  std::size_t last_positive = weights.size();
  for (std::size_t i = 0; i < weights.size(); ++i) {
    if (weights[i] > 0.0) last_positive = i;
    cum += weights[i];
    if (u < cum) return i;
  }
  if (last_positive == weights.size()) {
    throw std::invalid_argument("distribution has no positive weight");
  }
  return last_positive;
}

}  // namespace qka
