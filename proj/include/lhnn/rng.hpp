#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

namespace lhnn {

// All randomness in the library flows through this engine so that seeded runs
// are exactly reproducible. Distribution transforms are hand-rolled because
// the standard library does not pin <random> distribution algorithms; the
// raw mt19937_64 stream is the only implementation-defined-free primitive.
class RandomEngine {
 public:
  explicit RandomEngine(std::uint64_t seed) : gen_(seed) {}

  // Uniform on (0, 1]: 53 high bits of the raw draw, shifted away from zero so
  // logarithms of the result are always finite.
  double uniform01() {
    const std::uint64_t x = gen_();
    return static_cast<double>((x >> 11) + 1) * 0x1.0p-53;
  }

  // Standard normal via Box-Muller without caching the second variate: every
  // call consumes exactly two uniforms, keeping the stream position a simple
  // function of the number of draws.
  double normal() {
    const double u1 = uniform01();
    const double u2 = uniform01();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925286766559 * u2);
  }

  // Uniform direction from {-1, +1}; consumes one uniform.
  int direction() { return uniform01() <= 0.5 ? -1 : +1; }

  // Uniform integer in [0, n); consumes one uniform. Used only for shuffles
  // and spot checks, never inside a sampling chain's documented stream.
  std::size_t index(std::size_t n) {
    const double u = uniform01();
    std::size_t k = static_cast<std::size_t>(u * static_cast<double>(n));
    return k >= n ? n - 1 : k;
  }

  // Fisher-Yates shuffle driven by index().
  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      std::size_t j = index(i);
      std::swap(v[i - 1], v[j]);
    }
  }

 private:
  std::mt19937_64 gen_;
};

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

// Sub-seed for chain k of a multi-chain run; chain 0 uses the seed verbatim.
inline std::uint64_t derive_subseed(std::uint64_t seed, std::uint64_t chain_index) {
  if (chain_index == 0) return seed;
  return splitmix64(seed + 0x9E3779B97F4A7C15ull * chain_index);
}

}  // namespace lhnn
