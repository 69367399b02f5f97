#pragma once

#include <cmath>
#include <cstdint>
#include <string_view>

namespace pathground::rng {

// SplitMix64 is used for every random draw in the project instead of the
// <random> distributions, whose output is implementation-defined. Corpus
// regeneration and checkpoint determinism depend on draws being a pure
// function of the seed.
inline uint64_t splitmix64(uint64_t& state) {
  state += 0x9E3779B97F4A7C15ull;
  uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

/// Combines two seeds into a new, well-mixed one.
inline uint64_t mix(uint64_t a, uint64_t b) {
  uint64_t s = a ^ (b + 0x9E3779B97F4A7C15ull + (a << 6) + (a >> 2));
  return splitmix64(s);
}

/// FNV-1a over the bytes of a string; feeds per-sample seeds from image ids.
inline uint64_t hash_str(std::string_view s) {
  uint64_t h = 0xCBF29CE484222325ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001B3ull;
  }
  return h;
}

/// A small deterministic random stream.
class Stream {
 public:
  explicit Stream(uint64_t seed) : state_(seed) {}

  uint64_t next() { return splitmix64(state_); }

  /// Uniform double in [0, 1).
  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Uniform integer in [0, n). n must be positive and far below 2^64, so
  /// the modulo bias is negligible for this project's uses.
  int uniform_int(int n) { return static_cast<int>(next() % static_cast<uint64_t>(n)); }

  bool bernoulli(double p) { return uniform() < p; }

  /// Standard normal via Box-Muller. No caching of the second draw, so the
  /// stream position is a fixed function of the call count.
  double normal() {
    double u1 = uniform();
    if (u1 < 1e-300) u1 = 1e-300;
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586 * u2);
  }

 private:
  uint64_t state_;
};

}  // namespace pathground::rng
