#pragma once

#include <cstdint>

namespace zetares {

// Counter-based generator: draw k of stream `seed` is
//
//   mix(seed + (k+1) * 0x9E3779B97F4A7C15)
//
// where mix is the SplitMix64 finalizer (Steele, Lea & Flood 2014).
// Each draw is a pure function of (seed, counter), so sample streams can be
// split across workers by index with no shared state and identical output
// for any worker count.
class CounterRng {
public:
  explicit CounterRng(std::uint64_t seed) noexcept : seed_(seed) {}

  static std::uint64_t mix(std::uint64_t z) noexcept {
    z ^= z >> 30;
    z *= 0xBF58476D1CE4E5B9ull;
    z ^= z >> 27;
    z *= 0x94D049BB133111EBull;
    z ^= z >> 31;
    return z;
  }

  std::uint64_t bits(std::uint64_t counter) const noexcept {
    return mix(seed_ + (counter + 1) * 0x9E3779B97F4A7C15ull);
  }

  // Uniform in [0,1), 53 random bits.
  double uniform01(std::uint64_t counter) const noexcept {
    return static_cast<double>(bits(counter) >> 11) * 0x1.0p-53;
  }

  double uniform(std::uint64_t counter, double lo, double hi) const noexcept {
    return lo + (hi - lo) * uniform01(counter);
  }

  std::uint64_t seed() const noexcept { return seed_; }

private:
  std::uint64_t seed_;
};

}  // namespace zetares
