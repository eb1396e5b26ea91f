#pragma once

#include <cstdint>
#include <random>

namespace mkdiv {

/// Seeded 64-bit Mersenne Twister (std::mt19937_64, seeded with the 64-bit
/// seed directly). Uniform variates are derived by hand so the stream is
/// identical on every standard library:
///   uniform01 = (next() >> 11) * 2^-53
///   index(lo, hi) = lo + next() % (hi - lo + 1)
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }
  double uniform01() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }
  double uniform(double a, double b) { return a + (b - a) * uniform01(); }
  std::size_t index(std::size_t lo, std::size_t hi) {
    return lo + static_cast<std::size_t>(next() % static_cast<std::uint64_t>(hi - lo + 1));
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace mkdiv
