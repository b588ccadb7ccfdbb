#pragma once

#include <cstdint>
#include <random>

namespace cmlptr {

/// Seeded generator with platform-independent output: the 64-bit Mersenne Twister
/// (std::mt19937_64, whose sequence is fixed by the C++ standard) with the
/// real-valued draws derived here rather than through std:: distributions, whose
/// algorithms vary between standard libraries.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform on [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Standard normal via Box-Muller (one draw per call, no caching).
  double normal();

 private:
  std::mt19937_64 engine_;
};

}  // namespace cmlptr
