#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace infrank {

/// Seeded random source with platform-independent draws.
///
/// The engine is std::mt19937_64, whose output sequence the standard fixes.
/// The standard distributions are implementation-defined, so every draw
/// below is derived from raw engine output with a fixed algorithm.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  // Independent stream for a named purpose, stable across platforms.
  static Rng derive(std::uint64_t seed, std::string_view purpose);

  std::uint64_t next_u64() { return engine_(); }
  // Uniform in [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  // Uniform integer in [0, n) by rejection, n > 0.
  std::uint64_t below(std::uint64_t n);
  // Box-Muller; consumes two uniforms per call (no cached second value).
  double normal();
  double normal(double mean, double sd) { return mean + sd * normal(); }
  // Knuth multiplication method, suitable for small means.
  int poisson(double mean);
  bool bernoulli(double p) { return uniform() < p; }

 private:
  std::mt19937_64 engine_;
};

}  // namespace infrank
