#pragma once

#include <cstddef>
#include <cstdint>
#include <random>

namespace advprompt {

/// Seeded random stream used on every sequential path of the engine.
///
/// Built on std::mt19937_64, whose output sequence is fixed by the standard.
/// The standard distributions are implementation defined, so index and unit
/// draws are derived from raw engine output here to keep runs identical
/// across standard libraries.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }

  /// Uniform integer in [0, n). n must be positive.
  std::size_t index(std::size_t n);

  /// Uniform real in [0, 1) with 53 bits of resolution.
  double unit();

  /// True with probability p (p <= 0 never, p >= 1 always).
  bool chance(double p) { return unit() < p; }

 private:
  std::mt19937_64 engine_;
};


}  // namespace advprompt
