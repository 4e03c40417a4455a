#pragma once

#include <cstdint>
#include <random>

namespace tgs {

/// Seeded generator with platform-independent derived draws.
///
/// std::*_distribution output is implementation-defined, so the draws used by
/// training (uniform reals, bounded integers, normals) are derived here from
/// the raw mt19937_64 stream to keep runs reproducible across toolchains.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }
  /// Uniform on [0, 1) with 53 bits of precision.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  /// Uniform integer on [0, n). n must be > 0.
  std::uint64_t below(std::uint64_t n);
  /// Standard normal via Box-Muller.
  double normal();
  bool bernoulli(double p) { return uniform() < p; }

  /// Independent child stream; deterministic in (parent state, stream id).
  Rng fork(std::uint64_t stream);

 private:
  std::mt19937_64 engine_;
};

}  // namespace tgs
