#pragma once

#include <array>
#include <complex>
#include <cstdint>

namespace rsirs {

/// Deterministic random source (xoshiro256++ with splitmix64 seeding).
///
/// All randomness in the toolkit flows through this class so that results are
/// reproducible bit-for-bit across platforms and thread counts. Gaussian
/// variates use the polar method instead of std::normal_distribution, whose
/// output is implementation-defined.
class Rng {
 public:
  explicit Rng(std::uint64_t seed);

  /// Derives an independent stream from the original seed and a tag.
  /// Does not consume state, so stream derivation is order-independent.
  Rng stream(std::uint64_t tag) const;

  std::uint64_t next_u64();

  /// Uniform double in [0, 1) with 53 random bits.
  double uniform();

  /// Uniform double in [lo, hi).
  double uniform(double lo, double hi);

  /// Standard normal via the polar (Marsaglia) method.
  double normal();

  /// Circularly-symmetric complex Gaussian with unit variance, E|z|^2 = 1.
  std::complex<double> cnormal();

 private:
  std::array<std::uint64_t, 4> state_{};
  std::uint64_t seed_ = 0;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace rsirs
