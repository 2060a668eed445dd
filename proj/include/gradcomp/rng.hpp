#pragma once

#include <cstdint>
#include <optional>
#include <random>

namespace gradcomp {

/**
 * Seeded random source for instance generation.
 *
 * The bit stream is std::mt19937_64, whose output sequence is fixed by the
 * C++ standard. Distributions are implemented here rather than taken from
 * <random>, because std::normal_distribution and friends are allowed to
 * differ between standard library implementations:
 *   - uniform():  top 53 bits of one draw, scaled into [0, 1)
 *   - normal():   Box-Muller on two uniforms, both outputs used in turn
 *
 * Single owner; not safe for concurrent draws.
 */
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : seed_(seed), engine_(seed) {}

  std::uint64_t seed() const noexcept { return seed_; }

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform on [0, 1).
  double uniform();
  /// Uniform on (0, 1].
  double uniform_positive() { return 1.0 - uniform(); }
  /// Standard normal.
  double normal();

 private:
  std::uint64_t seed_;
  std::mt19937_64 engine_;
  std::optional<double> spare_normal_;
};

}  // namespace gradcomp
