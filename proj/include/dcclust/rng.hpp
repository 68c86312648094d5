#pragma once

#include <cstdint>
#include <random>

namespace dcclust {

/// Portable seeded generator.
///
/// The engine is std::mt19937_64, whose output sequence is fixed by the
/// standard. The standard distributions are not, so the uniform and normal
/// transforms are implemented here: uniform() takes the top 53 bits of one
/// draw, normal() is the Box-Muller transform on two uniforms. A given seed
/// therefore yields the same doubles on every conforming platform.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform on [0, 1).
  double uniform();

  /// Uniform on [low, high), never returning `high` even after rounding.
  double uniform(double low, double high);

  /// Standard normal.
  double normal();

 private:
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace dcclust
