#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>

namespace gppo {

/// Deterministic random stream with fixed draw accounting.
///
/// std::mt19937_64 supplies raw 64-bit words; the uniform and normal
/// transforms are implemented here (not via std::*_distribution) so the
/// produced sequence is identical across standard-library implementations.
/// Draw costs: uniform() consumes one engine word, normal() consumes exactly
/// two (Box-Muller, no caching of the second variate).
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_word() { return engine_(); }

  /// Uniform double in [0, 1) with 53 random bits.
  double uniform() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Standard normal variate. Consumes two engine words.
  double normal() {
    // 1 - u in (0, 1] keeps the log argument away from zero.
    const double u1 = 1.0 - uniform();
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) *
           std::cos(2.0 * std::numbers::pi * u2);
  }

  /// Uniform index in [0, n). Used for minibatch shuffles; the modulo bias
  /// is irrelevant for that purpose and the result is platform-stable.
  std::size_t index(std::size_t n) {
    return static_cast<std::size_t>(engine_() % n);
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace gppo
