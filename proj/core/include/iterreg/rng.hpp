#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace iterreg {

/// Seedable RNG with bit-reproducible output across platforms: mt19937_64
/// plus explicit uniform/Gaussian transforms (the standard library
/// distributions are implementation-defined).
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  /// Uniform in (0, 1), 53-bit resolution, never exactly 0.
  double canonical() {
    const std::uint64_t bits = engine_() >> 11;  // top 53 bits
    return (static_cast<double>(bits) + 0.5) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * canonical(); }

  int uniform_int(int lo, int hi) {  // inclusive bounds
    const std::uint64_t span = static_cast<std::uint64_t>(hi - lo) + 1;
    return lo + static_cast<int>(engine_() % span);
  }

  /// Standard normal via Box-Muller; caches the spare deviate.
  double gaussian() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    const double u1 = canonical();
    const double u2 = canonical();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double two_pi = 2.0 * std::acos(-1.0);
    spare_ = r * std::sin(two_pi * u2);
    has_spare_ = true;
    return r * std::cos(two_pi * u2);
  }

  std::uint64_t next_raw() { return engine_(); }

 private:
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace iterreg
