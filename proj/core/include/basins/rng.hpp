#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace basins {

// Deterministic random stream. All draws are derived from the mt19937_64
// engine by hand (no std::*_distribution) so a given seed yields the same
// byte-for-byte sequence on every standard library.
//
// Seeding rule: the engine seed is splitmix(splitmix(global ^ splitmix(domain)) + index),
// where splitmix is the splitmix64 finalizer. The domain constant keeps the
// per-pixel method stream, the shared-noise stream, and the grid-jitter
// stream independent of each other under the same global seed; the index is
// the pixel index (row-major), so pixel streams do not depend on the order in
// which pixels are processed.
class RandomStream {
 public:
  enum class Domain : std::uint64_t { Method = 1, Noise = 2, Jitter = 3 };

  explicit RandomStream(std::uint64_t seed) : engine_(seed) {}

  static std::uint64_t mix(std::uint64_t v) {
    v += 0x9E3779B97F4A7C15ull;
    v = (v ^ (v >> 30)) * 0xBF58476D1CE4E5B9ull;
    v = (v ^ (v >> 27)) * 0x94D049BB133111EBull;
    return v ^ (v >> 31);
  }

  static RandomStream for_pixel(std::uint64_t global_seed, Domain domain, std::uint64_t index) {
    return RandomStream(mix(mix(global_seed ^ mix(static_cast<std::uint64_t>(domain))) + index));
  }

  std::uint64_t next_u64() { return engine_(); }

  // Uniform on [0, 1), 53-bit resolution.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  // Standard normal via Box-Muller; the second variate of each pair is cached.
  double normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    const double u1 = 1.0 - uniform();  // (0, 1], keeps the log finite
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double a = 6.283185307179586476925286766559 * u2;
    spare_ = r * std::sin(a);
    has_spare_ = true;
    return r * std::cos(a);
  }

 private:
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace basins
