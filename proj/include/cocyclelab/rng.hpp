#pragma once

#include <cstdint>
#include <string_view>

namespace cocyclelab {

/// Deterministic splitmix64 stream.  The standard-library engines are
/// portable but the distributions are not, so uniforms are produced here
/// directly from the raw 64-bit stream.  Per-component streams are derived
/// from a global seed plus a fixed label, which keeps independent samplers
/// reproducible regardless of call order.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  static std::uint64_t derive_seed(std::uint64_t seed, std::string_view label) {
    std::uint64_t h = 1469598103934665603ull;  // FNV-1a offset basis
    for (char c : label) {
      h ^= static_cast<std::uint8_t>(c);
      h *= 1099511628211ull;
    }
    return mix(seed ^ h);
  }

  static Rng labeled(std::uint64_t seed, std::string_view label) {
    return Rng(derive_seed(seed, label));
  }

  std::uint64_t next_u64() {
    state_ += 0x9e3779b97f4a7c15ull;
    return mix(state_);
  }

  /// Uniform in [0, 1).
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Uniform integer in [0, n).
  std::uint64_t below(std::uint64_t n) { return next_u64() % n; }

  int index(int n) { return static_cast<int>(below(static_cast<std::uint64_t>(n))); }

 private:
  static std::uint64_t mix(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }

  std::uint64_t state_;
};

}  // namespace cocyclelab
