#pragma once

#include <cstdint>
#include <random>

namespace mixkit {

// SplitMix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Per-item seed: mix64(global_seed + (index + 1) * 0x9e3779b97f4a7c15).
// Stable across platforms, so manifests can be replayed anywhere.
constexpr std::uint64_t derive_seed(std::uint64_t global_seed, std::uint64_t index) {
  return mix64(global_seed + (index + 1) * 0x9e3779b97f4a7c15ULL);
}

// Portable random stream. The engine is mt19937_64, whose output sequence
// is fixed by the standard; the distributions are implemented here because
// the <random> ones are not reproducible across standard libraries.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }

  // Uniform on the closed interval [0, 1].
  double uniform_closed() {
    return static_cast<double>(next() >> 11) * (1.0 / 9007199254740991.0);
  }

  // Uniform on [lo, hi], both ends attainable.
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform_closed(); }

  // Uniform integer in [lo, hi] by rejection, no modulo bias.
  std::int64_t uniform_int(std::int64_t lo, std::int64_t hi) {
    const std::uint64_t span = static_cast<std::uint64_t>(hi - lo) + 1;
    if (span == 0) return static_cast<std::int64_t>(next());
    const std::uint64_t limit = (0 - span) % span;  // 2^64 mod span
    std::uint64_t r = next();
    while (r < limit) r = next();
    return lo + static_cast<std::int64_t>(r % span);
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace mixkit
