#pragma once

#include <cstdint>

namespace bperc {

// Counter-friendly generator: cheap to seed, distinct streams from distinct
// seeds, good enough statistical quality for Bernoulli fields.
struct SplitMix64 {
  std::uint64_t state;

  explicit SplitMix64(std::uint64_t seed) : state(seed) {}

  std::uint64_t next() {
    std::uint64_t z = (state += 0x9E3779B97F4A7C15ull);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
  }

  // Uniform in [0, 1), 53-bit resolution.
  double next_unit() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }
};

// Stream derivation rule recorded in every Monte Carlo output: trial t draws
// from SplitMix64 seeded with seed XOR (t+1)*golden. Trials are independent of
// scheduling order by construction.
inline constexpr const char* kStreamRuleId = "sm64-xor-golden-v1";

inline SplitMix64 trial_stream(std::uint64_t seed, std::uint64_t trial) {
  return SplitMix64(seed ^ ((trial + 1) * 0x9E3779B97F4A7C15ull));
}

// Deterministic sub-seed for nested experiments (one probe = one sub-seed).
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t salt) {
  SplitMix64 g(seed ^ ((salt + 1) * 0xBF58476D1CE4E5B9ull));
  return g.next();
}

}  // namespace bperc
