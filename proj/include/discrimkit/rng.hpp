#pragma once

// SplitMix64 used as a counter-based generator: output k of the stream with
// seed s is mix64(s + (k+1) * 0x9E3779B97F4A7C15). Because each output is a
// pure function of (seed, counter), any partition of a counter range across
// workers reproduces the exact same values, so sharded runs merge to
// bit-identical totals.
//
// Reference outputs for seed 0 (counters 0..3), frozen as golden values and
// asserted in the test suite:
//   0xE220A8397B1DCDAF  0x6E789E6AA1B965F4  0x06C45D188009454F  0xF88BB8A8724C81EC

#include <cstdint>

namespace discrimkit::rng {

inline constexpr std::uint64_t kGoldenGamma = 0x9E3779B97F4A7C15ULL;

inline constexpr std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

// Output at position `counter` of the SplitMix64 stream seeded with `seed`.
inline constexpr std::uint64_t at(std::uint64_t seed, std::uint64_t counter) {
  return mix64(seed + (counter + 1) * kGoldenGamma);
}

// 53-bit uniform draw in [0, 1).
inline constexpr double unit_double(std::uint64_t bits) {
  return static_cast<double>(bits >> 11) * 0x1.0p-53;
}

inline constexpr double unit_at(std::uint64_t seed, std::uint64_t counter) {
  return unit_double(at(seed, counter));
}

// Sequential view over the same stream, for callers that just want a
// deterministic generator.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() {
    state_ += kGoldenGamma;
    return mix64(state_);
  }
  double next_double() { return unit_double(next()); }

  // uniform in [lo, hi)
  double next_in(double lo, double hi) {
    return lo + (hi - lo) * next_double();
  }

 private:
  std::uint64_t state_;
};

}  // namespace discrimkit::rng
