#pragma once

#include <cstdint>

namespace majlab {

/// Counter-based generator: every draw is a pure function of
/// (seed, stream, counter), so sampled objects are reproducible
/// independent of evaluation order and worker count.
class CounterRng {
 public:
  // Stream tags keep independent uses of the same seed decorrelated.
  enum Stream : std::uint64_t {
    kDatasetBits = 1,
    kSupportChoice = 2,
    kFamilySample = 3,
    kParamInit = 4,
    kProbeDraws = 5,
    kMonteCarlo = 6,
    kThetaDraws = 7,
    kPairSample = 8,
    kEpsilonGrid = 9,
  };

  CounterRng(std::uint64_t seed, std::uint64_t stream)
      : key_(mix(mix(seed) ^ (0x9E3779B97F4A7C15ULL * (stream + 1)))) {}

  std::uint64_t word(std::uint64_t counter) const {
    return mix(key_ + counter * 0x9E3779B97F4A7C15ULL);
  }

  /// Uniform in [0, 1) with 53 random bits.
  double unit(std::uint64_t counter) const {
    return static_cast<double>(word(counter) >> 11) * 0x1.0p-53;
  }

  /// Uniform in [lo, hi).
  double uniform(std::uint64_t counter, double lo, double hi) const {
    return lo + (hi - lo) * unit(counter);
  }

  int sign(std::uint64_t counter) const {
    return (word(counter) >> 63) ? 1 : -1;
  }

  /// Uniform integer in [0, bound) via widening multiply.
  std::uint64_t below(std::uint64_t counter, std::uint64_t bound) const {
    const unsigned __int128 prod =
        static_cast<unsigned __int128>(word(counter)) * bound;
    return static_cast<std::uint64_t>(prod >> 64);
  }

  /// Stateful cursor for call sites that just want a sequence.
  std::uint64_t next() { return word(cursor_++); }
  double next_unit() { return unit(cursor_++); }
  double next_uniform(double lo, double hi) { return uniform(cursor_++, lo, hi); }
  int next_sign() { return sign(cursor_++); }
  std::uint64_t next_below(std::uint64_t bound) { return below(cursor_++, bound); }

 private:
  static std::uint64_t mix(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
  }

  std::uint64_t key_;
  std::uint64_t cursor_ = 0;
};

} // namespace majlab
