#pragma once

#include <cstdint>
#include <random>

namespace msent {

/// Purposes that own an independent random substream.
enum class Stream : std::uint64_t {
  kSampling = 1,
  kTraining = 2,
  kEvaluation = 3,
  kTeacher = 4,
  kVerification = 5,
};

/// SplitMix64 finalizer.
constexpr std::uint64_t splitmix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Seed of substream (seed, purpose, index). Each stage of an experiment
/// draws from its own substream so that e.g. the level-k Gibbs draw does not
/// depend on how many draws earlier levels consumed.
constexpr std::uint64_t substream_seed(std::uint64_t seed, Stream purpose,
                                       std::uint64_t index = 0) {
  return splitmix64(splitmix64(splitmix64(seed) ^ static_cast<std::uint64_t>(purpose)) ^ index);
}

/// Portable generator: mt19937_64 is bit-exact across standard libraries, and
/// uniforms are built from raw draws instead of std::uniform_real_distribution.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}
  Rng(std::uint64_t seed, Stream purpose, std::uint64_t index = 0)
      : engine_(substream_seed(seed, purpose, index)) {}

  std::uint64_t next() { return engine_(); }

  /// Uniform on [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  /// Uniform on (0, 1).
  double uniform_open() {
    return (static_cast<double>(next() >> 11) + 0.5) * 0x1.0p-53;
  }

  /// +1 or -1 with equal probability.
  double sign() { return (next() >> 63) != 0 ? 1.0 : -1.0; }

  /// Standard exponential variate.
  double exponential();

  /// Uniform index in [0, n) by rejection (no modulo bias).
  std::uint64_t below(std::uint64_t n);

 private:
  std::mt19937_64 engine_;
};

}  // namespace msent
