#pragma once

#include <cstdint>
#include <random>

#include <boost/random/normal_distribution.hpp>

namespace rvbubble {

/// SplitMix64 finalizer. Bijective on 64-bit words.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Key of the substream `stream` under master `seed`. Depends only on the
/// pair, never on how many other streams were consumed before it.
constexpr std::uint64_t substream_key(std::uint64_t seed,
                                      std::uint64_t stream) noexcept {
  return mix64(mix64(seed) ^ mix64(stream ^ 0x5851f42d4c957f2dULL));
}

/// Random source for one replication.
///
/// Each (seed, stream) pair owns an independent engine, so replications can
/// be evaluated in any order or on any thread and still produce the same
/// draws.
class Stream {
 public:
  Stream(std::uint64_t seed, std::uint64_t stream)
      : engine_(substream_key(seed, stream)) {}

  double normal() { return normal_(engine_); }

  /// +1 or -1 with equal probability.
  double rademacher() { return (engine_() >> 63) ? 1.0 : -1.0; }

  std::mt19937_64& engine() noexcept { return engine_; }

 private:
  std::mt19937_64 engine_;
  boost::random::normal_distribution<double> normal_;
};

}  // namespace rvbubble
