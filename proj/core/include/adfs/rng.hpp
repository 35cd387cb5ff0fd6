#pragma once

#include <cstdint>
#include <limits>
#include <string_view>

namespace adfs {

/// Counter-based generator: the stream for (seed, stream, index) is a pure
/// function of those three values, so sample i can be drawn on any worker
/// in any order. Satisfies UniformRandomBitGenerator for use with <random>
/// distributions.
class CounterRng {
 public:
  using result_type = std::uint64_t;

  CounterRng(std::uint64_t seed, std::uint64_t stream, std::uint64_t index)
      : key_(mix(mix(seed ^ 0x243f6a8885a308d3ULL) ^ mix(stream + 0x13198a2e03707344ULL)) ^
             mix(index + 0xa4093822299f31d0ULL)) {}

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  result_type operator()() { return mix(key_ + 0x9e3779b97f4a7c15ULL * ++counter_); }

  /// Uniform double in [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

  static constexpr std::uint64_t mix(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

/// Stable stream identifier derived from a label (FNV-1a).
constexpr std::uint64_t stream_id(std::string_view label) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (char c : label) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ULL;
  }
  return h;
}

}  // namespace adfs
