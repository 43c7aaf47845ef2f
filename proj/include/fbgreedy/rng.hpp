#pragma once

#include <cmath>
#include <cstdint>
#include <limits>

namespace fbgreedy {

// Counter-based 64-bit generator: output k is mix(key + (k+1) * gamma), the
// SplitMix64 finalizer applied to a Weyl sequence. Streams are split by key:
// stream_key(seed, i) gives an independent key for stream index i, so trial i
// of a batch always draws from the same sequence regardless of scheduling.
class CounterRng {
 public:
  using result_type = std::uint64_t;

  explicit CounterRng(std::uint64_t key, std::uint64_t counter = 0) noexcept
      : key_(key), counter_(counter) {}

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept {
    return std::numeric_limits<result_type>::max();
  }

  static constexpr std::uint64_t mix(std::uint64_t z) noexcept {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  static constexpr std::uint64_t stream_key(std::uint64_t seed, std::uint64_t stream) noexcept {
    return mix(seed ^ mix(stream + 0x632be59bd9b4e019ULL));
  }

  result_type operator()() noexcept {
    ++counter_;
    return mix(key_ + counter_ * kGamma);
  }

  // Uniform on [0, 1) from the top 53 bits; identical on every platform.
  double uniform() noexcept { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

  bool coin() noexcept { return ((*this)() >> 63) != 0; }

  std::uint64_t key() const noexcept { return key_; }
  std::uint64_t counter() const noexcept { return counter_; }

 private:
  static constexpr std::uint64_t kGamma = 0x9e3779b97f4a7c15ULL;
  std::uint64_t key_;
  std::uint64_t counter_;
};

}  // namespace fbgreedy
