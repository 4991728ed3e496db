#pragma once

#include <cmath>
#include <cstdint>

namespace contest {

// Counter-based stream: the k-th draw is a pure function of
// (seed, stream, substream, k), so runs split across workers reproduce the
// serial sequence exactly.
class CounterRng {
 public:
  CounterRng(std::uint64_t seed, std::uint64_t stream, std::uint64_t substream = 0) noexcept
      : key_(mix(seed ^ mix(stream + 0x9e3779b97f4a7c15ULL) ^
                 mix(substream * 0xd1b54a32d192ed03ULL + 0x632be59bd9b4e019ULL))) {}

  std::uint64_t next() noexcept { return mix(key_ + 0x9e3779b97f4a7c15ULL * ++counter_); }

  // Uniform on [0, 1) with 53 random bits.
  double uniform() noexcept { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  // Exp(1) variate.
  double exponential() noexcept { return -std::log1p(-uniform()); }

  std::uint64_t counter() const noexcept { return counter_; }

  // SplitMix64 finalizer.
  static constexpr std::uint64_t mix(std::uint64_t z) noexcept {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

}  // namespace contest
