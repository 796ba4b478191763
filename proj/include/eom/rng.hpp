#pragma once

// Seedable random streams.
//
// Engine: xoshiro256** (Blackman & Vigna). A stream is keyed by a 64-bit seed
// plus a path of 64-bit indices, e.g. (seed, replication, bootstrap-draw).
// The key is folded through the SplitMix64 finalizer:
//
//   h = mix(seed ^ 0x6a09e667f3bcc909)
//   for idx in path:  h = mix(h ^ mix(idx + 0x9e3779b97f4a7c15))
//
// and the four engine words are the first four outputs of a SplitMix64
// generator started at h. Distinct paths give statistically independent
// streams, so replications can run on any number of threads and still
// reproduce bit-for-bit.
//
// Derived variates are fixed here, not delegated to <random>, so results do
// not depend on the standard library implementation:
//   uniform01()   (x >> 11 + 0.5) * 2^-53, strictly inside (0, 1)
//   below(k)      Lemire's multiply-shift with rejection, unbiased on [0, k)

#include <array>
#include <cstdint>
#include <initializer_list>
#include <span>

namespace eom {

namespace detail {

constexpr std::uint64_t splitmix_finalize(std::uint64_t z) noexcept
{
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

constexpr std::uint64_t rotl(std::uint64_t x, int k) noexcept
{
  return (x << k) | (x >> (64 - k));
}

}  // namespace detail

class Stream
{
public:
  Stream(std::uint64_t seed, std::span<const std::uint64_t> path) noexcept
  {
    std::uint64_t h = detail::splitmix_finalize(seed ^ 0x6a09e667f3bcc909ULL);
    for (auto idx : path) {
      h = detail::splitmix_finalize(h ^ detail::splitmix_finalize(idx + kGolden));
    }
    for (auto& word : state_) {
      h += kGolden;
      word = detail::splitmix_finalize(h);
    }
  }

  Stream(std::uint64_t seed, std::initializer_list<std::uint64_t> path) noexcept
    : Stream(seed, std::span<const std::uint64_t>(path.begin(), path.size()))
  {}

  explicit Stream(std::uint64_t seed) noexcept
    : Stream(seed, std::span<const std::uint64_t>{})
  {}

  std::uint64_t next() noexcept
  {
    const std::uint64_t result = detail::rotl(state_[1] * 5, 7) * 9;
    const std::uint64_t t = state_[1] << 17;
    state_[2] ^= state_[0];
    state_[3] ^= state_[1];
    state_[1] ^= state_[2];
    state_[0] ^= state_[3];
    state_[2] ^= t;
    state_[3] = detail::rotl(state_[3], 45);
    return result;
  }

  double uniform01() noexcept
  {
    return (static_cast<double>(next() >> 11) + 0.5) * 0x1.0p-53;
  }

  // Uniform integer in [0, bound). bound must be positive.
  std::uint64_t below(std::uint64_t bound) noexcept
  {
    std::uint64_t x = next();
    __uint128_t m = static_cast<__uint128_t>(x) * bound;
    auto low = static_cast<std::uint64_t>(m);
    if (low < bound) {
      const std::uint64_t threshold = (0 - bound) % bound;
      while (low < threshold) {
        x = next();
        m = static_cast<__uint128_t>(x) * bound;
        low = static_cast<std::uint64_t>(m);
      }
    }
    return static_cast<std::uint64_t>(m >> 64);
  }

private:
  static constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ULL;
  std::array<std::uint64_t, 4> state_{};
};

}  // namespace eom
