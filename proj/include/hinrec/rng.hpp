#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <string_view>

#include "hinrec/text.hpp"

namespace hinrec {

/// SplitMix64 finalizer; decorrelates (seed, stream) pairs before seeding.
constexpr std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream) noexcept {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// SplitMix64 as a UniformRandomBitGenerator. One word of state, so the
/// per-start walk streams cost nothing to create (seeding an mt19937_64 for
/// each of 10^4 starts took longer than the walks themselves).
class SplitMix64 {
 public:
  using result_type = std::uint64_t;

  explicit SplitMix64(std::uint64_t seed = 0) noexcept : state_(seed) {}

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept { return ~result_type{0}; }

  result_type operator()() noexcept {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  bool operator==(const SplitMix64&) const = default;

 private:
  std::uint64_t state_;
};

using Rng = SplitMix64;

/// Seed of a named sub-stream ("split", "walks", "init", "negatives", ...).
inline std::uint64_t substream_seed(std::uint64_t seed, std::string_view name) {
  return mix_seed(seed, text::fnv1a(name));
}

inline Rng make_rng(std::uint64_t seed, std::uint64_t stream = 0) {
  return Rng(mix_seed(seed, stream));
}

/// Uniform index in [0, n) by Lemire's multiply-shift rejection. The
/// libstdc++ distribution divides on every call, and the walk steps are
/// latency-bound on exactly this.
__extension__ using u128 = unsigned __int128;

inline std::size_t uniform_index(Rng& rng, std::size_t n) {
  const std::uint64_t range = n;
  u128 m = static_cast<u128>(rng()) * range;
  auto low = static_cast<std::uint64_t>(m);
  if (low < range) {
    const std::uint64_t floor = (0 - range) % range;
    while (low < floor) {
      m = static_cast<u128>(rng()) * range;
      low = static_cast<std::uint64_t>(m);
    }
  }
  return static_cast<std::size_t>(m >> 64);
}

/// Uniform double in [0, hi] from the top 53 bits of one draw. libstdc++'s
/// generate_canonical evaluates two long-double logarithms per call, which
/// dominated the cost of a weighted walk step.
inline double uniform_real(Rng& rng, double hi) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53 * hi;
}

}  // namespace hinrec
