#pragma once

#include <cstdint>
#include <limits>

namespace levyrisk::detail {

// SplitMix64 step (Steele, Lea, Flood). Used to expand a 64-bit seed into
// engine state and to mix (seed, stream) pairs.
inline std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// xoshiro256++ (Blackman & Vigna). Small, fast, and good enough statistical
// quality for Monte Carlo work; state is seeded through SplitMix64 as the
// authors recommend.
class Xoshiro256pp {
 public:
  using result_type = std::uint64_t;

  explicit Xoshiro256pp(std::uint64_t seed) {
    std::uint64_t sm = seed;
    for (auto& word : state_) word = splitmix64(sm);
  }

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  result_type operator()() {
    const std::uint64_t result = rotl(state_[0] + state_[3], 23) + state_[0];
    const std::uint64_t t = state_[1] << 17;
    state_[2] ^= state_[0];
    state_[3] ^= state_[1];
    state_[1] ^= state_[2];
    state_[0] ^= state_[3];
    state_[2] ^= t;
    state_[3] = rotl(state_[3], 45);
    return result;
  }

  // Uniform double in (0, 1]: never 0, so logarithms are safe.
  double uniform_pos() {
    return (static_cast<double>(operator()() >> 11) + 1.0) * 0x1.0p-53;
  }

  // Uniform double in [0, 1).
  double uniform01() { return static_cast<double>(operator()() >> 11) * 0x1.0p-53; }

 private:
  static std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }
  std::uint64_t state_[4];
};

// Seed for one substream. Paths i and j of the same master seed, or the same
// path index under different master seeds, get decorrelated engine states.
inline std::uint64_t substream_seed(std::uint64_t master_seed, std::uint64_t stream_index) {
  std::uint64_t s = master_seed ^ (0x9e3779b97f4a7c15ULL * (stream_index + 1));
  return splitmix64(s);
}

}  // namespace levyrisk::detail
