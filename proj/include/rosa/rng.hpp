// Deterministic, portable random number generator for fuzzing loops.
//
// xoshiro256** seeded through splitmix64. Implemented here rather than
// with <random> distributions because libstdc++/libc++ distributions are
// not bit-stable across implementations, and campaign reproducibility is
// part of the contract.

#pragma once

#include <cstdint>

namespace rosa {

inline std::uint64_t splitmix64(std::uint64_t& state) {
  state += 0x9e3779b97f4a7c15ULL;
  std::uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

class Rng {
 public:
  explicit Rng(std::uint64_t seed) {
    std::uint64_t sm = seed;
    for (auto& word : s_) word = splitmix64(sm);
  }

  std::uint64_t next() {
    const std::uint64_t result = rotl(s_[1] * 5, 7) * 9;
    const std::uint64_t t = s_[1] << 17;
    s_[2] ^= s_[0];
    s_[3] ^= s_[1];
    s_[1] ^= s_[2];
    s_[0] ^= s_[3];
    s_[2] ^= t;
    s_[3] = rotl(s_[3], 45);
    return result;
  }

  // Uniform in [0, bound). bound must be nonzero. Modulo bias is
  // negligible for fuzzing-sized bounds and keeps the stream layout
  // simple and stable.
  std::uint64_t below(std::uint64_t bound) { return next() % bound; }

  // Uniform in [lo, hi] inclusive.
  std::uint64_t between(std::uint64_t lo, std::uint64_t hi) {
    return lo + below(hi - lo + 1);
  }

  std::uint8_t byte() { return static_cast<std::uint8_t>(next() & 0xff); }

  bool chance_one_in(std::uint64_t n) { return below(n) == 0; }

 private:
  static std::uint64_t rotl(std::uint64_t x, int k) {
    return (x << k) | (x >> (64 - k));
  }

  std::uint64_t s_[4];
};

// Derives independent sub-streams (phase 1 vs phase 2, per-worker
// streams) from one campaign seed.
inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream) {
  std::uint64_t sm = base ^ (0xa0761d6478bd642fULL + stream);
  std::uint64_t v = splitmix64(sm);
  // A second scramble so that (base, 0) does not collide with plain base.
  return splitmix64(v);
}

}  // namespace rosa
