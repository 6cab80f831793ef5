#pragma once

#include <cstdint>

namespace permexp {

// splitmix64 finalizer; used for seeding and for deriving stream seeds.
constexpr std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ull);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d9649669b545fbull;
  return z ^ (z >> 31);
}

// xoshiro256++ with splitmix64 seeding. The standard <random> engines are
// portable but their distributions are not; this generator plus the helpers
// below give bit-identical streams on every platform, which the seed
// determinism contracts require.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) {
    std::uint64_t sm = seed;
    for (auto& w : s_) w = splitmix64(sm);
  }

  std::uint64_t next_u64() {
    const std::uint64_t result = rotl(s_[0] + s_[3], 23) + s_[0];
    const std::uint64_t t = s_[1] << 17;
    s_[2] ^= s_[0];
    s_[3] ^= s_[1];
    s_[1] ^= s_[2];
    s_[0] ^= s_[3];
    s_[2] ^= t;
    s_[3] = rotl(s_[3], 45);
    return result;
  }

  // Uniform on [0,1) with 53 random bits.
  double uniform01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  // Unbiased uniform draw from {0, 1, ..., bound-1} by masked rejection.
  std::uint64_t uniform_below(std::uint64_t bound) {
    if (bound <= 1) return 0;
    const std::uint64_t mask = mask_for(bound - 1);
    std::uint64_t draw;
    do {
      draw = next_u64() & mask;
    } while (draw >= bound);
    return draw;
  }

 private:
  static constexpr std::uint64_t rotl(std::uint64_t x, int k) {
    return (x << k) | (x >> (64 - k));
  }
  static constexpr std::uint64_t mask_for(std::uint64_t v) {
    std::uint64_t m = v;
    m |= m >> 1;
    m |= m >> 2;
    m |= m >> 4;
    m |= m >> 8;
    m |= m >> 16;
    m |= m >> 32;
    return m;
  }

  std::uint64_t s_[4];
};

// Independent stream seed for replication `index` of a run seeded by `seed`.
// Used so that parallel replications are reproducible regardless of the
// worker that executes them.
constexpr std::uint64_t derive_stream_seed(std::uint64_t seed, std::uint64_t index) {
  std::uint64_t sm = seed;
  std::uint64_t a = splitmix64(sm);
  sm = a ^ (index * 0xd1342543de82ef95ull + 0x2545f4914f6cdd1dull);
  return splitmix64(sm);
}

}  // namespace permexp
