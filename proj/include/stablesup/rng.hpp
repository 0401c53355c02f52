#pragma once

#include <cmath>
#include <cstdint>
#include <limits>

namespace stablesup {

inline std::uint64_t splitmix64_next(std::uint64_t& state) noexcept {
  std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

// xoshiro256++ (Blackman & Vigna). Satisfies UniformRandomBitGenerator.
class Xoshiro256pp {
 public:
  using result_type = std::uint64_t;

  explicit Xoshiro256pp(std::uint64_t seed = 0) noexcept { reseed(seed); }

  void reseed(std::uint64_t seed) noexcept {
    std::uint64_t sm = seed;
    for (auto& w : s_) w = splitmix64_next(sm);
  }

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }

  result_type operator()() noexcept {
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

 private:
  static constexpr std::uint64_t rotl(std::uint64_t x, int k) noexcept {
    return (x << k) | (x >> (64 - k));
  }
  std::uint64_t s_[4];
};

// A reproducible random stream addressed by (seed, index). Streams with
// different indices are seeded through two rounds of SplitMix64 mixing,
// so sample i of a run never depends on how samples are split across workers.
class Stream {
 public:
  Stream(std::uint64_t seed, std::uint64_t index) noexcept
      : seed_(seed), index_(index), gen_(derive(seed, index)) {}

  std::uint64_t seed() const noexcept { return seed_; }
  std::uint64_t index() const noexcept { return index_; }

  std::uint64_t bits() noexcept { return gen_(); }

  // Uniform on the open interval (0,1): 53-bit grid shifted by half a step.
  double uniform() noexcept {
    return (static_cast<double>(gen_() >> 11) + 0.5) * 0x1.0p-53;
  }
  double uniform(double a, double b) noexcept { return a + (b - a) * uniform(); }
  double exponential() noexcept { return -std::log(uniform()); }

  Xoshiro256pp& engine() noexcept { return gen_; }

  static std::uint64_t derive(std::uint64_t seed, std::uint64_t index) noexcept {
    std::uint64_t a = seed;
    std::uint64_t h = splitmix64_next(a);
    std::uint64_t b = index ^ 0xD1B54A32D192ED03ULL;
    h ^= splitmix64_next(b);
    std::uint64_t c = h;
    return splitmix64_next(c);
  }

 private:
  std::uint64_t seed_;
  std::uint64_t index_;
  Xoshiro256pp gen_;
};

}  // namespace stablesup
