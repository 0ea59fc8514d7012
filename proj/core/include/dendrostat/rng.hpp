#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <vector>

namespace dendrostat {

// Deterministic, platform-independent generators. std::mt19937 plus the
// standard-library distributions would not give byte-identical streams
// across standard libraries, so the whole pipeline draws from these.

inline uint64_t splitmix64(uint64_t& state) {
  uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

/// Mixes a base seed with up to three stream coordinates into one 64-bit key.
/// Used to hand independent, reproducible streams to grid cells, replicates,
/// folds and trees regardless of execution order or thread count.
inline uint64_t derive_seed(uint64_t base, uint64_t a = 0, uint64_t b = 0,
                            uint64_t c = 0) {
  uint64_t s = base;
  uint64_t k = splitmix64(s);
  s ^= a + 0x9E3779B97F4A7C15ULL;
  k ^= splitmix64(s);
  s ^= b + 0xC2B2AE3D27D4EB4FULL;
  k ^= splitmix64(s);
  s ^= c + 0x165667B19E3779F9ULL;
  k ^= splitmix64(s);
  return k;
}

/// xoshiro256++ seeded via SplitMix64.
class Rng {
 public:
  explicit Rng(uint64_t seed = 0) {
    uint64_t sm = seed;
    for (auto& w : s_) w = splitmix64(sm);
  }

  uint64_t next_u64() {
    const uint64_t result = rotl(s_[0] + s_[3], 23) + s_[0];
    const uint64_t t = s_[1] << 17;
    s_[2] ^= s_[0];
    s_[3] ^= s_[1];
    s_[1] ^= s_[2];
    s_[0] ^= s_[3];
    s_[2] ^= t;
    s_[3] = rotl(s_[3], 45);
    return result;
  }

  /// Uniform draw in the open interval (0, 1).
  double uniform() {
    // 53-bit mantissa; +0.5 ulp offset keeps the draw strictly inside (0,1).
    return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
  }

  /// Standard normal via Box-Muller, one spare value cached.
  double normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    const double u1 = uniform();
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double a = 2.0 * std::numbers::pi * u2;
    spare_ = r * std::sin(a);
    has_spare_ = true;
    return r * std::cos(a);
  }

  /// Uniform integer in [0, n), n >= 1. Rejection-free Lemire reduction
  /// would bias by < 2^-64; the simple multiply-shift is fine here.
  uint64_t bounded(uint64_t n) {
    return static_cast<uint64_t>(
        (static_cast<unsigned __int128>(next_u64()) * n) >> 64);
  }

  /// Fisher-Yates permutation of {0, ..., n-1}.
  std::vector<std::size_t> permutation(std::size_t n) {
    std::vector<std::size_t> idx(n);
    for (std::size_t i = 0; i < n; ++i) idx[i] = i;
    for (std::size_t i = n; i > 1; --i) {
      std::size_t j = static_cast<std::size_t>(bounded(i));
      std::swap(idx[i - 1], idx[j]);
    }
    return idx;
  }

 private:
  static uint64_t rotl(uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

  uint64_t s_[4];
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace dendrostat
