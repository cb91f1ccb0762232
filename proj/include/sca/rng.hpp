#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <random>

namespace sca {

// Deterministic sampling built on mt19937_64, whose output sequence is
// bit-specified by the standard. The distribution transforms are written out
// here because std::normal_distribution and friends are implementation
// defined, which would break the "same seed, same bytes" contract across
// toolchains.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : eng_(seed) {}

  // uniform on [0,1), 53-bit resolution
  double uniform() { return static_cast<double>(eng_() >> 11) * kInv53; }

  // uniform on (0,1); never 0, safe under log
  double uniform_open() {
    return (static_cast<double>(eng_() >> 11) + 0.5) * kInv53;
  }

  // standard normal, Box-Muller; consumes two draws per call
  double normal() {
    const double u1 = uniform_open();
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(kTwoPi * u2);
  }

  // exponential with the given mean, inverse CDF
  double exponential(double mean) { return -mean * std::log(uniform_open()); }

  // unbiased integer in [0,n)
  std::uint64_t index(std::uint64_t n) {
    const std::uint64_t max = std::numeric_limits<std::uint64_t>::max();
    const std::uint64_t limit = max - max % n;
    std::uint64_t r = eng_();
    while (r >= limit) r = eng_();
    return r % n;
  }

 private:
  static constexpr double kInv53 = 1.0 / 9007199254740992.0;  // 2^-53
  static constexpr double kTwoPi = 6.283185307179586476925287;
  std::mt19937_64 eng_;
};

// SplitMix64-style mixer; derives independent child stream seeds from a base
// seed and up to two stream indices (replicate number, grid index, ...).
inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t a,
                                 std::uint64_t b = 0) {
  std::uint64_t z = base + 0x9e3779b97f4a7c15ULL * (a + 1) +
                    0xbf58476d1ce4e5b9ULL * (b + 1);
  z ^= z >> 30;
  z *= 0xbf58476d1ce4e5b9ULL;
  z ^= z >> 27;
  z *= 0x94d049bb133111ebULL;
  z ^= z >> 31;
  return z;
}

}  // namespace sca
