#pragma once

#include <cmath>
#include <cstdint>
#include <utility>

namespace defectline {

/// xoshiro256++ (Blackman & Vigna), state seeded through SplitMix64.
/// The generator is fixed so that (n, sigma, seed) reproduces matrices
/// bit-identically; normals come from the polar-free Box-Muller transform
/// below, which consumes exactly two 64-bit draws per pair.
class Xoshiro256pp {
 public:
  explicit Xoshiro256pp(std::uint64_t seed) {
    std::uint64_t x = seed;
    for (auto& w : state_) w = splitmix64(x);
  }

  std::uint64_t next() {
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

  /// Uniform on (0, 1]; never returns 0 so it is safe under log().
  double uniform01() { return static_cast<double>((next() >> 11) + 1) * 0x1.0p-53; }

  /// Pair of independent standard normals (Box-Muller).
  std::pair<double, double> normal_pair() {
    const double u1 = uniform01();
    const double u2 = uniform01();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double a = 6.283185307179586476925286766559 * u2;
    return {r * std::cos(a), r * std::sin(a)};
  }

  static std::uint64_t splitmix64(std::uint64_t& x) {
    std::uint64_t z = (x += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  /// Documented seed mixing for ensemble work items: one independent stream
  /// per (base, sigma index, trial index).
  static std::uint64_t mix(std::uint64_t base, std::uint64_t a, std::uint64_t b) {
    std::uint64_t x = base ^ (0x9e3779b97f4a7c15ULL * (a + 1)) ^ (0xbf58476d1ce4e5b9ULL * (b + 1));
    (void)splitmix64(x);
    return splitmix64(x);
  }

 private:
  static std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }
  std::uint64_t state_[4];
};

}  // namespace defectline
