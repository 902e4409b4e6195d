#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>

namespace qnopt {

/// SplitMix64 (Steele, Lea & Flood). 64-bit state advanced by the golden-ratio
/// increment and finalized with the MurmurHash3-style mixer:
///
///   state += 0x9e3779b97f4a7c15
///   z = (state ^ (state >> 30)) * 0xbf58476d1ce4e5b9
///   z = (z ^ (z >> 27)) * 0x94d049bb133111eb
///   return z ^ (z >> 31)
///
/// uniform01() keeps the top 53 bits: (next() >> 11) * 2^-53, in [0, 1).
/// normal() is Box-Muller using u1 = 1 - uniform01() (so u1 is in (0, 1]) and
/// u2 = uniform01(), returning sqrt(-2 ln u1) * cos(2 pi u2); the sine branch
/// is discarded so every draw consumes exactly two words.
/// Any language with 64-bit unsigned wraparound reproduces these streams.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  double uniform01() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

  double normal() {
    const double u1 = 1.0 - uniform01();
    const double u2 = uniform01();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
  }

 private:
  std::uint64_t state_;
};

}  // namespace qnopt
