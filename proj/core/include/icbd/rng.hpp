#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <string_view>

namespace icbd {

namespace detail {

// SplitMix64 finalizer; used only for seeding.
inline std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

inline std::uint64_t fnv1a(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

inline std::uint64_t rotl(std::uint64_t x, int k) {
  return (x << k) | (x >> (64 - k));
}

}  // namespace detail

/// Counter-seeded random stream: the state is a pure function of
/// (master seed, phase tag, stream index), so trial i always sees the same
/// sequence no matter which worker thread evaluates it. The generator is
/// xoshiro256++ with SplitMix64 state expansion.
class StreamRng {
 public:
  StreamRng(std::uint64_t master_seed, std::string_view phase, std::uint64_t index) {
    std::uint64_t k = detail::mix64(master_seed ^ detail::fnv1a(phase));
    k = detail::mix64(k ^ index);
    for (auto& lane : state_) {
      k += 0x9e3779b97f4a7c15ULL;
      lane = detail::mix64(k);
    }
    state_[0] |= 1;  // xoshiro must not start from the all-zero state
  }

  std::uint64_t next_u64() {
    const std::uint64_t result = detail::rotl(state_[0] + state_[3], 23) + state_[0];
    const std::uint64_t t = state_[1] << 17;
    state_[2] ^= state_[0];
    state_[3] ^= state_[1];
    state_[1] ^= state_[2];
    state_[0] ^= state_[3];
    state_[2] ^= t;
    state_[3] = detail::rotl(state_[3], 45);
    return result;
  }

  /// Uniform in [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  /// Uniform in (0, 1]; safe as a logarithm argument.
  double uniform_pos() {
    return static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53;
  }

  /// Standard real normal N(0, 1), Box-Muller with one cached spare.
  double normal() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    const double r = std::sqrt(-2.0 * std::log(uniform_pos()));
    const double t = 2.0 * std::numbers::pi * uniform();
    spare_ = r * std::sin(t);
    have_spare_ = true;
    return r * std::cos(t);
  }

  /// Circular complex normal with unit total variance: real and imaginary
  /// parts are independent N(0, 1/2).
  std::complex<double> complex_normal() {
    const double r = std::sqrt(-std::log(uniform_pos()));
    const double t = 2.0 * std::numbers::pi * uniform();
    return {r * std::cos(t), r * std::sin(t)};
  }

 private:
  std::array<std::uint64_t, 4> state_{};
  double spare_ = 0.0;
  bool have_spare_ = false;
};

}  // namespace icbd
