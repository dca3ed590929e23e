#ifndef GCSR_RNG_HPP
#define GCSR_RNG_HPP

#include <cmath>
#include <cstdint>
#include <limits>

namespace gcsr {

// Splittable counter-based random generator. A stream is a 64-bit key; output
// i is a bijective hash of key + i * gamma (the SplitMix64 construction).
// split(child) derives an independent stream, so parallel tasks can draw
// without coordination and results do not depend on scheduling or worker
// count. Same seed, same draw order => bit-identical values.
class SplitRng {
 public:
  using result_type = std::uint64_t;

  explicit SplitRng(std::uint64_t seed) : state_(mix(seed + kSalt)) {}

  // Independent child stream addressed by an arbitrary 64-bit label.
  SplitRng split(std::uint64_t child) const {
    SplitRng r(0);
    r.state_ = mix(state_ + mix(child + kSplitSalt));
    r.have_cached_ = false;
    return r;
  }

  std::uint64_t operator()() { return next_u64(); }

  std::uint64_t next_u64() {
    state_ += kGamma;
    return mix(state_);
  }

  // Uniform on [0, 1), 53-bit resolution.
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  // Uniform on (0, 1]; safe inside logarithms.
  double uniform_pos() {
    return (static_cast<double>(next_u64() >> 11) + 1.0) * 0x1.0p-53;
  }

  // Standard normal via Box-Muller; the second value of each pair is cached.
  double gaussian() {
    if (have_cached_) {
      have_cached_ = false;
      return cached_;
    }
    const double u1 = uniform_pos();
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double a = 2.0 * kPi * u2;
    cached_ = r * std::sin(a);
    have_cached_ = true;
    return r * std::cos(a);
  }

  double chi2_1() {
    const double z = gaussian();
    return z * z;
  }

  static constexpr std::uint64_t min() { return 0; }
  static constexpr std::uint64_t max() {
    return std::numeric_limits<std::uint64_t>::max();
  }

 private:
  static constexpr std::uint64_t kGamma = 0x9e3779b97f4a7c15ull;
  static constexpr std::uint64_t kSalt = 0x8d2c9d5c1f0a3b7dull;
  static constexpr std::uint64_t kSplitSalt = 0xb5297a4d3f84d5b5ull;
  static constexpr double kPi = 3.14159265358979323846;

  static std::uint64_t mix(std::uint64_t z) {
    z ^= z >> 30;
    z *= 0xbf58476d1ce4e5b9ull;
    z ^= z >> 27;
    z *= 0x94d049bb133111ebull;
    z ^= z >> 31;
    return z;
  }

  std::uint64_t state_;
  double cached_ = 0.0;
  bool have_cached_ = false;
};

}  // namespace gcsr

#endif  // GCSR_RNG_HPP
