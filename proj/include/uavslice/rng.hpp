#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>

namespace uavslice {

// Seeded generator with portable distribution mappings. The std:: distributions
// are implementation-defined, so uniform/normal draws are derived here from the
// raw mt19937_64 stream to keep results identical across standard libraries.
class Rng {
 public:
  using result_type = std::uint64_t;

  explicit Rng(std::uint64_t seed = 0) : engine_(seed), seed_(seed) {}

  std::uint64_t seed() const { return seed_; }

  std::uint64_t next_u64() { return engine_(); }

  // Uniform in [0, 1) with 53 bits of resolution.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Uniform integer in [0, n). Rejection sampling removes modulo bias.
  std::size_t uniform_index(std::size_t n) {
    if (n <= 1) return 0;
    const std::uint64_t bound = static_cast<std::uint64_t>(n);
    const std::uint64_t limit = (~std::uint64_t{0}) - ((~std::uint64_t{0}) % bound);
    std::uint64_t x = engine_();
    while (x >= limit) x = engine_();
    return static_cast<std::size_t>(x % bound);
  }

  // Standard normal via Box-Muller; both variates of a pair are consumed.
  double normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    double u1 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double theta = 2.0 * std::numbers::pi * u2;
    spare_ = r * std::sin(theta);
    has_spare_ = true;
    return r * std::cos(theta);
  }

  // Independent child stream identified by `stream`.
  Rng fork(std::uint64_t stream) const { return Rng(mix(seed_ ^ mix(stream + 0x9e3779b97f4a7c15ULL))); }

  static std::uint64_t mix(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

 private:
  std::mt19937_64 engine_;
  std::uint64_t seed_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

// Named sub-streams so that, e.g., evaluation worlds do not depend on which
// policy consumed the policy stream.
namespace streams {
inline constexpr std::uint64_t kTrainWorld = 1;
inline constexpr std::uint64_t kTrainPolicy = 2;
inline constexpr std::uint64_t kEvalWorld = 3;
inline constexpr std::uint64_t kEvalPolicy = 4;
inline constexpr std::uint64_t kInit = 5;
}  // namespace streams

}  // namespace uavslice
