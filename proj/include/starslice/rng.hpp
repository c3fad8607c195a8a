#pragma once

#include <cmath>
#include <cstdint>

#include <Eigen/Core>

namespace starslice {

// Counting RNG scheme: every Monte Carlo sample owns a generator seeded from
// (seed, stream, sample index), so results do not depend on how samples are
// partitioned across threads.

inline std::uint64_t mix64(std::uint64_t z) {
  z += 0x9E3779B97F4A7C15ull;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream,
                                 std::uint64_t index = 0) {
  std::uint64_t h = mix64(seed ^ 0xD1B54A32D192ED03ull);
  h = mix64(h + 0x9E3779B97F4A7C15ull * (stream + 1));
  h = mix64(h + 0x9E3779B97F4A7C15ull * (index + 1));
  return h;
}

class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() {
    state_ += 0x9E3779B97F4A7C15ull;
    std::uint64_t z = state_;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
  }

  // uniform in [0, 1)
  double next_unit() { return (next() >> 11) * 0x1.0p-53; }

  // uniform in [lo, hi)
  double next_uniform(double lo, double hi) {
    return lo + (hi - lo) * next_unit();
  }

  // standard normal via Box-Muller; pairs are cached
  double next_gaussian() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    double u1 = 0.0;
    do {
      u1 = next_unit();
    } while (u1 <= 0.0);
    double u2 = next_unit();
    double r = std::sqrt(-2.0 * std::log(u1));
    double a = 6.283185307179586476925286766559 * u2;
    spare_ = r * std::sin(a);
    has_spare_ = true;
    return r * std::cos(a);
  }

  void fill_gaussian(Eigen::Ref<Eigen::VectorXd> v) {
    for (Eigen::Index i = 0; i < v.size(); ++i) v[i] = next_gaussian();
  }

 private:
  std::uint64_t state_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace starslice
