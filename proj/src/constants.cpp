#include "starslice/constants.hpp"

#include <cmath>
#include <stdexcept>

namespace starslice {

namespace {
constexpr double kLogPi = 1.1447298858494001741434273513531;
}

double ball_volume(int n) {
  if (n < 0) throw std::invalid_argument("ball_volume: n must be >= 0");
  return std::exp(0.5 * n * kLogPi - std::lgamma(0.5 * n + 1.0));
}

double sphere_surface(int n) {
  if (n < 1) throw std::invalid_argument("sphere_surface: n must be >= 1");
  return std::exp(std::log(2.0) + 0.5 * n * kLogPi - std::lgamma(0.5 * n));
}

double c_nm(int n, int m) {
  if (n < 2) throw std::invalid_argument("c_nm: n must be >= 2");
  if (m < 1 || m > n - 1)
    throw std::invalid_argument("c_nm: m out of range [1, n-1]");
  double log_bn = 0.5 * n * kLogPi - std::lgamma(0.5 * n + 1.0);
  double log_bnm =
      0.5 * (n - m) * kLogPi - std::lgamma(0.5 * (n - m) + 1.0);
  return std::exp(static_cast<double>(n - m) / n * log_bn - log_bnm);
}

double lewis_bound(int n, double p) {
  if (!(p > 2.0)) throw std::invalid_argument("lewis_bound: requires p > 2");
  if (n < 1) throw std::invalid_argument("lewis_bound: n must be >= 1");
  return std::pow(static_cast<double>(n), 0.5 - 1.0 / p);
}

}  // namespace starslice
