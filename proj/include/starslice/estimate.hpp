#pragma once

#include <cmath>
#include <cstdint>

namespace starslice {

// A numerical estimate with a one-sigma error bar. std_error == 0 marks
// closed-form or deterministic-grid paths.
struct Estimate {
  double value = 0.0;
  double std_error = 0.0;
  std::int64_t samples_used = 0;
};

inline Estimate scaled(const Estimate& e, double c) {
  return {c * e.value, std::abs(c) * e.std_error, e.samples_used};
}

// Delta-method propagation through x -> x^alpha.
inline Estimate pow_estimate(const Estimate& e, double alpha) {
  double v = std::pow(e.value, alpha);
  double sigma = e.value > 0.0
                     ? std::abs(alpha) * v / e.value * e.std_error
                     : 0.0;
  return {v, sigma, e.samples_used};
}

// Product of two independent estimates; relative errors add in quadrature.
inline Estimate product(const Estimate& a, const Estimate& b) {
  double v = a.value * b.value;
  double ra = a.value != 0.0 ? a.std_error / std::abs(a.value) : 0.0;
  double rb = b.value != 0.0 ? b.std_error / std::abs(b.value) : 0.0;
  double sigma = std::abs(v) * std::sqrt(ra * ra + rb * rb);
  return {v, sigma, a.samples_used + b.samples_used};
}

inline double combined_sigma(const Estimate& a, const Estimate& b) {
  return std::sqrt(a.std_error * a.std_error + b.std_error * b.std_error);
}

}  // namespace starslice
