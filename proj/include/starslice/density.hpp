#pragma once

#include <memory>
#include <string>

#include <Eigen/Core>

namespace starslice {

// An even, continuous, non-negative density on R^n. Restricted to a closed
// family so evenness and continuity hold by construction:
//   constant(c)                    f(x) = c
//   gaussian(sigma)                f(x) = (2 pi sigma^2)^{-n/2} exp(-|x|^2 / 2 sigma^2)
//   generalized_gaussian(q, s)     f(x) = exp(-(|x|_q / s)^q)
//   product(a, b)                  f = a * b
enum class DensityKind { Constant, Gaussian, GeneralizedGaussian, Product };

class DensitySpec {
 public:
  static DensitySpec constant(int n, double c);
  static DensitySpec gaussian(int n, double sigma);
  static DensitySpec generalized_gaussian(int n, double q, double s);
  static DensitySpec product(DensitySpec a, DensitySpec b);

  int dim() const;
  double operator()(const Eigen::Ref<const Eigen::VectorXd>& x) const;

  // f depends on |x|_2 only
  bool is_radial() const;
  double radial_value(double r) const;  // requires is_radial()

  bool is_constant() const;
  double constant_value() const;  // requires is_constant()

  DensityKind kind() const;
  double sigma() const;               // Gaussian
  double gg_exponent() const;         // GeneralizedGaussian q
  double gg_scale() const;            // GeneralizedGaussian s
  const DensitySpec& factor_a() const;  // Product
  const DensitySpec& factor_b() const;  // Product

  std::string describe() const;

  struct Impl;
  std::shared_ptr<const Impl> impl;
};

}  // namespace starslice
