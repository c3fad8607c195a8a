#pragma once

#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "starslice/bodies.hpp"
#include "starslice/estimate.hpp"
#include "starslice/quadrature.hpp"

namespace starslice {

// A continuous even function on S^{n-1}.
class SphericalFunction {
 public:
  using Evaluator = std::function<double(const Eigen::VectorXd&)>;

  SphericalFunction(int dim, Evaluator eval, std::string descriptor = "custom");

  int dim() const { return dim_; }
  double operator()(const Eigen::VectorXd& u) const { return eval_(u); }
  const std::string& describe() const { return descriptor_; }

  static SphericalFunction one(int dim);
  static SphericalFunction constant(int dim, double c);
  static SphericalFunction coordinate_square(int dim, int index);
  // |<u, x>|^p
  static SphericalFunction abs_dot_power(Direction u, double p);
  // the radial function of a star body, as a sphere function
  static SphericalFunction radial_of(StarBody body);

 private:
  int dim_;
  Evaluator eval_;
  std::string descriptor_;
};

/// (n-m)-dimensional spherical Radon transform: the integral of g over
/// S^{n-1} cap H; for one-dimensional H returns g(theta) + g(-theta).
Estimate radon_transform(const SphericalFunction& g, const Subspace& h,
                         const QuadratureSpec& quad);

struct IntersectionBodyOptions {
  // grid resolution; 0 = the per-dimension default (1024 pairs for n = 2,
  // icosahedral frequency 16 for n = 3, 1000 antipodal pairs for n >= 4)
  int resolution = 0;
};

/// The intersection body of L: the star body K with rho_K(xi) = |L cap
/// xi-perp|, tabulated on a symmetric grid. Antipodal symmetry holds by
/// construction (one stored value per pair).
StarBody intersection_body_of(const StarBody& l, const QuadratureSpec& quad,
                              const IntersectionBodyOptions& options = {});

// A finite atomic Borel measure on the sphere.
struct AtomicSphericalMeasure {
  std::vector<std::pair<Direction, double>> atoms;

  void validate() const;
  int dim() const;
};

/// The L_p spherical-representation norm (sum_i w_i |<x, xi_i>|^p)^{1/p},
/// p > 0. Degenerate measures (atoms spanning a proper subspace) yield a
/// seminorm; the value is returned and the caller decides.
double levy_norm(const AtomicSphericalMeasure& mu, double p,
                 const Eigen::Ref<const Eigen::VectorXd>& x);

}  // namespace starslice
