#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "starslice/sphere_grid.hpp"

namespace starslice {

// A point of S^{n-1}, n >= 2. Validates unit norm to 1e-12 on construction.
class Direction {
 public:
  explicit Direction(Eigen::VectorXd coords);
  static Direction normalized(Eigen::VectorXd v);

  const Eigen::VectorXd& vec() const { return coords_; }
  int dim() const { return static_cast<int>(coords_.size()); }

 private:
  Eigen::VectorXd coords_;
};

// An (n-m)-dimensional linear subspace of R^n given by an orthonormal basis
// (n x (n-m) matrix, columns orthonormal to 1e-10).
class Subspace {
 public:
  Subspace(int ambient_dim, Eigen::MatrixXd basis);

  int ambient_dim() const { return ambient_dim_; }
  int dim() const { return static_cast<int>(basis_.cols()); }
  int codim() const { return ambient_dim_ - dim(); }
  const Eigen::MatrixXd& basis() const { return basis_; }

  // the line case: the spanning direction
  Direction spanning_direction() const;

 private:
  int ambient_dim_;
  Eigen::MatrixXd basis_;
};

// Orthonormal basis of the hyperplane orthogonal to xi (n x (n-1) matrix),
// built from a Householder reflection; deterministic in xi.
Subspace hyperplane_orthogonal_to(const Direction& xi);

// Orthonormal basis of the orthogonal complement of span(basis).
Eigen::MatrixXd orthogonal_complement(const Eigen::MatrixXd& basis);

enum class BodyFamily {
  EuclideanBall,
  LpBall,
  Ellipsoid,
  LinearImage,
  RadialGrid,
  Restriction,
};

// An origin-symmetric star body, evaluated through its Minkowski functional
// ||x||_K = min{a >= 0 : x in aK}. Values are immutable after construction
// and safe to share across threads.
class StarBody {
 public:
  static StarBody euclidean_ball(int n, double radius = 1.0);
  // p in (0, inf]; p = infinity gives the cube of half-side `scale`
  static StarBody lp_ball(int n, double p, double scale = 1.0);
  static StarBody cube(int n, double half_side = 1.0);
  // {x : x' M x <= 1} for positive-definite M
  static StarBody ellipsoid(Eigen::MatrixXd quadratic_form);
  // semi-axes a_i: M = diag(1/a_i^2)
  static StarBody ellipsoid_from_axes(const Eigen::VectorXd& axes);
  // T K for invertible T
  static StarBody linear_image(StarBody inner, Eigen::MatrixXd transform);
  // tabulated radial values on a symmetric grid (one value per antipodal pair)
  static StarBody radial_grid(SphereGrid grid, std::vector<double> values,
                              GridProvenance provenance = GridProvenance::Tabulated);

  int dim() const;
  BodyFamily family() const;
  std::string family_name() const;

  // family parameters (valid per family; see accessors' preconditions)
  double radius() const;                    // EuclideanBall
  double lp_exponent() const;               // LpBall; +inf for the max norm
  double lp_scale() const;                  // LpBall
  const Eigen::MatrixXd& quadratic_form() const;   // Ellipsoid
  const StarBody& inner() const;            // LinearImage / Restriction
  const Eigen::MatrixXd& transform() const; // LinearImage
  const Eigen::MatrixXd& restriction_basis() const;  // Restriction
  const SphereGrid& grid() const;           // RadialGrid
  const std::vector<double>& grid_values() const;    // RadialGrid
  GridProvenance grid_provenance() const;   // RadialGrid

  // t K, t > 0
  StarBody scaled(double t) const;

  struct Impl;
  std::shared_ptr<const Impl> impl;
};

/// Minkowski functional ||x||_K. Zero iff x = 0.
double minkowski(const StarBody& body, const Eigen::Ref<const Eigen::VectorXd>& x);

/// Radial function rho_K(d) = 1 / ||d||_K for unit d.
double radial(const StarBody& body, const Direction& d);

// internal fast path: caller guarantees |u| = 1
double radial_unit(const StarBody& body, const Eigen::Ref<const Eigen::VectorXd>& u);

/// The section K cap H as an (n-m)-dimensional star body: the Minkowski
/// functional of the result at y equals ||basis * y||_K.
StarBody subspace_restrict(const StarBody& body, const Subspace& h);

// sup over the sphere of rho_K (exact or a certified upper bound per family)
double radial_upper_bound(const StarBody& body);

// quadratic form M with ||x||_K = sqrt(x' M x), when the body is an
// ellipsoid in disguise (ball, lp(2), ellipsoid, their images/sections)
std::optional<Eigen::MatrixXd> to_quadratic_form(const StarBody& body);

}  // namespace starslice
