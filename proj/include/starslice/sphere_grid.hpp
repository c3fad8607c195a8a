#pragma once

#include <cstdint>
#include <memory>
#include <vector>

#include <Eigen/Core>

namespace starslice {

// Symmetric direction grids backing RadialGrid bodies. Every node is paired
// with its antipode and the pair shares one stored value slot, so tabulated
// functions are even by construction.
//
// Interpolation rule by ambient dimension:
//   n == 2  uniform angular grid, piecewise-linear in the angle
//   n == 3  subdivided icosahedron, barycentric within the containing
//           spherical triangle (exact at nodes)
//   n >= 4  antipodally-paired random nodes, spherical-cap blend with
//           node-exact singular weights

enum class GridKind { Angular, Icosahedral, CapBlend };

enum class GridProvenance { Tabulated, SectionVolumes };

class SphereGrid {
 public:
  // n == 2: `resolution` = number of antipodal pairs (grid of 2*resolution
  // angles). n == 3: `resolution` = icosahedral subdivision frequency
  // (10*f^2 + 2 nodes). n >= 4: `resolution` = number of antipodal pairs,
  // nodes drawn from `seed`.
  static SphereGrid standard(int dim, int resolution, std::uint64_t seed = 0);

  // Defaults used by the intersection-body operator: 1024 pairs (n=2),
  // frequency 16 = 2562 nodes (n=3), 1000 pairs = 2000 nodes (n>=4).
  static SphereGrid standard_default(int dim, std::uint64_t seed = 0);

  int dim() const;
  GridKind kind() const;
  int resolution() const;
  std::uint64_t seed() const;

  // one representative direction per antipodal pair
  std::size_t pair_count() const;
  Eigen::VectorXd pair_direction(std::size_t pair) const;

  // weights over value slots for a unit direction; even in `d` and exact at
  // grid nodes
  double interpolate(const Eigen::Ref<const Eigen::VectorXd>& d,
                     const std::vector<double>& values) const;

  struct Impl;
  std::shared_ptr<const Impl> impl;
};

}  // namespace starslice
