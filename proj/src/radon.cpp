#include "starslice/radon.hpp"

#include <cmath>
#include <stdexcept>

#include "starslice/constants.hpp"
#include "starslice/parallel.hpp"
#include "starslice/rng.hpp"

namespace starslice {

SphericalFunction::SphericalFunction(int dim, Evaluator eval,
                                     std::string descriptor)
    : dim_(dim), eval_(std::move(eval)), descriptor_(std::move(descriptor)) {
  if (dim_ < 2)
    throw std::invalid_argument("SphericalFunction: dim must be >= 2");
  if (!eval_) throw std::invalid_argument("SphericalFunction: empty evaluator");
}

SphericalFunction SphericalFunction::one(int dim) { return constant(dim, 1.0); }

SphericalFunction SphericalFunction::constant(int dim, double c) {
  return SphericalFunction(
      dim, [c](const Eigen::VectorXd&) { return c; }, "constant");
}

SphericalFunction SphericalFunction::coordinate_square(int dim, int index) {
  if (index < 0 || index >= dim)
    throw std::invalid_argument("coordinate_square: index out of range");
  return SphericalFunction(
      dim, [index](const Eigen::VectorXd& u) { return u[index] * u[index]; },
      "coord_sq");
}

SphericalFunction SphericalFunction::abs_dot_power(Direction u, double p) {
  if (!(p > 0.0)) throw std::invalid_argument("abs_dot_power: p must be > 0");
  int dim = u.dim();
  Eigen::VectorXd v = u.vec();
  return SphericalFunction(
      dim,
      [v, p](const Eigen::VectorXd& x) {
        return std::pow(std::abs(v.dot(x)), p);
      },
      "abs_dot_pow");
}

SphericalFunction SphericalFunction::radial_of(StarBody body) {
  int dim = body.dim();
  return SphericalFunction(
      dim, [body](const Eigen::VectorXd& u) { return radial_unit(body, u); },
      "radial");
}

Estimate radon_transform(const SphericalFunction& g, const Subspace& h,
                         const QuadratureSpec& quad) {
  quad.validate();
  int n = h.ambient_dim();
  if (g.dim() != n)
    throw std::invalid_argument("radon_transform: dimension mismatch");
  const int k = h.dim();
  const Eigen::MatrixXd& basis = h.basis();
  if (k == 1) {
    Eigen::VectorXd theta = basis.col(0);
    double v = g(theta) + g(Eigen::VectorXd(-theta));
    return {v, 0.0, 0};
  }
  // integrate over the unit sphere of H by pushing uniform directions of
  // S^{k-1} through the basis
  double surf = sphere_surface(k);
  Estimate mean = [&] {
    MeanVar acc = chunked_reduce<MeanVar>(
        quad.sphere_samples, MeanVar{},
        [&](std::int64_t begin, std::int64_t end, MeanVar& mv) {
          Eigen::VectorXd y(k), x(n);
          for (std::int64_t i = begin; i < end; ++i) {
            SplitMix64 rng(derive_seed(quad.seed, 0x52AD, static_cast<std::uint64_t>(i)));
            double nrm = 0.0;
            do {
              rng.fill_gaussian(y);
              nrm = y.norm();
            } while (nrm < 1e-12);
            y /= nrm;
            x.noalias() = basis * y;
            mv.add(g(x));
          }
        },
        [](MeanVar& a, const MeanVar& b) { a.merge(b); });
    return Estimate{acc.mean(), acc.std_error(), quad.sphere_samples};
  }();
  return scaled(mean, surf);
}

StarBody intersection_body_of(const StarBody& l, const QuadratureSpec& quad,
                              const IntersectionBodyOptions& options) {
  quad.validate();
  int n = l.dim();
  if (n < 2)
    throw std::invalid_argument("intersection_body_of: dim must be >= 2");

  SphereGrid grid =
      options.resolution > 0
          ? SphereGrid::standard(n, options.resolution, derive_seed(quad.seed, 0x6D))
          : SphereGrid::standard_default(n, derive_seed(quad.seed, 0x6D));

  const std::size_t pairs = grid.pair_count();
  std::vector<double> values(pairs, 0.0);
  chunked_reduce<int>(
      static_cast<std::int64_t>(pairs), 0,
      [&](std::int64_t begin, std::int64_t end, int&) {
        for (std::int64_t i = begin; i < end; ++i) {
          Direction xi(grid.pair_direction(static_cast<std::size_t>(i)));
          Subspace perp = hyperplane_orthogonal_to(xi);
          Estimate e = section_volume(
              l, perp,
              quad.with_seed(derive_seed(quad.seed, 0x1B0D, static_cast<std::uint64_t>(i))));
          values[static_cast<std::size_t>(i)] = e.value;
        }
      },
      [](int&, const int&) {});

  return StarBody::radial_grid(std::move(grid), std::move(values),
                               GridProvenance::SectionVolumes);
}

void AtomicSphericalMeasure::validate() const {
  if (atoms.empty())
    throw std::invalid_argument("AtomicSphericalMeasure: no atoms");
  int n = atoms.front().first.dim();
  for (const auto& [dir, w] : atoms) {
    if (dir.dim() != n)
      throw std::invalid_argument("AtomicSphericalMeasure: mixed dimensions");
    if (!(w >= 0.0))
      throw std::invalid_argument("AtomicSphericalMeasure: negative weight");
  }
}

int AtomicSphericalMeasure::dim() const {
  if (atoms.empty())
    throw std::invalid_argument("AtomicSphericalMeasure: no atoms");
  return atoms.front().first.dim();
}

double levy_norm(const AtomicSphericalMeasure& mu, double p,
                 const Eigen::Ref<const Eigen::VectorXd>& x) {
  mu.validate();
  if (!(p > 0.0)) throw std::invalid_argument("levy_norm: p must be > 0");
  if (x.size() != mu.dim())
    throw std::invalid_argument("levy_norm: dimension mismatch");
  double acc = 0.0;
  for (const auto& [dir, w] : mu.atoms)
    acc += w * std::pow(std::abs(dir.vec().dot(x)), p);
  return std::pow(acc, 1.0 / p);
}

}  // namespace starslice
