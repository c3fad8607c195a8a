#include <doctest.h>

#include <cmath>

#include "starslice/constants.hpp"
#include "starslice/quadrature.hpp"
#include "starslice/radon.hpp"
#include "starslice/rng.hpp"

using namespace starslice;
using Eigen::MatrixXd;
using Eigen::VectorXd;

namespace {

Subspace coordinate_subspace(int n, std::initializer_list<int> coords) {
  MatrixXd basis = MatrixXd::Zero(n, static_cast<Eigen::Index>(coords.size()));
  int col = 0;
  for (int c : coords) basis(c, col++) = 1.0;
  return Subspace(n, basis);
}

}  // namespace

TEST_CASE("radon transform of the constant function") {
  QuadratureSpec quad;
  quad.sphere_samples = 50000;
  quad.seed = 3;

  // m = 1 at n = 3: circumference of the unit circle (exact: zero variance)
  Estimate circle = radon_transform(SphericalFunction::one(3),
                                    coordinate_subspace(3, {0, 1}), quad);
  CHECK(circle.value == doctest::Approx(2.0 * M_PI).epsilon(1e-12));

  // general codimension: surface area of S^{n-m-1}
  Estimate s2 = radon_transform(SphericalFunction::one(4),
                                coordinate_subspace(4, {0, 1, 2}), quad);
  CHECK(s2.value == doctest::Approx(4.0 * M_PI).epsilon(1e-12));

  // one-dimensional H: g(theta) + g(-theta)
  Estimate pair = radon_transform(SphericalFunction::one(5),
                                  coordinate_subspace(5, {2}), quad);
  CHECK(pair.value == doctest::Approx(2.0));
  CHECK(pair.std_error == 0.0);
}

TEST_CASE("radon transform of coordinate squares") {
  QuadratureSpec quad;
  quad.sphere_samples = 200000;
  quad.seed = 9;
  // 1-dim oracle: int_0^{2pi} cos^2 = pi, by trapezoid
  double oracle = 0.0;
  const int steps = 200000;
  for (int i = 0; i < steps; ++i) {
    double a = 2.0 * M_PI * i / steps;
    oracle += std::cos(a) * std::cos(a);
  }
  oracle *= 2.0 * M_PI / steps;
  CHECK(oracle == doctest::Approx(M_PI).epsilon(1e-9));

  Estimate est = radon_transform(SphericalFunction::coordinate_square(3, 0),
                                 coordinate_subspace(3, {0, 1}), quad);
  CHECK(std::abs(est.value - oracle) <= 4.0 * est.std_error);
}

TEST_CASE("radon linearity and positivity") {
  QuadratureSpec quad;
  quad.sphere_samples = 20000;

  SplitMix64 rng(123);
  for (int trial = 0; trial < 25; ++trial) {
    int n = 3 + trial % 2;
    int m = 1 + trial % 2;
    if (m > n - 1) m = 1;
    Subspace h = haar_subspace(n, m, 1, derive_seed(77, 0, trial)).front();

    VectorXd u(n), w(n);
    rng.fill_gaussian(u);
    rng.fill_gaussian(w);
    u.normalize();
    w.normalize();
    double p = 1.0 + 2.0 * rng.next_unit();
    SphericalFunction g = SphericalFunction::abs_dot_power(Direction(u), p);
    SphericalFunction hfun = SphericalFunction::coordinate_square(n, trial % n);
    double a = 2.0 * rng.next_gaussian();
    double b = 2.0 * rng.next_gaussian();
    SphericalFunction combo(
        n,
        [=](const VectorXd& x) { return a * g(x) + b * hfun(x); },
        "combo");

    quad.seed = derive_seed(500, 1, trial);
    Estimate lhs = radon_transform(combo, h, quad);
    Estimate rg = radon_transform(g, h, quad);
    Estimate rh = radon_transform(hfun, h, quad);
    // same seed, same direction stream: linearity is exact per sample
    CHECK(lhs.value ==
          doctest::Approx(a * rg.value + b * rh.value).epsilon(1e-10));

    // positivity: non-negative integrands keep non-negative estimates
    CHECK(rg.value >= -4.0 * rg.std_error);
    CHECK(rg.value >= 0.0);
  }
}

TEST_CASE("intersection body of euclidean balls") {
  QuadratureSpec quad;
  quad.sphere_samples = 256;
  quad.seed = 2;

  StarBody k = intersection_body_of(StarBody::euclidean_ball(3), quad,
                                    IntersectionBodyOptions{8});
  CHECK(k.family() == BodyFamily::RadialGrid);
  CHECK(k.grid_provenance() == GridProvenance::SectionVolumes);
  for (double v : k.grid_values())
    CHECK(v == doctest::Approx(M_PI).epsilon(1e-12));

  // scaling of the source scales sections by r^2
  StarBody k2 = intersection_body_of(StarBody::euclidean_ball(3, 2.0), quad,
                                     IntersectionBodyOptions{8});
  for (double v : k2.grid_values())
    CHECK(v == doctest::Approx(4.0 * M_PI).epsilon(1e-12));

  // evenness by construction
  SplitMix64 rng(6);
  for (int trial = 0; trial < 50; ++trial) {
    VectorXd d(3);
    rng.fill_gaussian(d);
    d.normalize();
    CHECK(radial_unit(k, d) == radial_unit(k, -d));
  }
}

TEST_CASE("intersection body in dimension 4") {
  QuadratureSpec quad;
  quad.sphere_samples = 2048;
  quad.seed = 44;
  StarBody k = intersection_body_of(StarBody::lp_ball(4, 1.0), quad,
                                    IntersectionBodyOptions{128});
  CHECK(k.dim() == 4);
  CHECK(k.grid().kind() == GridKind::CapBlend);
  // every section of B_1^4 lies between the inscribed and circumscribed balls
  double lo = *closed_form_volume(StarBody::euclidean_ball(3, 1.0 / std::sqrt(3.0)));
  double hi = *closed_form_volume(StarBody::euclidean_ball(3, 1.0));
  for (double v : k.grid_values()) {
    CHECK(v >= lo * 0.8);
    CHECK(v <= hi * 1.2);
  }
  // node exactness of the cap-blend interpolation
  const auto& grid = k.grid();
  for (std::size_t i = 0; i < grid.pair_count(); i += 31)
    CHECK(radial_unit(k, grid.pair_direction(i)) ==
          doctest::Approx(k.grid_values()[i]).epsilon(1e-12));
}

TEST_CASE("levy norm") {
  AtomicSphericalMeasure basis2;
  basis2.atoms.emplace_back(Direction(Eigen::Vector2d(1, 0)), 1.0);
  basis2.atoms.emplace_back(Direction(Eigen::Vector2d(0, 1)), 1.0);

  Eigen::Vector2d x(1, 2);
  CHECK(levy_norm(basis2, 1.0, x) == doctest::Approx(3.0));
  Eigen::Vector2d y(3, 4);
  CHECK(levy_norm(basis2, 2.0, y) == doctest::Approx(5.0));

  // degenerate measure: a seminorm
  AtomicSphericalMeasure single;
  single.atoms.emplace_back(Direction(Eigen::Vector2d(1, 0)), 1.0);
  CHECK(levy_norm(single, 1.0, x) == doctest::Approx(1.0));
  CHECK(levy_norm(single, 1.0, Eigen::Vector2d(0, 5)) == doctest::Approx(0.0));

  // homogeneity
  SplitMix64 rng(8);
  for (int trial = 0; trial < 50; ++trial) {
    Eigen::VectorXd z(2);
    rng.fill_gaussian(z);
    double t = 5.0 * rng.next_gaussian();
    double p = 0.5 + 3.0 * rng.next_unit();
    CHECK(std::abs(levy_norm(basis2, p, t * z) -
                   std::abs(t) * levy_norm(basis2, p, z)) <=
          1e-12 * (1.0 + std::abs(t) * levy_norm(basis2, p, z)));
  }

  AtomicSphericalMeasure empty;
  CHECK_THROWS_AS(levy_norm(empty, 1.0, x), std::invalid_argument);
  CHECK_THROWS_AS(levy_norm(basis2, 0.0, x), std::invalid_argument);
  CHECK_THROWS_AS(levy_norm(basis2, -0.5, x), std::invalid_argument);
}
