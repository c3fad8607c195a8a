#include <doctest.h>

#include <cmath>
#include <limits>

#include "starslice/constants.hpp"
#include "starslice/parallel.hpp"
#include "starslice/quadrature.hpp"
#include "starslice/rng.hpp"

using namespace starslice;
using Eigen::MatrixXd;
using Eigen::VectorXd;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// independent high-resolution radial oracle (composite Simpson), used to
// freeze the Gaussian-measure expectations
double simpson(double a, double b, int intervals, double (*f)(double)) {
  double h = (b - a) / intervals;
  double acc = f(a) + f(b);
  for (int i = 1; i < intervals; ++i)
    acc += f(a + i * h) * (i % 2 == 1 ? 4.0 : 2.0);
  return acc * h / 3.0;
}

double gauss3_radial(double r) {
  return r * r * std::exp(-0.5 * r * r);
}
double gauss2_radial(double r) { return r * std::exp(-0.5 * r * r); }
double gauss1_radial(double r) { return std::exp(-0.5 * r * r); }

Subspace coordinate_subspace(int n, std::initializer_list<int> coords) {
  MatrixXd basis = MatrixXd::Zero(n, static_cast<Eigen::Index>(coords.size()));
  int col = 0;
  for (int c : coords) basis(c, col++) = 1.0;
  return Subspace(n, basis);
}

QuadratureSpec quick(std::int64_t samples, std::uint64_t seed) {
  QuadratureSpec q;
  q.sphere_samples = samples;
  q.seed = seed;
  q.subspace_samples = 32;
  q.refine_steps = 12;
  return q;
}

}  // namespace

TEST_CASE("sphere_sample basics") {
  auto dirs = sphere_sample(3, 2, 7);
  REQUIRE(dirs.size() == 2);
  for (const auto& d : dirs) CHECK(std::abs(d.vec().norm() - 1.0) <= 1e-12);

  auto again = sphere_sample(3, 2, 7);
  CHECK(dirs[0].vec() == again[0].vec());
  CHECK(dirs[1].vec() == again[1].vec());

  CHECK_THROWS_AS(sphere_sample(1, 2, 7), std::invalid_argument);

  // antithetic pairing: odd samples mirror their predecessor
  auto anti = sphere_sample(4, 6, 11, Estimator::StratifiedAntithetic);
  for (int i = 0; i + 1 < 6; i += 2)
    CHECK(anti[i].vec() == -anti[i + 1].vec());
}

TEST_CASE("sphere_sample coordinate means vanish") {
  const int n = 4;
  const std::int64_t count = 100000;
  auto dirs = sphere_sample(n, count, 2024);
  VectorXd mean = VectorXd::Zero(n);
  for (const auto& d : dirs) mean += d.vec();
  mean /= static_cast<double>(count);
  // per-coordinate variance is 1/n
  double se = std::sqrt(1.0 / n / static_cast<double>(count));
  for (int i = 0; i < n; ++i) CHECK(std::abs(mean[i]) <= 4.0 * se);
}

TEST_CASE("haar_subspace orthonormality and invariance") {
  auto subs = haar_subspace(3, 1, 1, 5);
  REQUIRE(subs.size() == 1);
  CHECK((subs[0].basis().transpose() * subs[0].basis() -
         MatrixXd::Identity(2, 2))
            .norm() <= 1e-10);

  CHECK_THROWS_AS(haar_subspace(3, 3, 1, 5), std::invalid_argument);
  CHECK_THROWS_AS(haar_subspace(3, 0, 1, 5), std::invalid_argument);

  // |P_H e1|^2 has mean (n-m)/n under the Haar measure
  const int n = 3, m = 1;
  const std::int64_t count = 100000;
  auto sample = haar_subspace(n, m, count, 99);
  double sum = 0.0, sum_sq = 0.0;
  for (const auto& h : sample) {
    double v = h.basis().row(0).squaredNorm();
    sum += v;
    sum_sq += v * v;
  }
  double mean = sum / count;
  double var = (sum_sq - count * mean * mean) / (count - 1);
  double se = std::sqrt(var / count);
  CHECK(std::abs(mean - double(n - m) / n) <= 4.0 * se);

  // n=2, m=1: lines spanned by unit directions
  auto lines = haar_subspace(2, 1, 3, 17);
  for (const auto& line : lines)
    CHECK(std::abs(line.basis().col(0).norm() - 1.0) <= 1e-12);
}

TEST_CASE("closed-form volumes") {
  QuadratureSpec quad;
  CHECK(volume(StarBody::euclidean_ball(3), quad).value ==
        doctest::Approx(4.18879020478639098).epsilon(1e-13));
  CHECK(volume(StarBody::lp_ball(3, 1.0), quad).value ==
        doctest::Approx(8.0 / 6.0).epsilon(1e-13));
  CHECK(volume(StarBody::cube(3), quad).value == doctest::Approx(8.0));
  CHECK(volume(StarBody::lp_ball(4, 1.0), quad).value ==
        doctest::Approx(2.0 / 3.0).epsilon(1e-13));
  CHECK(volume(StarBody::lp_ball(3, 4.0), quad).value ==
        doctest::Approx(6.48198735178638202).epsilon(1e-12));

  Eigen::VectorXd axes(3);
  axes << 1, 2, 3;
  CHECK(volume(StarBody::ellipsoid_from_axes(axes), quad).value ==
        doctest::Approx(6.0 * 4.18879020478639098).epsilon(1e-12));

  // |T K| = |det T| |K|
  MatrixXd t(2, 2);
  t << 2, 1, 0, 3;
  CHECK(volume(StarBody::linear_image(StarBody::cube(2), t), quad).value ==
        doctest::Approx(24.0).epsilon(1e-12));

  // closed paths report zero error
  CHECK(volume(StarBody::lp_ball(5, 0.5), quad).std_error == 0.0);
  CHECK(volume(StarBody::lp_ball(5, 0.5), quad).value ==
        doctest::Approx(2.82186948853615520e-4).epsilon(1e-12));
}

TEST_CASE("Monte Carlo volume agrees with closed forms") {
  // a coordinate restriction of the (n+1)-dim lp ball is exactly the n-dim
  // one, but evaluated through the generic Monte Carlo path
  for (double p : {1.0, 1.5, kInf}) {
    StarBody big = StarBody::lp_ball(4, p);
    StarBody restricted = subspace_restrict(big, coordinate_subspace(4, {0, 1, 2}));
    CHECK(restricted.family() == BodyFamily::Restriction);
    Estimate est = volume(restricted, quick(200000, 42));
    double exact = *closed_form_volume(StarBody::lp_ball(3, p));
    CHECK(est.std_error > 0.0);
    CHECK(std::abs(est.value - exact) <= 4.0 * est.std_error);
  }
}

TEST_CASE("volume determinism and thread invariance") {
  StarBody body = subspace_restrict(StarBody::lp_ball(4, 1.5),
                                    coordinate_subspace(4, {0, 1, 2}));
  set_thread_count(1);
  Estimate a = volume(body, quick(100000, 9));
  set_thread_count(2);
  Estimate b = volume(body, quick(100000, 9));
  set_thread_count(0);
  CHECK(a.value == b.value);
  CHECK(a.std_error == b.std_error);

  Estimate c = volume(body, quick(100000, 10));
  CHECK(a.value != c.value);  // different seed, different stream
}

TEST_CASE("antithetic estimator pairs directions") {
  StarBody body = subspace_restrict(StarBody::lp_ball(4, 1.0),
                                    coordinate_subspace(4, {0, 1, 2}));
  QuadratureSpec quad = quick(100000, 4);
  quad.estimator = Estimator::StratifiedAntithetic;
  Estimate est = volume(body, quad);
  double exact = 8.0 / 6.0;
  CHECK(std::abs(est.value - exact) <= 4.0 * est.std_error);
}

TEST_CASE("volume scaling") {
  QuadratureSpec quad;
  // closed path: relative 1e-9
  StarBody k = StarBody::lp_ball(3, 1.5);
  double v1 = volume(k, quad).value;
  double v2 = volume(k.scaled(2.0), quad).value;
  CHECK(std::abs(v2 - 8.0 * v1) <= 1e-9 * v2);

  // Monte Carlo path: scaling is exact per sample with a shared seed
  StarBody r = subspace_restrict(StarBody::lp_ball(4, 1.5),
                                 coordinate_subspace(4, {0, 1, 2}));
  QuadratureSpec q = quick(20000, 3);
  double m1 = volume(r, q).value;
  double m2 = volume(r.scaled(2.0), q).value;
  CHECK(std::abs(m2 - 8.0 * m1) <= 1e-12 * m2);
}

TEST_CASE("containment monotonicity of volumes") {
  // rho_{B_1} <= rho_{B_1.5} pointwise, so the volumes must be ordered
  StarBody small = subspace_restrict(StarBody::lp_ball(4, 1.0),
                                     coordinate_subspace(4, {0, 1, 2}));
  StarBody large = subspace_restrict(StarBody::lp_ball(4, 1.5),
                                     coordinate_subspace(4, {0, 1, 2}));
  Estimate vs = volume(small, quick(50000, 8));
  Estimate vl = volume(large, quick(50000, 8));
  CHECK(vs.value <= vl.value + 4.0 * combined_sigma(vs, vl));
}

TEST_CASE("section volumes") {
  QuadratureSpec quad = quick(100000, 21);
  // ball sections are closed-form disks
  Estimate disk = section_volume(StarBody::euclidean_ball(3),
                                 coordinate_subspace(3, {0, 2}), quad);
  CHECK(disk.value == doctest::Approx(M_PI).epsilon(1e-13));
  CHECK(disk.std_error == 0.0);

  // coordinate section of the cross-polytope: area 2, Monte Carlo path,
  // cross-checked by the independent rejection oracle
  StarBody cross = StarBody::lp_ball(3, 1.0);
  Subspace h = coordinate_subspace(3, {0, 1});
  Estimate sec = section_volume(cross, h, quad);
  CHECK(std::abs(sec.value - 2.0) <= 4.0 * sec.std_error);
  StarBody restricted = subspace_restrict(cross, h);
  Estimate oracle = rejection_volume_oracle(
      restricted, DensitySpec::constant(2, 1.0), 200000, 77);
  CHECK(std::abs(sec.value - oracle.value) <=
        4.0 * combined_sigma(sec, oracle));

  // chords are deterministic
  MatrixXd line(3, 1);
  line << 1.0 / std::sqrt(3.0), 1.0 / std::sqrt(3.0), 1.0 / std::sqrt(3.0);
  Estimate chord = section_volume(StarBody::cube(3), Subspace(3, line), quad);
  CHECK(chord.value == doctest::Approx(2.0 * std::sqrt(3.0)).epsilon(1e-12));
  CHECK(chord.std_error == 0.0);
}

TEST_CASE("measure of body") {
  QuadratureSpec quad;
  quad.seed = 5;

  // constant density reduces to volume
  Estimate v = measure_of_body(StarBody::lp_ball(3, 1.0),
                               DensitySpec::constant(3, 2.0), quad);
  CHECK(v.value == doctest::Approx(2.0 * 8.0 / 6.0).epsilon(1e-13));

  // standard Gaussian mass of the unit ball = P(chi^2_3 <= 1)
  double oracle3 = simpson(0.0, 1.0, 4000, gauss3_radial) * sphere_surface(3) *
                   std::pow(2.0 * M_PI, -1.5);
  CHECK(oracle3 == doctest::Approx(0.19874804309879920).epsilon(1e-10));
  Estimate g = measure_of_body(StarBody::euclidean_ball(3),
                               DensitySpec::gaussian(3, 1.0), quad);
  CHECK(g.std_error == 0.0);
  CHECK(g.value == doctest::Approx(oracle3).epsilon(1e-9));

  // shrinking ball: mass goes to zero
  Estimate tiny = measure_of_body(StarBody::euclidean_ball(3, 1e-4),
                                  DensitySpec::gaussian(3, 1.0), quad);
  CHECK(tiny.value <= 1e-10);

  // generic path against the rejection oracle
  StarBody cross = StarBody::lp_ball(3, 1.0);
  DensitySpec gauss = DensitySpec::gaussian(3, 1.0);
  Estimate mc = measure_of_body(cross, gauss, quick(200000, 6));
  Estimate oracle = rejection_volume_oracle(cross, gauss, 400000, 16);
  CHECK(std::abs(mc.value - oracle.value) <= 4.0 * combined_sigma(mc, oracle));
}

TEST_CASE("measure of section") {
  QuadratureSpec quad;
  quad.seed = 12;
  StarBody ball = StarBody::euclidean_ball(3);
  DensitySpec gauss = DensitySpec::gaussian(3, 1.0);

  // planar section through the standard Gaussian: closed radial integral
  double oracle2 = simpson(0.0, 1.0, 4000, gauss2_radial) * sphere_surface(2) *
                   std::pow(2.0 * M_PI, -1.5);
  CHECK(oracle2 == doctest::Approx(0.15697155588228933).epsilon(1e-10));
  Estimate sec =
      measure_of_section(ball, coordinate_subspace(3, {0, 1}), gauss, quad);
  CHECK(sec.std_error == 0.0);
  CHECK(sec.value == doctest::Approx(oracle2).epsilon(1e-9));

  // constant density reduces to the section volume
  Estimate sv = measure_of_section(ball, coordinate_subspace(3, {0, 1}),
                                   DensitySpec::constant(3, 1.0), quad);
  CHECK(sv.value == doctest::Approx(M_PI).epsilon(1e-13));

  // one-dimensional section: 2 int_0^1 f dt with the ambient normalization
  double oracle1 = 2.0 * simpson(0.0, 1.0, 4000, gauss1_radial) *
                   std::pow(2.0 * M_PI, -1.5);
  CHECK(oracle1 == doctest::Approx(0.10865340727051283).epsilon(1e-10));
  Estimate line =
      measure_of_section(ball, coordinate_subspace(3, {2}), gauss, quad);
  CHECK(line.value == doctest::Approx(oracle1).epsilon(1e-9));
  CHECK(line.std_error == 0.0);

  // generic Monte Carlo path: lp section with an off-axis subspace
  MatrixXd basis(3, 2);
  double s = 1.0 / std::sqrt(2.0);
  basis << s, 0, s, 0, 0, 1;
  Estimate mc = measure_of_section(StarBody::lp_ball(3, 1.0), Subspace(3, basis),
                                   gauss, quick(200000, 3));
  StarBody restricted =
      subspace_restrict(StarBody::lp_ball(3, 1.0), Subspace(3, basis));
  // oracle: rejection in the section plane with the pushed-forward density
  double radius = radial_upper_bound(restricted);
  SplitMix64 rng(404);
  double acc = 0.0, acc_sq = 0.0;
  const int count = 400000;
  for (int i = 0; i < count; ++i) {
    Eigen::Vector2d y(rng.next_uniform(-radius, radius),
                      rng.next_uniform(-radius, radius));
    double val = 0.0;
    if (minkowski(restricted, y) <= 1.0) val = gauss(basis * y);
    acc += val;
    acc_sq += val * val;
  }
  double box = 4.0 * radius * radius;
  double mean = acc / count;
  double oracle_val = box * mean;
  double oracle_se =
      box * std::sqrt((acc_sq / count - mean * mean) / (count - 1));
  CHECK(std::abs(mc.value - oracle_val) <=
        4.0 * std::sqrt(mc.std_error * mc.std_error + oracle_se * oracle_se));
}

TEST_CASE("rotation invariance of ball measures") {
  // a rotated ball goes through the generic Monte Carlo path and must agree
  // with the closed rotation-invariant value
  MatrixXd rot(3, 3);
  double c = std::cos(0.7), s = std::sin(0.7);
  rot << c, -s, 0, s, c, 0, 0, 0, 1;
  MatrixXd rot2(3, 3);
  c = std::cos(-0.4);
  s = std::sin(-0.4);
  rot2 << 1, 0, 0, 0, c, -s, 0, s, c;
  StarBody rotated =
      StarBody::linear_image(StarBody::euclidean_ball(3), rot2 * rot);
  DensitySpec gauss = DensitySpec::gaussian(3, 1.0);
  QuadratureSpec quad = quick(200000, 31);
  Estimate mc = measure_of_body(rotated, gauss, quad);
  Estimate exact = measure_of_body(StarBody::euclidean_ball(3), gauss, quad);
  CHECK(exact.std_error == 0.0);
  CHECK(std::abs(mc.value - exact.value) <= 4.0 * mc.std_error);
}

TEST_CASE("max_section") {
  QuadratureSpec quad;
  quad.seed = 8;
  quad.subspace_samples = 64;
  quad.refine_steps = 40;

  // rotation invariance: every codim-m section of the ball is a unit ball
  MaxSectionResult ball_max =
      max_section(StarBody::euclidean_ball(3), DensitySpec::constant(3, 1.0),
                  1, quad);
  CHECK(ball_max.estimate.value == doctest::Approx(M_PI).epsilon(1e-12));
  MaxSectionResult ball_max2 =
      max_section(StarBody::euclidean_ball(4), DensitySpec::constant(4, 1.0),
                  2, quad);
  CHECK(ball_max2.estimate.value == doctest::Approx(M_PI).epsilon(1e-12));

  // square: the maximal chord is the diagonal, via a dense angular oracle
  double oracle = 0.0;
  for (int i = 0; i < 100000; ++i) {
    double a = M_PI * i / 100000.0;
    Eigen::Vector2d d(std::cos(a), std::sin(a));
    oracle = std::max(oracle, 2.0 * radial_unit(StarBody::cube(2), d));
  }
  CHECK(oracle == doctest::Approx(2.0 * std::sqrt(2.0)).epsilon(1e-8));
  MaxSectionResult chord =
      max_section(StarBody::cube(2), DensitySpec::constant(2, 1.0), 1, quad);
  CHECK(chord.estimate.value <= oracle + 1e-12);
  CHECK(chord.estimate.value >= oracle * (1.0 - 5e-3));

  // determinism + monotonicity of the refinement
  MaxSectionResult again =
      max_section(StarBody::cube(2), DensitySpec::constant(2, 1.0), 1, quad);
  CHECK(again.estimate.value == chord.estimate.value);
  CHECK(again.subspace.basis() == chord.subspace.basis());
  CHECK(chord.estimate.value >= chord.best_sampled.value);

  CHECK_THROWS_AS(
      max_section(StarBody::cube(2), DensitySpec::constant(2, 1.0), 2, quad),
      std::invalid_argument);
}

TEST_CASE("rejection oracle") {
  // zero density gives exactly zero
  Estimate zero = rejection_volume_oracle(StarBody::cube(3),
                                          DensitySpec::constant(3, 0.0), 1000, 1);
  CHECK(zero.value == 0.0);

  Estimate ball = rejection_volume_oracle(StarBody::euclidean_ball(3),
                                          DensitySpec::constant(3, 1.0),
                                          400000, 5);
  CHECK(std::abs(ball.value - 4.18879020478639098) <= 4.0 * ball.std_error);

  Estimate cross4 = rejection_volume_oracle(StarBody::lp_ball(4, 1.0),
                                            DensitySpec::constant(4, 1.0),
                                            400000, 6);
  CHECK(std::abs(cross4.value - 2.0 / 3.0) <= 4.0 * cross4.std_error);
}

TEST_CASE("quadrature spec validation") {
  QuadratureSpec quad;
  quad.sphere_samples = 0;
  CHECK_THROWS_AS(quad.validate(), std::invalid_argument);
  quad = QuadratureSpec{};
  quad.refine_steps = -1;
  CHECK_THROWS_AS(quad.validate(), std::invalid_argument);
}
