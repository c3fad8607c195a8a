#include <doctest.h>

#include <cmath>

#include "starslice/classify.hpp"
#include "starslice/distance.hpp"
#include "starslice/rng.hpp"

using namespace starslice;
using Eigen::MatrixXd;
using Eigen::VectorXd;

TEST_CASE("geometric distance basics") {
  StarBody cross = StarBody::lp_ball(3, 1.0);
  DistanceResult self = geometric_distance(cross, cross);
  CHECK(self.value == 1.0);

  // homothety is absorbed by the witness scale
  DistanceResult balls = geometric_distance(StarBody::euclidean_ball(3, 2.0),
                                            StarBody::euclidean_ball(3, 1.0));
  CHECK(balls.value == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(balls.witness_scale == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(balls.certified == DistanceCertificate::ExactGrid);
}

TEST_CASE("geometric distance lp vs ball with a dense oracle") {
  StarBody lp4 = StarBody::lp_ball(3, 4.0);
  StarBody ball = StarBody::euclidean_ball(3);
  DistanceResult r = geometric_distance(lp4, ball);
  double expected = std::pow(3.0, 0.25);
  CHECK(r.value == doctest::Approx(expected).epsilon(1e-12));
  CHECK(r.certified == DistanceCertificate::ExactGrid);

  // independent dense-sample oracle
  SplitMix64 rng(91);
  double sup1 = 0.0, sup2 = 0.0;
  VectorXd u(3);
  for (int i = 0; i < 200000; ++i) {
    rng.fill_gaussian(u);
    u.normalize();
    double rk = radial_unit(lp4, u);
    double rl = radial_unit(ball, u);
    sup1 = std::max(sup1, rk / rl);
    sup2 = std::max(sup2, rl / rk);
  }
  CHECK(sup1 * sup2 <= r.value + 1e-12);
  CHECK(sup1 * sup2 >= r.value * (1.0 - 1e-3));
}

TEST_CASE("geometric distance symmetry") {
  StarBody a = StarBody::lp_ball(3, 1.0);
  StarBody b = StarBody::cube(3, 0.7);
  DistanceResult ab = geometric_distance(a, b);
  DistanceResult ba = geometric_distance(b, a);
  CHECK(ab.value == ba.value);
}

TEST_CASE("containment witness") {
  StarBody k = StarBody::lp_ball(3, 1.5);
  StarBody l = StarBody::cube(3);
  DirectionSpec spec;
  spec.samples = 20000;
  DistanceResult r = geometric_distance(k, l, spec);
  auto dirs = make_direction_set(3, spec);
  for (const auto& d : dirs) {
    double rk = radial_unit(k, d);
    double rl = radial_unit(l, d);
    CHECK(rk <= r.witness_scale * rl * (1.0 + 1e-9));
    CHECK(r.witness_scale * rl <= r.value * rk * (1.0 + 1e-9));
  }
}

TEST_CASE("bm upper bound recovers a linear preimage") {
  MatrixXd t0(2, 2);
  t0 << 1.2, 0.3, -0.1, 0.9;
  StarBody l = StarBody::lp_ball(2, 1.0);
  StarBody k = StarBody::linear_image(l, t0);
  DistanceResult r = bm_distance_upper(k, l, 6, 42);
  CHECK(r.value <= 1.0 + 1e-6);
  CHECK(r.witness_map.has_value());
  CHECK(r.certified == DistanceCertificate::OptimizedUpperBound);
}

TEST_CASE("bm upper bound: square vs diamond") {
  StarBody square = StarBody::cube(2);
  StarBody diamond = StarBody::lp_ball(2, 1.0);
  DistanceResult r = bm_distance_upper(square, diamond, 16, 7);
  CHECK(r.value <= 1.0 + 1e-4);
}

TEST_CASE("bm upper bound: lp4 vs ball keeps the identity start") {
  StarBody lp4 = StarBody::lp_ball(3, 4.0);
  StarBody ball = StarBody::euclidean_ball(3);
  BmOptions options;
  options.search_directions.samples = 4000;
  options.max_iterations = 150;
  DistanceResult r = bm_distance_upper(lp4, ball, 2, 3, options);
  CHECK(r.value <= std::pow(3.0, 0.25) + 1e-6);
}

TEST_CASE("bm upper bound is invariant under linear images of the target") {
  StarBody k = StarBody::lp_ball(2, 1.0);
  StarBody l = StarBody::cube(2);
  MatrixXd t(2, 2);
  t << 0.8, 0.4, -0.2, 1.1;
  StarBody tl = StarBody::linear_image(l, t);
  BmOptions options;
  options.search_directions.angular_grid = 1024;
  options.max_iterations = 400;
  DistanceResult r1 = bm_distance_upper(k, l, 10, 5, options);
  DistanceResult r2 = bm_distance_upper(k, tl, 10, 5, options);
  CHECK(std::abs(r1.value - r2.value) <= 0.02 * r1.value);
}

TEST_CASE("bm preconditions") {
  StarBody a = StarBody::cube(2);
  CHECK_THROWS_AS(bm_distance_upper(a, StarBody::cube(3), 4, 1),
                  std::invalid_argument);
  CHECK_THROWS_AS(bm_distance_upper(a, a, 0, 1), std::invalid_argument);
  CHECK_THROWS_AS(bm_distance_upper(StarBody::cube(7), StarBody::cube(7), 4, 1),
                  std::invalid_argument);
}

TEST_CASE("distance to class") {
  StarBody lp4 = StarBody::lp_ball(3, 4.0);
  std::vector<StarBody> candidates = {StarBody::euclidean_ball(3)};
  ClassTag tag{ClassKind::GeneralizedMIntersection, 1.0};
  ToClassResult r = distance_to_class(lp4, tag, candidates, 2, 11);
  CHECK(r.candidate_index == 0);
  CHECK(r.distance.value <= std::pow(3.0, 0.25) + 1e-6);

  // a body already in the class is its own best candidate
  StarBody cross = StarBody::lp_ball(3, 1.0);
  std::vector<StarBody> with_self = {StarBody::euclidean_ball(3), cross};
  ToClassResult self = distance_to_class(cross, tag, with_self, 2, 12);
  CHECK(self.distance.value <= 1.0 + 1e-6);
  CHECK(self.candidate_index == 1);

  // cube vs ball: d_G = sqrt(3) bounds the class distance
  ToClassResult cube_r =
      distance_to_class(StarBody::cube(3), tag, candidates, 2, 13);
  CHECK(cube_r.distance.value <= std::sqrt(3.0) + 1e-6);

  // candidates must carry the requested tag
  std::vector<StarBody> bad = {StarBody::lp_ball(3, 4.0)};
  CHECK_THROWS_AS(distance_to_class(cross, tag, bad, 2, 14),
                  std::invalid_argument);
  CHECK_THROWS_AS(distance_to_class(cross, tag, {}, 2, 15),
                  std::invalid_argument);
}
