#include <doctest.h>

#include <cmath>

#include "starslice/constants.hpp"
#include "starslice/harness.hpp"
#include "starslice/radon.hpp"

using namespace starslice;

namespace {

QuadratureSpec quick(std::uint64_t seed) {
  QuadratureSpec quad;
  quad.sphere_samples = 2048;
  quad.radial_nodes = 48;
  quad.subspace_samples = 48;
  quad.refine_steps = 16;
  quad.seed = seed;
  return quad;
}

}  // namespace

TEST_CASE("verdict rule") {
  CHECK(decide_verdict({1.0, 0.0, 0}, {1.0, 0.0, 0}) == Verdict::Pass);
  CHECK(decide_verdict({1.0, 0.0, 0}, {2.0, 0.0, 0}) == Verdict::Pass);
  // clear violation with tight error bars: Fail
  CHECK(decide_verdict({2.0, 1e-4, 100}, {1.0, 1e-4, 100}) == Verdict::Fail);
  // violation inside the noise: Inconclusive
  CHECK(decide_verdict({1.05, 0.2, 100}, {1.0, 0.2, 100}) == Verdict::Pass);
  CHECK(decide_verdict({3.0, 0.2, 100}, {1.0, 0.2, 100}) == Verdict::Inconclusive);
}

TEST_CASE("hyper-int equality case for balls") {
  for (int n : {3, 4, 5}) {
    InequalityReport r = verify_hyper_int(StarBody::euclidean_ball(n), quick(n));
    CHECK(r.verdict == Verdict::Pass);
    CHECK(std::abs(r.ratio - 1.0) <= 1e-9);
    CHECK(r.lhs.std_error == 0.0);
  }
}

TEST_CASE("hyper-int on the cross-polytope") {
  InequalityReport r = verify_hyper_int(StarBody::lp_ball(3, 1.0), quick(7));
  CHECK(r.verdict == Verdict::Pass);
  CHECK(r.ratio < 1.0);
  CHECK(r.argmax_subspace.has_value());
  CHECK(r.params.family == "lp");
}

TEST_CASE("hyper-int scale invariance of the ratio") {
  InequalityReport a = verify_hyper_int(StarBody::lp_ball(3, 2.0), quick(3));
  InequalityReport b =
      verify_hyper_int(StarBody::lp_ball(3, 2.0, 10.0), quick(3));
  CHECK(std::abs(a.ratio - b.ratio) <= 1e-9);
}

TEST_CASE("hyper-int without the intersection-body tag is inconclusive") {
  InequalityReport r = verify_hyper_int(StarBody::lp_ball(3, 4.0), quick(5));
  CHECK(r.verdict == Verdict::Inconclusive);
  CHECK(!r.note.empty());
}

TEST_CASE("the open conjecture is exploratory only") {
  InequalityReport r = verify_hyper_conjecture(
      StarBody::lp_ball(3, 4.0), DensitySpec::constant(3, 1.0), quick(5));
  CHECK(r.verdict == Verdict::Exploratory);
  CHECK(r.ratio > 0.0);

  // the exposure is exactly the sqrtn2 bound without the sqrt(n) factor
  InequalityReport sq = verify_sqrtn2(StarBody::lp_ball(3, 4.0),
                                      DensitySpec::constant(3, 1.0), quick(5));
  CHECK(sq.rhs.value == r.rhs.value * std::sqrt(3.0));
}

TEST_CASE("arbmeas gaussian ball numbers") {
  InequalityReport r = verify_arbmeas(StarBody::euclidean_ball(3),
                                      DensitySpec::gaussian(3, 1.0), quick(1));
  CHECK(r.verdict == Verdict::Pass);
  CHECK(r.lhs.value == doctest::Approx(0.19874804309879920).epsilon(1e-9));
  CHECK(r.rhs.value == doctest::Approx(0.31394311176457866).epsilon(1e-9));
  CHECK(r.ratio == doctest::Approx(0.633).epsilon(2e-3));
}

TEST_CASE("arbmeas full pipeline with a generalized gaussian") {
  StarBody body = StarBody::lp_ball(4, 1.5);
  DensitySpec f = DensitySpec::generalized_gaussian(4, 1.0, 1.0);
  QuadratureSpec quad = quick(29);
  quad.sphere_samples = 8192;
  InequalityReport r = verify_arbmeas(body, f, quad);
  CHECK(r.verdict == Verdict::Pass);
  // the left side cross-checked by the independent rejection oracle
  Estimate oracle = rejection_volume_oracle(body, f, 400000, 3131);
  CHECK(std::abs(r.lhs.value - oracle.value) <=
        4.0 * combined_sigma(r.lhs, oracle));
}

TEST_CASE("constant density reduces arbmeas to hyper-int") {
  StarBody body = StarBody::lp_ball(3, 1.0);
  InequalityReport hyper = verify_hyper_int(body, quick(19));
  InequalityReport arb =
      verify_arbmeas(body, DensitySpec::constant(3, 1.0), quick(19));
  CHECK(hyper.verdict == Verdict::Pass);
  CHECK(arb.verdict == Verdict::Pass);
}

TEST_CASE("sqrtn2 carries exactly the extra sqrt(n)") {
  StarBody body = StarBody::lp_ball(3, 1.5);
  DensitySpec f = DensitySpec::gaussian(3, 1.0);
  InequalityReport arb = verify_arbmeas(body, f, quick(23));
  InequalityReport sq = verify_sqrtn2(body, f, quick(23));
  CHECK(sq.rhs.value == arb.rhs.value * std::sqrt(3.0));
  CHECK(arb.verdict == Verdict::Pass);
  CHECK(sq.verdict == Verdict::Pass);

  // non-convex bodies are gated out
  CHECK_THROWS_AS(verify_sqrtn2(StarBody::lp_ball(3, 0.5), f, quick(2)),
                  std::invalid_argument);
}

TEST_CASE("sqrtn2 on the cube with a gaussian") {
  InequalityReport r =
      verify_sqrtn2(StarBody::cube(3), DensitySpec::gaussian(3, 1.0), quick(4));
  CHECK(r.verdict == Verdict::Pass);
}

TEST_CASE("thm1 reduces to the m-dimensional slicing bound at d = 1") {
  StarBody ball = StarBody::euclidean_ball(3);
  for (int m : {1, 2}) {
    InequalityReport r = verify_thm1(ball, ball, 1.0, m,
                                     DensitySpec::gaussian(3, 1.0), quick(m));
    CHECK(r.verdict == Verdict::Pass);
    REQUIRE(r.trace.has_value());
    CHECK(r.trace->mid_ok);
    CHECK(r.trace->vol_step_ok);
  }
}

TEST_CASE("thm1 homothety: |K| = d^n |L| for L = (1/d) K") {
  double d = 1.37;
  StarBody k = StarBody::euclidean_ball(3);
  StarBody l = k.scaled(1.0 / d);
  InequalityReport r =
      verify_thm1(l, k, d, 1, DensitySpec::constant(3, 1.0), quick(6));
  REQUIRE(r.trace.has_value());
  CHECK(r.trace->vol_step_ok);
  CHECK(r.trace->vol_k ==
        doctest::Approx(std::pow(d, 3) * volume(l, quick(6)).value)
            .epsilon(1e-9));
  CHECK(r.verdict == Verdict::Pass);
}

TEST_CASE("thm1 full pipeline with a manual lp4 witness") {
  double d = std::pow(3.0, 0.25);
  StarBody l = StarBody::lp_ball(3, 4.0);
  StarBody k = StarBody::euclidean_ball(3, d);
  InequalityReport r =
      verify_thm1(l, k, d, 1, DensitySpec::constant(3, 1.0), quick(8));
  CHECK(r.verdict == Verdict::Pass);
  CHECK(r.trace->containment_slack <= 1e-9);
}

TEST_CASE("thm1 containment violations are errors") {
  StarBody ball = StarBody::euclidean_ball(3);
  StarBody small = StarBody::euclidean_ball(3, 0.5);
  CHECK_THROWS_AS(
      verify_thm1(ball, small, 1.2, 1, DensitySpec::constant(3, 1.0), quick(9)),
      std::invalid_argument);
}

TEST_CASE("main-lp with the body as its own candidate") {
  StarBody cross = StarBody::lp_ball(3, 1.0);
  MainLpOptions options;
  options.candidates = {cross, StarBody::euclidean_ball(3)};
  options.bm_budget = 2;
  InequalityReport r = verify_main_lp(cross, 1.05, 1,
                                      DensitySpec::constant(3, 1.0), quick(10),
                                      options);
  CHECK(r.verdict == Verdict::Pass);
  REQUIRE(r.d_prime.has_value());
  CHECK(*r.d_prime <= 1.0 + 1e-3);

  // bisection endpoints: Pass at d', non-Pass slightly below
  double dp = *r.d_prime;
  Estimate rhs_below = scaled(r.rhs, std::pow(dp * (1.0 - 1e-3) / 1.05, 1));
  CHECK(decide_verdict(r.lhs, rhs_below) != Verdict::Pass);
  Estimate rhs_at = scaled(r.rhs, std::pow(dp / 1.05, 1));
  CHECK(decide_verdict(r.lhs, rhs_at) == Verdict::Pass);

  // m = 1 doubles as the hyperplane-case certificate
  REQUIRE(r.d_certificate.has_value());
  CHECK(*r.d_certificate ==
        doctest::Approx(dp * 1.5 * c_nm(3, 1)).epsilon(1e-12));
}

TEST_CASE("main-lp on an intersection-body grid") {
  QuadratureSpec grid_quad;
  grid_quad.sphere_samples = 512;
  grid_quad.seed = 40;
  StarBody l = intersection_body_of(StarBody::lp_ball(3, 1.0), grid_quad,
                                    IntersectionBodyOptions{8});

  MainLpOptions options;
  options.candidates = {StarBody::euclidean_ball(3), StarBody::lp_ball(3, 2.0), l};
  options.bm_budget = 1;
  options.bm.search_directions.samples = 2000;
  options.bm.final_directions.samples = 10000;
  options.bm.max_iterations = 150;
  InequalityReport r = verify_main_lp(l, 1.05, 1,
                                      DensitySpec::constant(3, 1.0), quick(41),
                                      options);
  CHECK(r.verdict == Verdict::Pass);
}

TEST_CASE("cor-kint reports under its own id") {
  StarBody cross = StarBody::lp_ball(3, 1.0);
  MainLpOptions options;
  options.candidates = {cross};
  options.bm_budget = 1;
  options.as_k_intersection = true;
  InequalityReport r = verify_main_lp(cross, 1.1, 1,
                                      DensitySpec::constant(3, 1.0), quick(11),
                                      options);
  CHECK(r.id == InequalityId::CorKInt);
  CHECK(inequality_id_name(r.id) == "cor-kint");
  CHECK(r.verdict == Verdict::Pass);
}

TEST_CASE("p>2 verifier") {
  InequalityReport r = verify_p_gt_2(StarBody::lp_ball(3, 4.0), 1,
                                     DensitySpec::constant(3, 1.0), quick(12), 2);
  CHECK(r.verdict == Verdict::Pass);
  CHECK(r.params.d == doctest::Approx(std::pow(3.0, 0.25)).epsilon(1e-12));
  CHECK(r.params.p_or_k == doctest::Approx(4.0));

  // m = n-1: one-dimensional sections
  InequalityReport chords = verify_p_gt_2(StarBody::lp_ball(3, 4.0), 2,
                                          DensitySpec::constant(3, 1.0),
                                          quick(13), 2);
  CHECK(chords.verdict == Verdict::Pass);

  // ellipsoids are not tagged as subspaces of L_p, p > 2
  Eigen::VectorXd axes(3);
  axes << 1, 2, 3;
  CHECK_THROWS_AS(
      verify_p_gt_2(StarBody::ellipsoid_from_axes(axes), 1,
                    DensitySpec::constant(3, 1.0), quick(14), 2),
      std::invalid_argument);
}

TEST_CASE("stability verifier") {
  StabilityInput input{StarBody::euclidean_ball(3),
                       DensitySpec::gaussian(3, 1.0), 1};
  InequalityReport r = verify_stability(input, quick(15));
  CHECK(r.verdict == Verdict::Pass);
  REQUIRE(r.trace.has_value());
  CHECK(r.trace->epsilon.value ==
        doctest::Approx(0.15697155588228933).epsilon(1e-9));

  // g = 0: both sides collapse to |K| exactly
  StabilityInput zero{StarBody::euclidean_ball(3),
                      DensitySpec::constant(3, 0.0), 1};
  InequalityReport rz = verify_stability(zero, quick(16));
  CHECK(rz.lhs.value == rz.rhs.value);
  CHECK(rz.verdict == Verdict::Pass);

  // higher codimension on the cross-polytope
  StabilityInput cross{StarBody::lp_ball(4, 1.0),
                       DensitySpec::constant(4, 0.5), 2};
  InequalityReport rc = verify_stability(cross, quick(17));
  CHECK(rc.verdict == Verdict::Pass);
}

TEST_CASE("sweep") {
  std::vector<VerifyRequest> plan;
  for (int n : {3, 4, 5})
    for (double p : {1.0, 1.5, 2.0}) {
      VerifyRequest req{InequalityId::HyperInt,
                        StarBody::lp_ball(n, p),
                        std::nullopt,
                        DensitySpec::constant(n, 1.0),
                        quick(static_cast<std::uint64_t>(n * 100 + p * 10)),
                        1,
                        std::nullopt,
                        {},
                        2};
      plan.push_back(std::move(req));
    }
  auto reports = sweep(plan);
  REQUIRE(reports.size() == 9);
  for (const auto& r : reports) CHECK(r.verdict == Verdict::Pass);

  // empty plan
  CHECK(sweep({}).empty());

  // a failing entry is isolated
  VerifyRequest bad{InequalityId::Thm1,
                    StarBody::lp_ball(3, 1.0),
                    std::nullopt,  // missing body K: precondition violation
                    DensitySpec::constant(3, 1.0),
                    quick(1),
                    1,
                    1.0,
                    {},
                    2};
  std::vector<VerifyRequest> mixed;
  mixed.push_back(plan[0]);
  mixed.push_back(bad);
  mixed.push_back(plan[1]);
  auto out = sweep(mixed);
  CHECK(out[0].verdict == Verdict::Pass);
  CHECK(out[1].verdict == Verdict::Error);
  CHECK(!out[1].note.empty());
  CHECK(out[2].verdict == Verdict::Pass);
}

TEST_CASE("inequality id round trip") {
  for (InequalityId id :
       {InequalityId::Hyper, InequalityId::HyperInt, InequalityId::ArbMeas,
        InequalityId::SqrtN2, InequalityId::Thm1, InequalityId::MainLp,
        InequalityId::CorKInt, InequalityId::PGt2, InequalityId::Stability})
    CHECK(inequality_id_from_name(inequality_id_name(id)) == id);
  CHECK_THROWS_AS(inequality_id_from_name("nope"), std::invalid_argument);
}
