#include "starslice/harness.hpp"

#include <chrono>
#include <cmath>
#include <future>
#include <limits>
#include <stdexcept>

#include "starslice/constants.hpp"
#include "starslice/parallel.hpp"
#include "starslice/rng.hpp"

namespace starslice {

namespace {

constexpr double kContainmentTol = 1e-6;

enum SeedStream : std::uint64_t {
  kSeedVolume = 0x101,
  kSeedMeasure = 0x102,
  kSeedMax = 0x103,
  kSeedVolumeK = 0x104,
  kSeedContainment = 0x105,
  kSeedDistance = 0x106,
};

Estimate sum(const Estimate& a, const Estimate& b) {
  return {a.value + b.value, combined_sigma(a, b),
          a.samples_used + b.samples_used};
}

double safe_ratio(double num, double den) {
  if (den == 0.0) return std::numeric_limits<double>::infinity();
  return num / den;
}

double margin_in_sigmas(const Estimate& lhs, const Estimate& rhs) {
  double sigma = combined_sigma(lhs, rhs);
  if (sigma == 0.0) {
    double diff = rhs.value - lhs.value;
    if (diff == 0.0) return 0.0;
    return diff > 0.0 ? std::numeric_limits<double>::infinity()
                      : -std::numeric_limits<double>::infinity();
  }
  return (rhs.value - lhs.value) / sigma;
}

struct Stopwatch {
  std::chrono::steady_clock::time_point start =
      std::chrono::steady_clock::now();
  double ms() const {
    return std::chrono::duration<double, std::milli>(
               std::chrono::steady_clock::now() - start)
        .count();
  }
};

QuadratureSpec extended(const QuadratureSpec& quad) {
  QuadratureSpec q = quad;
  q.subspace_samples *= 10;
  return q;
}

// worst relative violation of rho_low <= rho_high over the direction set;
// <= 0 means the containment holds everywhere
double containment_violation(const StarBody& low, const StarBody& high,
                             const std::vector<Eigen::VectorXd>& dirs) {
  double worst = -std::numeric_limits<double>::infinity();
  for (const auto& d : dirs) {
    double lo = radial_unit(low, d);
    double hi = radial_unit(high, d);
    worst = std::max(worst, lo / hi - 1.0);
  }
  return worst;
}

std::vector<Eigen::VectorXd> containment_directions(int n, std::uint64_t seed) {
  DirectionSpec spec;
  spec.samples = 8192;
  spec.angular_grid = 4096;
  spec.seed = derive_seed(seed, kSeedContainment);
  return make_direction_set(n, spec);
}

// witness body a T C with the scale a recomputed on `dirs`, so L lies inside
// the result by construction on that direction set
StarBody normalized_witness(const StarBody& l, const StarBody& candidate,
                            const Eigen::MatrixXd& t,
                            const std::vector<Eigen::VectorXd>& dirs,
                            double& achieved_r) {
  StarBody tc = StarBody::linear_image(candidate, t);
  double sup_lc = 0.0, sup_cl = 0.0;
  for (const auto& d : dirs) {
    double rl = radial_unit(l, d);
    double rc = radial_unit(tc, d);
    sup_lc = std::max(sup_lc, rl / rc);
    sup_cl = std::max(sup_cl, rc / rl);
  }
  achieved_r = sup_lc * sup_cl;
  return StarBody::linear_image(candidate, sup_lc * t);
}

}  // namespace

std::string inequality_id_name(InequalityId id) {
  switch (id) {
    case InequalityId::Hyper: return "hyper";
    case InequalityId::HyperInt: return "hyper-int";
    case InequalityId::ArbMeas: return "arbmeas";
    case InequalityId::SqrtN2: return "sqrtn2";
    case InequalityId::Thm1: return "thm1";
    case InequalityId::MainLp: return "main-lp";
    case InequalityId::CorKInt: return "cor-kint";
    case InequalityId::PGt2: return "p-gt-2";
    case InequalityId::Stability: return "stability";
  }
  return "?";
}

InequalityId inequality_id_from_name(const std::string& name) {
  if (name == "hyper") return InequalityId::Hyper;
  if (name == "hyper-int") return InequalityId::HyperInt;
  if (name == "arbmeas") return InequalityId::ArbMeas;
  if (name == "sqrtn2") return InequalityId::SqrtN2;
  if (name == "thm1") return InequalityId::Thm1;
  if (name == "main-lp") return InequalityId::MainLp;
  if (name == "cor-kint") return InequalityId::CorKInt;
  if (name == "p-gt-2") return InequalityId::PGt2;
  if (name == "stability") return InequalityId::Stability;
  throw std::invalid_argument("unknown inequality id: " + name);
}

std::string verdict_name(Verdict v) {
  switch (v) {
    case Verdict::Pass: return "Pass";
    case Verdict::Fail: return "Fail";
    case Verdict::Inconclusive: return "Inconclusive";
    case Verdict::Exploratory: return "Exploratory";
    case Verdict::Error: return "Error";
  }
  return "?";
}

Verdict decide_verdict(const Estimate& lhs, const Estimate& rhs) {
  double sigma = combined_sigma(lhs, rhs);
  double scale = std::max(std::abs(lhs.value), std::abs(rhs.value));
  double slack = 4.0 * sigma + 1e-12 * scale;  // fp guard for exact paths
  if (lhs.value <= rhs.value + slack) return Verdict::Pass;
  bool high_confidence = sigma <= 5e-3 * scale;
  return high_confidence ? Verdict::Fail : Verdict::Inconclusive;
}

namespace {

void finish_report(InequalityReport& report, const Stopwatch& timer) {
  report.ratio = safe_ratio(report.lhs.value, report.rhs.value);
  report.margin_sigma = margin_in_sigmas(report.lhs, report.rhs);
  report.wall_ms = timer.ms();
}

VerifierParams base_params(const StarBody& body, const DensitySpec& f,
                           const QuadratureSpec& quad, int m) {
  VerifierParams p;
  p.n = body.dim();
  p.m = m;
  p.family = body.family_name();
  if (body.family() == BodyFamily::LpBall) p.p_or_k = body.lp_exponent();
  p.density = f.describe();
  p.seed = quad.seed;
  return p;
}

}  // namespace

InequalityReport verify_hyper_int(const StarBody& k, const QuadratureSpec& quad) {
  Stopwatch timer;
  quad.validate();
  int n = k.dim();
  InequalityReport report;
  report.id = InequalityId::HyperInt;
  report.params = base_params(k, DensitySpec::constant(n, 1.0), quad, 1);

  Estimate vol = volume(k, quad.with_seed(derive_seed(quad.seed, kSeedVolume)));
  report.lhs = pow_estimate(vol, static_cast<double>(n - 1) / n);
  DensitySpec one = DensitySpec::constant(n, 1.0);
  MaxSectionResult max =
      max_section(k, one, 1, quad.with_seed(derive_seed(quad.seed, kSeedMax)));
  report.rhs = scaled(max.estimate, c_nm(n, 1));
  report.verdict = decide_verdict(report.lhs, report.rhs);
  if (report.verdict == Verdict::Fail) {
    max = max_section(k, one, 1,
                      extended(quad).with_seed(derive_seed(quad.seed, kSeedMax)));
    report.rhs = scaled(max.estimate, c_nm(n, 1));
    report.verdict = decide_verdict(report.lhs, report.rhs);
    report.extended_search = true;
  }
  report.argmax_subspace = max.subspace;
  if (!has_tag(classify(k), ClassKind::IntersectionBody)) {
    report.verdict = Verdict::Inconclusive;
    report.note = "body is not tagged as an intersection body";
  }
  finish_report(report, timer);
  return report;
}

namespace {

struct ArbMeasCore {
  Estimate lhs;
  Estimate rhs_base;  // n/(n-1) c_n max mu(section) |K|^{1/n}
  MaxSectionResult max;
};

ArbMeasCore arbmeas_core(const StarBody& k, const DensitySpec& f,
                         const QuadratureSpec& quad, bool* was_extended) {
  int n = k.dim();
  ArbMeasCore core{
      measure_of_body(k, f, quad.with_seed(derive_seed(quad.seed, kSeedMeasure))),
      Estimate{},
      max_section(k, f, 1, quad.with_seed(derive_seed(quad.seed, kSeedMax)))};
  Estimate vol = volume(k, quad.with_seed(derive_seed(quad.seed, kSeedVolume)));
  double factor = static_cast<double>(n) / (n - 1) * c_nm(n, 1);
  core.rhs_base =
      product(scaled(core.max.estimate, factor), pow_estimate(vol, 1.0 / n));
  if (was_extended != nullptr &&
      decide_verdict(core.lhs, core.rhs_base) == Verdict::Fail) {
    core.max = max_section(
        k, f, 1, extended(quad).with_seed(derive_seed(quad.seed, kSeedMax)));
    core.rhs_base =
        product(scaled(core.max.estimate, factor), pow_estimate(vol, 1.0 / n));
    *was_extended = true;
  }
  return core;
}

}  // namespace

InequalityReport verify_hyper_conjecture(const StarBody& k, const DensitySpec& f,
                                         const QuadratureSpec& quad) {
  Stopwatch timer;
  quad.validate();
  InequalityReport report;
  report.id = InequalityId::Hyper;
  report.params = base_params(k, f, quad, 1);

  // the sqrtn2 bound with the sqrt(n) factor removed
  ArbMeasCore core = arbmeas_core(k, f, quad, nullptr);
  report.lhs = core.lhs;
  report.rhs = core.rhs_base;
  report.argmax_subspace = core.max.subspace;
  report.verdict = Verdict::Exploratory;
  report.note =
      "open conjecture: the ratio is the empirical constant, no pass/fail claim";
  finish_report(report, timer);
  return report;
}

InequalityReport verify_arbmeas(const StarBody& k, const DensitySpec& f,
                                const QuadratureSpec& quad) {
  Stopwatch timer;
  quad.validate();
  InequalityReport report;
  report.id = InequalityId::ArbMeas;
  report.params = base_params(k, f, quad, 1);

  bool was_extended = false;
  ArbMeasCore core = arbmeas_core(k, f, quad, &was_extended);
  report.lhs = core.lhs;
  report.rhs = core.rhs_base;
  report.argmax_subspace = core.max.subspace;
  report.extended_search = was_extended;
  report.verdict = decide_verdict(report.lhs, report.rhs);
  if (!has_tag(classify(k), ClassKind::IntersectionBody)) {
    report.verdict = Verdict::Inconclusive;
    report.note = "body is not tagged as an intersection body";
  }
  finish_report(report, timer);
  return report;
}

InequalityReport verify_sqrtn2(const StarBody& k, const DensitySpec& f,
                               const QuadratureSpec& quad) {
  Stopwatch timer;
  quad.validate();
  if (!is_convex_family(k))
    throw std::invalid_argument(
        "verify_sqrtn2: body is not in the convex family whitelist");
  int n = k.dim();
  InequalityReport report;
  report.id = InequalityId::SqrtN2;
  report.params = base_params(k, f, quad, 1);

  ArbMeasCore core = arbmeas_core(k, f, quad, nullptr);
  report.lhs = core.lhs;
  report.rhs = scaled(core.rhs_base, std::sqrt(static_cast<double>(n)));
  report.verdict = decide_verdict(report.lhs, report.rhs);
  if (report.verdict == Verdict::Fail) {
    ArbMeasCore retry = arbmeas_core(k, f, extended(quad), nullptr);
    core = retry;
    report.lhs = core.lhs;
    report.rhs = scaled(core.rhs_base, std::sqrt(static_cast<double>(n)));
    report.verdict = decide_verdict(report.lhs, report.rhs);
    report.extended_search = true;
  }
  report.argmax_subspace = core.max.subspace;
  finish_report(report, timer);
  return report;
}

InequalityReport verify_thm1(const StarBody& l, const StarBody& k, double d,
                             int m, const DensitySpec& f,
                             const QuadratureSpec& quad) {
  Stopwatch timer;
  quad.validate();
  if (l.dim() != k.dim())
    throw std::invalid_argument("verify_thm1: bodies disagree on dimension");
  int n = l.dim();
  if (m < 1 || m > n - 1)
    throw std::invalid_argument("verify_thm1: m out of range [1, n-1]");
  if (!(d > 0.0)) throw std::invalid_argument("verify_thm1: d must be > 0");

  // explicit containment hypothesis (1/d) K in L in K
  auto dirs = containment_directions(n, quad.seed);
  StarBody k_shrunk = k.scaled(1.0 / d);
  double v1 = containment_violation(k_shrunk, l, dirs);
  double v2 = containment_violation(l, k, dirs);
  double worst = std::max(v1, v2);
  if (worst > kContainmentTol)
    throw std::invalid_argument(
        "verify_thm1: containment (1/d)K in L in K violated (relative slack " +
        std::to_string(worst) + ")");

  InequalityReport report;
  report.id = InequalityId::Thm1;
  report.params = base_params(l, f, quad, m);
  report.params.d = d;

  Estimate vol_l =
      volume(l, quad.with_seed(derive_seed(quad.seed, kSeedVolume)));
  Estimate vol_k =
      volume(k, quad.with_seed(derive_seed(quad.seed, kSeedVolumeK)));
  report.lhs =
      measure_of_body(l, f, quad.with_seed(derive_seed(quad.seed, kSeedMeasure)));

  double factor = std::pow(d, m) * static_cast<double>(n) / (n - m) * c_nm(n, m);
  MaxSectionResult max =
      max_section(l, f, m, quad.with_seed(derive_seed(quad.seed, kSeedMax)));
  auto assemble_rhs = [&](const MaxSectionResult& ms) {
    return product(scaled(ms.estimate, factor),
                   pow_estimate(vol_l, static_cast<double>(m) / n));
  };
  report.rhs = assemble_rhs(max);
  report.verdict = decide_verdict(report.lhs, report.rhs);
  if (report.verdict == Verdict::Fail) {
    max = max_section(l, f, m,
                      extended(quad).with_seed(derive_seed(quad.seed, kSeedMax)));
    report.rhs = assemble_rhs(max);
    report.verdict = decide_verdict(report.lhs, report.rhs);
    report.extended_search = true;
  }
  report.argmax_subspace = max.subspace;

  // proof trace: the stability step through K and the |K| <= d^n |L| step
  ProofTrace trace;
  trace.epsilon = max.estimate;
  trace.mid_lhs = report.lhs.value;
  Estimate mid_rhs =
      product(scaled(max.estimate,
                     static_cast<double>(n) / (n - m) * c_nm(n, m)),
              pow_estimate(vol_k, static_cast<double>(m) / n));
  trace.mid_rhs = mid_rhs.value;
  trace.mid_ok = decide_verdict(report.lhs, mid_rhs) == Verdict::Pass;
  trace.vol_k = vol_k.value;
  Estimate bound = scaled(vol_l, std::pow(d, n));
  trace.d_pow_n_vol_l = bound.value;
  trace.vol_step_ok = decide_verdict(vol_k, bound) == Verdict::Pass;
  trace.containment_slack = worst;
  report.trace = trace;
  if (!has_tag(classify(k), ClassKind::GeneralizedMIntersection,
               static_cast<double>(m))) {
    report.verdict = Verdict::Inconclusive;
    report.note = "K is not tagged as a generalized m-intersection body";
  }
  finish_report(report, timer);
  return report;
}

InequalityReport verify_main_lp(const StarBody& l, double d, int m,
                                const DensitySpec& f, const QuadratureSpec& quad,
                                const MainLpOptions& options) {
  Stopwatch timer;
  quad.validate();
  if (options.candidates.empty())
    throw std::invalid_argument("verify_main_lp: empty candidate list");
  if (!(d > 0.0)) throw std::invalid_argument("verify_main_lp: d must be > 0");
  int n = l.dim();
  if (m < 1 || m > n - 1)
    throw std::invalid_argument("verify_main_lp: m out of range [1, n-1]");

  ClassTag tag{ClassKind::GeneralizedMIntersection, static_cast<double>(m)};
  ToClassResult tc =
      distance_to_class(l, tag, options.candidates, options.bm_budget,
                        derive_seed(quad.seed, kSeedDistance), options.bm);

  auto dirs = containment_directions(n, quad.seed);
  double achieved = 0.0;
  StarBody witness = normalized_witness(
      l, options.candidates[static_cast<std::size_t>(tc.candidate_index)],
      *tc.distance.witness_map, dirs, achieved);

  InequalityReport report = verify_thm1(l, witness, d, m, f, quad);
  report.id = options.as_k_intersection ? InequalityId::CorKInt
                                        : InequalityId::MainLp;
  report.params = base_params(l, f, quad, m);
  report.params.d = d;

  // smallest d' <= d for which the numeric inequality passes, by bisection;
  // both the rhs value and its error bar scale with (d'/d)^m
  auto passes_at = [&](double dp) {
    Estimate rhs_dp = scaled(report.rhs, std::pow(dp / d, m));
    return decide_verdict(report.lhs, rhs_dp) == Verdict::Pass;
  };
  if (passes_at(d)) {
    double lo = 0.0, hi = d;
    for (int it = 0; it < 80; ++it) {
      double mid = 0.5 * (lo + hi);
      (passes_at(mid) ? hi : lo) = mid;
    }
    report.d_prime = hi;
    if (m == 1)
      report.d_certificate =
          hi * static_cast<double>(n) / (n - 1) * c_nm(n, 1);
  }
  report.note = report.note.empty()
                    ? "witness distance " + std::to_string(achieved)
                    : report.note + "; witness distance " + std::to_string(achieved);
  finish_report(report, timer);
  return report;
}

InequalityReport verify_p_gt_2(const StarBody& l, int m, const DensitySpec& f,
                               const QuadratureSpec& quad, int bm_budget) {
  Stopwatch timer;
  quad.validate();
  auto tags = classify(l);
  double p = 0.0;
  for (const auto& t : tags)
    if (t.kind == ClassKind::SubspaceLpPos) p = t.param;
  if (!(p > 2.0))
    throw std::invalid_argument(
        "verify_p_gt_2: body is not tagged as a subspace of L_p with p > 2");
  int n = l.dim();
  if (m < 1 || m > n - 1)
    throw std::invalid_argument("verify_p_gt_2: m out of range [1, n-1]");

  double d = lewis_bound(n, p);
  StarBody ball = StarBody::euclidean_ball(n);
  DistanceResult bm = bm_distance_upper(
      l, ball, bm_budget, derive_seed(quad.seed, kSeedDistance));

  auto dirs = containment_directions(n, quad.seed);
  double achieved = 0.0;
  StarBody witness = normalized_witness(l, ball, *bm.witness_map, dirs, achieved);

  InequalityReport report = verify_thm1(l, witness, d, m, f, quad);
  report.id = InequalityId::PGt2;
  report.params = base_params(l, f, quad, m);
  report.params.p_or_k = p;
  report.params.d = d;
  finish_report(report, timer);
  return report;
}

InequalityReport verify_stability(const StabilityInput& input,
                                  const QuadratureSpec& quad) {
  Stopwatch timer;
  quad.validate();
  const StarBody& k = input.k;
  int n = k.dim();
  int m = input.m;
  if (m < 1 || m > n - 1)
    throw std::invalid_argument("verify_stability: m out of range [1, n-1]");
  if (input.g.dim() != n)
    throw std::invalid_argument("verify_stability: density dimension mismatch");

  InequalityReport report;
  report.id = InequalityId::Stability;
  report.params = base_params(k, input.g, quad, m);
  report.params.density = "1+" + input.g.describe();

  Estimate vol = volume(k, quad.with_seed(derive_seed(quad.seed, kSeedVolume)));
  Estimate mu_g = measure_of_body(
      k, input.g, quad.with_seed(derive_seed(quad.seed, kSeedMeasure)));
  report.lhs = sum(vol, mu_g);  // int_K (1 + g)

  double factor = static_cast<double>(n) / (n - m) * c_nm(n, m);
  MaxSectionResult max = max_section(
      k, input.g, m, quad.with_seed(derive_seed(quad.seed, kSeedMax)));
  auto assemble_rhs = [&](const MaxSectionResult& ms) {
    return sum(vol, product(scaled(ms.estimate, factor),
                            pow_estimate(vol, static_cast<double>(m) / n)));
  };
  report.rhs = assemble_rhs(max);
  report.verdict = decide_verdict(report.lhs, report.rhs);
  if (report.verdict == Verdict::Fail) {
    // eps-hat is a lower bound on the true sup: search harder before failing
    max = max_section(k, input.g, m,
                      extended(quad).with_seed(derive_seed(quad.seed, kSeedMax)));
    report.rhs = assemble_rhs(max);
    report.verdict = decide_verdict(report.lhs, report.rhs);
    report.extended_search = true;
  }
  report.argmax_subspace = max.subspace;
  ProofTrace trace;
  trace.epsilon = max.estimate;
  report.trace = trace;
  if (!has_tag(classify(k), ClassKind::GeneralizedMIntersection,
               static_cast<double>(m))) {
    report.verdict = Verdict::Inconclusive;
    report.note = "K is not tagged as a generalized m-intersection body";
  }
  finish_report(report, timer);
  return report;
}

InequalityReport run_verify(const VerifyRequest& request) {
  switch (request.id) {
    case InequalityId::Hyper:
      return verify_hyper_conjecture(request.body, request.density, request.quad);
    case InequalityId::HyperInt:
      return verify_hyper_int(request.body, request.quad);
    case InequalityId::ArbMeas:
      return verify_arbmeas(request.body, request.density, request.quad);
    case InequalityId::SqrtN2:
      return verify_sqrtn2(request.body, request.density, request.quad);
    case InequalityId::Thm1: {
      if (!request.body_k)
        throw std::invalid_argument("thm1 requires the normalized body K");
      if (!request.d) throw std::invalid_argument("thm1 requires d");
      return verify_thm1(request.body, *request.body_k, *request.d, request.m,
                         request.density, request.quad);
    }
    case InequalityId::MainLp:
    case InequalityId::CorKInt: {
      if (!request.d) throw std::invalid_argument("main-lp requires d");
      MainLpOptions options;
      options.candidates = request.candidates;
      options.bm_budget = request.bm_budget;
      options.as_k_intersection = request.id == InequalityId::CorKInt;
      return verify_main_lp(request.body, *request.d, request.m,
                            request.density, request.quad, options);
    }
    case InequalityId::PGt2:
      return verify_p_gt_2(request.body, request.m, request.density,
                           request.quad, request.bm_budget);
    case InequalityId::Stability: {
      StabilityInput input{request.body, request.density, request.m};
      return verify_stability(input, request.quad);
    }
  }
  throw std::logic_error("run_verify: unhandled inequality id");
}

std::vector<InequalityReport> sweep(const std::vector<VerifyRequest>& plan) {
  std::vector<InequalityReport> reports(plan.size());
  std::vector<std::future<void>> jobs;
  jobs.reserve(plan.size());
  for (std::size_t i = 0; i < plan.size(); ++i) {
    jobs.push_back(std::async(std::launch::async, [&plan, &reports, i] {
      Stopwatch timer;
      try {
        reports[i] = run_verify(plan[i]);
      } catch (const std::exception& e) {
        InequalityReport r;
        r.id = plan[i].id;
        r.params.n = plan[i].body.dim();
        r.params.m = plan[i].m;
        r.params.family = plan[i].body.family_name();
        r.params.seed = plan[i].quad.seed;
        r.params.density = plan[i].density.describe();
        r.verdict = Verdict::Error;
        r.note = e.what();
        r.wall_ms = timer.ms();
        reports[i] = r;
      }
    }));
  }
  for (auto& j : jobs) j.get();
  return reports;
}

}  // namespace starslice
