#pragma once

#include <optional>
#include <string>
#include <vector>

#include "starslice/bodies.hpp"
#include "starslice/classify.hpp"
#include "starslice/density.hpp"
#include "starslice/distance.hpp"
#include "starslice/estimate.hpp"
#include "starslice/quadrature.hpp"

namespace starslice {

enum class InequalityId {
  Hyper,      // the open hyperplane conjecture; exploratory only
  HyperInt,   // |K|^{(n-1)/n} <= c_n max |K cap xi-perp|
  ArbMeas,    // mu(K) <= n/(n-1) c_n max mu(K cap xi-perp) |K|^{1/n}
  SqrtN2,     // the arbitrary-measure bound with an extra sqrt(n)
  Thm1,       // mu(L) <= d^m n/(n-m) c_{n,m} max mu(L cap H) |L|^{m/n}
  MainLp,     // Thm1 with K chosen by distance-to-class, d user-supplied
  CorKInt,    // the k-intersection-body reformulation of MainLp
  PGt2,       // subspaces of L_p, p > 2, with d = n^{1/2-1/p}
  Stability,  // int_K f <= |K| + n/(n-m) c_{n,m} |K|^{m/n} eps
};

std::string inequality_id_name(InequalityId id);
InequalityId inequality_id_from_name(const std::string& name);

enum class Verdict { Pass, Fail, Inconclusive, Exploratory, Error };

std::string verdict_name(Verdict v);

struct VerifierParams {
  int n = 0;
  int m = 1;
  std::optional<double> p_or_k;
  std::optional<double> d;
  std::string family;
  std::string density;
  std::uint64_t seed = 0;
};

// numeric record of the proof chain of the slicing theorem
struct ProofTrace {
  Estimate epsilon;       // max_H of the section integral of the density
  double mid_lhs = 0.0;   // mu(L)
  double mid_rhs = 0.0;   // n/(n-m) c_{n,m} |K|^{m/n} eps
  bool mid_ok = false;
  double vol_k = 0.0;
  double d_pow_n_vol_l = 0.0;  // the |K| <= d^n |L| step
  bool vol_step_ok = false;
  double containment_slack = 0.0;  // worst relative violation observed
};

struct InequalityReport {
  InequalityId id = InequalityId::HyperInt;
  Estimate lhs;
  Estimate rhs;
  double ratio = 0.0;         // lhs / rhs
  double margin_sigma = 0.0;  // (rhs - lhs) / combined sigma
  std::optional<Subspace> argmax_subspace;
  VerifierParams params;
  Verdict verdict = Verdict::Inconclusive;
  std::optional<ProofTrace> trace;
  std::optional<double> d_prime;        // smallest d passing (MainLp/CorKInt)
  std::optional<double> d_certificate;  // D(p) = d' n/(n-1) c_n when m = 1
  bool extended_search = false;
  std::string note;
  double wall_ms = 0.0;  // reported in metadata, not in comparison payloads
};

// Pass iff lhs <= rhs + 4 sigma (plus a relative fp guard for closed-form
// paths); Fail only when the estimates are high-confidence; otherwise
// Inconclusive.
Verdict decide_verdict(const Estimate& lhs, const Estimate& rhs);

InequalityReport verify_hyper_int(const StarBody& k, const QuadratureSpec& quad);

/// The open conjecture, exposed as the sqrtn2 bound with the sqrt(n) factor
/// removed. No constant claim is made: the verdict is always Exploratory and
/// the ratio is the empirical constant.
InequalityReport verify_hyper_conjecture(const StarBody& k, const DensitySpec& f,
                                         const QuadratureSpec& quad);

InequalityReport verify_arbmeas(const StarBody& k, const DensitySpec& f,
                                const QuadratureSpec& quad);

InequalityReport verify_sqrtn2(const StarBody& k, const DensitySpec& f,
                               const QuadratureSpec& quad);

/// Requires the explicit containment (1/d) K in L in K on a direction
/// sample; violations are errors, not Inconclusive verdicts. The report
/// carries the proof-trace record.
InequalityReport verify_thm1(const StarBody& l, const StarBody& k, double d,
                             int m, const DensitySpec& f,
                             const QuadratureSpec& quad);

struct MainLpOptions {
  std::vector<StarBody> candidates;
  int bm_budget = 4;
  BmOptions bm;                    // optimizer cost knobs
  bool as_k_intersection = false;  // report under the CorKInt id
};

/// K is chosen by distance_to_class over the candidate list; d is the
/// user-supplied stand-in for the non-constructive constant. Also reports the
/// smallest d' <= d for which the numeric inequality holds (bisection).
InequalityReport verify_main_lp(const StarBody& l, double d, int m,
                                const DensitySpec& f, const QuadratureSpec& quad,
                                const MainLpOptions& options);

/// Body must be tagged as the unit ball of a subspace of L_p, p > 2; the
/// distance constant is the closed-form bound n^{1/2-1/p}.
InequalityReport verify_p_gt_2(const StarBody& l, int m, const DensitySpec& f,
                               const QuadratureSpec& quad, int bm_budget = 4);

// f = 1 + g on K with g >= 0
struct StabilityInput {
  StarBody k;
  DensitySpec g;
  int m = 1;
};

InequalityReport verify_stability(const StabilityInput& input,
                                  const QuadratureSpec& quad);

// one verifier invocation, as dispatched by sweep and the CLI
struct VerifyRequest {
  InequalityId id = InequalityId::HyperInt;
  StarBody body;
  std::optional<StarBody> body_k;  // Thm1 only
  DensitySpec density;
  QuadratureSpec quad;
  int m = 1;
  std::optional<double> d;
  std::vector<StarBody> candidates;
  int bm_budget = 4;
};

InequalityReport run_verify(const VerifyRequest& request);

/// Runs entries concurrently; a failing or throwing entry never aborts the
/// rest. Reports are ordered by plan index.
std::vector<InequalityReport> sweep(const std::vector<VerifyRequest>& plan);

}  // namespace starslice
