#include "starslice/run.hpp"

#include <chrono>
#include <cmath>
#include <ctime>
#include <fstream>
#include <sstream>

#include "json_util.hpp"
#include "starslice/constants.hpp"
#include "starslice/distance.hpp"
#include "starslice/harness.hpp"
#include "starslice/parallel.hpp"
#include "starslice/radon.hpp"
#include "starslice/rng.hpp"
#include "starslice/serialize.hpp"
#include "starslice/version.hpp"

namespace starslice {

using nlohmann::json;
using namespace jsonu;

namespace {

QuadratureSpec quadrature_from(const json& doc, std::uint64_t global_seed) {
  QuadratureSpec quad;
  quad.seed = global_seed;
  if (const json* q = find(doc, "quadrature")) {
    quad.sphere_samples = get_integer_or(*q, "sphere_samples", quad.sphere_samples, "");
    quad.radial_nodes =
        static_cast<int>(get_integer_or(*q, "radial_nodes", quad.radial_nodes, ""));
    quad.subspace_samples =
        get_integer_or(*q, "subspace_samples", quad.subspace_samples, "");
    quad.refine_steps =
        static_cast<int>(get_integer_or(*q, "refine_steps", quad.refine_steps, ""));
    if (get_string_or(*q, "estimator", "monte_carlo", "") == "stratified_antithetic")
      quad.estimator = Estimator::StratifiedAntithetic;
    if (const json* s = find(*q, "seed"))
      quad.seed = static_cast<std::uint64_t>(s->get<std::int64_t>());
  }
  return quad;
}

Subspace subspace_from(const json& j, int n, std::uint64_t seed) {
  if (const json* coords = find(j, "coords")) {
    Eigen::MatrixXd basis = Eigen::MatrixXd::Zero(n, coords->size());
    int col = 0;
    for (const auto& c : *coords)
      basis(c.get<std::int64_t>(), col++) = 1.0;
    return Subspace(n, std::move(basis));
  }
  if (const json* haar = find(j, "haar_index")) {
    int m = static_cast<int>(get_integer_or(j, "m", 1, ""));
    auto idx = static_cast<std::int64_t>(haar->get<std::int64_t>());
    return haar_subspace(n, m, idx + 1, seed).back();
  }
  const json* basis = find(j, "basis");
  Eigen::MatrixXd b = [&] {
    json bt = *basis;
    Eigen::MatrixXd m(bt.size(), bt[0].size());
    for (std::size_t i = 0; i < bt.size(); ++i)
      for (std::size_t c = 0; c < bt[i].size(); ++c)
        m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(c)) =
            bt[i][c].get<double>();
    return m;
  }();
  try {
    return Subspace(n, std::move(b));
  } catch (const std::invalid_argument& e) {
    throw ConfigError("/subspace/basis", e.what());
  }
}

SphericalFunction function_from(const json& j) {
  std::string kind = j.at("kind").get<std::string>();
  int n = static_cast<int>(j.at("n").get<std::int64_t>());
  if (kind == "one") return SphericalFunction::one(n);
  if (kind == "constant")
    return SphericalFunction::constant(n, get_number_or(j, "c", 1.0, ""));
  if (kind == "coord_sq")
    return SphericalFunction::coordinate_square(
        n, static_cast<int>(j.at("index").get<std::int64_t>()));
  // abs_dot_pow
  Eigen::VectorXd u(n);
  const json& ju = j.at("u");
  for (int i = 0; i < n; ++i) u[i] = ju[static_cast<std::size_t>(i)].get<double>();
  return SphericalFunction::abs_dot_power(Direction::normalized(std::move(u)),
                                          get_number_or(j, "p", 1.0, ""));
}

DensitySpec density_for(const json& doc, int n) {
  if (const json* d = find(doc, "density"))
    return density_from_json(*d, n, "/density");
  return DensitySpec::constant(n, 1.0);
}

VerifyRequest request_from(const json& entry, std::uint64_t seed) {
  VerifyRequest req{
      inequality_id_from_name(entry.at("inequality").get<std::string>()),
      body_from_json(entry.at("body"), "/body"),
      std::nullopt,
      DensitySpec::constant(2, 1.0),  // replaced below
      quadrature_from(entry, seed),
      static_cast<int>(get_integer_or(entry, "m", 1, "")),
      std::nullopt,
      {},
      static_cast<int>(get_integer_or(entry, "bm_budget", 4, ""))};
  req.density = density_for(entry, req.body.dim());
  if (const json* bk = find(entry, "body_k"))
    req.body_k = body_from_json(*bk, "/body_k");
  if (const json* d = find(entry, "d")) req.d = d->get<double>();
  if (const json* cands = find(entry, "candidates"))
    for (std::size_t i = 0; i < cands->size(); ++i)
      req.candidates.push_back(
          body_from_json((*cands)[i], "/candidates/" + std::to_string(i)));
  return req;
}

int exit_code_for(const std::vector<InequalityReport>& reports) {
  bool any_fail = false, any_pass = false, any_inconclusive = false;
  for (const auto& r : reports) {
    if (r.verdict == Verdict::Fail || r.verdict == Verdict::Error) any_fail = true;
    if (r.verdict == Verdict::Pass || r.verdict == Verdict::Exploratory)
      any_pass = true;
    if (r.verdict == Verdict::Inconclusive) any_inconclusive = true;
  }
  if (any_fail) return 1;
  if (any_inconclusive && !any_pass) return 3;
  return 0;
}

std::string utc_timestamp() {
  auto now = std::chrono::system_clock::now();
  std::time_t t = std::chrono::system_clock::to_time_t(now);
  char buf[32];
  std::tm tm_utc{};
  gmtime_r(&t, &tm_utc);
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm_utc);
  return buf;
}

}  // namespace

RunResult run(const RunConfig& config) {
  auto t0 = std::chrono::steady_clock::now();
  const json& doc = config.doc;
  set_thread_count(config.threads());
  std::uint64_t seed = config.seed();
  std::string command = config.command();
  QuadratureSpec quad = quadrature_from(doc, seed);

  RunResult result;
  json report;

  if (command == "volume") {
    StarBody body = body_from_json(doc.at("body"), "/body");
    Estimate est = volume(body, quad);
    report = {{"body", body_to_json(body)},
              {"estimate", estimate_to_json(est)},
              {"closed_form", est.std_error == 0.0 && est.samples_used == 0}};
    std::int64_t oracle = get_integer_or(doc, "oracle_samples", 0, "");
    if (oracle > 0) {
      Estimate check = rejection_volume_oracle(
          body, DensitySpec::constant(body.dim(), 1.0), oracle,
          derive_seed(seed, 0x07AC1E));
      report["oracle"] = estimate_to_json(check);
      report["oracle_sigma_gap"] =
          std::abs(check.value - est.value) /
          std::max(1e-300, combined_sigma(check, est));
    }
  } else if (command == "section") {
    StarBody body = body_from_json(doc.at("body"), "/body");
    Subspace h = subspace_from(doc.at("subspace"), body.dim(), seed);
    Estimate est = section_volume(body, h, quad);
    report = {{"body", body_to_json(body)},
              {"subspace", subspace_to_json(h)},
              {"estimate", estimate_to_json(est)}};
  } else if (command == "max-section") {
    StarBody body = body_from_json(doc.at("body"), "/body");
    int m = static_cast<int>(get_integer_or(doc, "m", 1, ""));
    DensitySpec f = density_for(doc, body.dim());
    MaxSectionResult max = max_section(body, f, m, quad);
    report = {{"body", body_to_json(body)},
              {"m", m},
              {"density", density_to_json(f)},
              {"estimate", estimate_to_json(max.estimate)},
              {"best_sampled", estimate_to_json(max.best_sampled)},
              {"argmax_subspace", subspace_to_json(max.subspace)},
              {"semantics", "lower bound on the true maximum"}};
  } else if (command == "radon") {
    SphericalFunction g = function_from(doc.at("function"));
    Subspace h = subspace_from(doc.at("subspace"), g.dim(), seed);
    Estimate est = radon_transform(g, h, quad);
    report = {{"function", doc.at("function")},
              {"subspace", subspace_to_json(h)},
              {"estimate", estimate_to_json(est)}};
  } else if (command == "intersection-body") {
    StarBody body = body_from_json(doc.at("body"), "/body");
    IntersectionBodyOptions options;
    options.resolution = static_cast<int>(get_integer_or(doc, "resolution", 0, ""));
    StarBody k = intersection_body_of(body, quad, options);
    json document = grid_document(k);
    document["meta"] = {{"source_body", body_to_json(body)},
                        {"sphere_samples", quad.sphere_samples},
                        {"seed", quad.seed}};
    report = std::move(document);
  } else if (command == "distance") {
    std::string kind = doc.at("kind").get<std::string>();
    StarBody body = body_from_json(doc.at("body"), "/body");
    int budget = static_cast<int>(get_integer_or(doc, "budget", 8, ""));
    if (kind == "geometric") {
      StarBody body2 = body_from_json(doc.at("body2"), "/body2");
      DistanceResult r = geometric_distance(body, body2);
      report = {{"kind", kind}, {"result", distance_result_to_json(r)}};
    } else if (kind == "bm") {
      StarBody body2 = body_from_json(doc.at("body2"), "/body2");
      DistanceResult r = bm_distance_upper(body, body2, budget, seed);
      report = {{"kind", kind}, {"result", distance_result_to_json(r)}};
    } else {
      std::vector<StarBody> candidates;
      const json& cands = doc.at("candidates");
      for (std::size_t i = 0; i < cands.size(); ++i)
        candidates.push_back(
            body_from_json(cands[i], "/candidates/" + std::to_string(i)));
      int class_m = static_cast<int>(get_integer_or(doc, "class_m", 1, ""));
      ToClassResult r = distance_to_class(
          body,
          ClassTag{ClassKind::GeneralizedMIntersection,
                   static_cast<double>(class_m)},
          candidates, budget, seed);
      report = {{"kind", kind},
                {"result", distance_result_to_json(r.distance)},
                {"candidate_index", r.candidate_index}};
    }
  } else if (command == "constant") {
    std::string name = doc.at("name").get<std::string>();
    int n = static_cast<int>(doc.at("n").get<std::int64_t>());
    double value = 0.0;
    json params{{"n", n}};
    if (name == "ball-volume") {
      value = ball_volume(n);
    } else if (name == "cnm") {
      int m = static_cast<int>(doc.at("m").get<std::int64_t>());
      value = c_nm(n, m);
      params["m"] = m;
    } else {
      double p = doc.at("p").get<double>();
      value = lewis_bound(n, p);
      params["p"] = p;
    }
    report = {{"name", name}, {"params", std::move(params)}, {"value", value}};
  } else if (command == "verify") {
    VerifyRequest req = request_from(doc, seed);
    InequalityReport r = run_verify(req);
    report = report_to_json(r);
    result.exit_code = exit_code_for({r});
  } else if (command == "sweep") {
    const json& plan = doc.at("plan");
    std::vector<VerifyRequest> requests;
    requests.reserve(plan.size());
    // per-entry seed derivation; an entry-level quadrature.seed wins
    for (std::size_t i = 0; i < plan.size(); ++i)
      requests.push_back(request_from(plan[i], derive_seed(seed, 0x5EE9, i)));
    std::vector<InequalityReport> reports = sweep(requests);
    json rows = json::array();
    std::ostringstream csv;
    csv << report_csv_header() << '\n';
    for (const auto& r : reports) {
      rows.push_back(report_to_json(r));
      csv << report_csv_row(r) << '\n';
    }
    report = {{"reports", std::move(rows)}};
    result.csv = csv.str();
    result.exit_code = exit_code_for(reports);
  }

  double wall_ms = std::chrono::duration<double, std::milli>(
                       std::chrono::steady_clock::now() - t0)
                       .count();
  result.envelope = {
      {"schema", "starslice.report.v1"},
      {"command", command},
      {"report", std::move(report)},
      {"meta",
       {{"build_id", kBuildId},
        {"version", kVersion},
        {"config_hash", config_hash(config)},
        {"seed", seed},
        {"threads", thread_count()},
        {"timestamp_utc", utc_timestamp()},
        {"wall_ms", wall_ms}}},
  };

  std::string path = config.output_path();
  if (!path.empty() && path != "-") {
    std::ofstream out(path);
    if (!out)
      throw std::runtime_error("cannot open output file: " + path);
    if (config.output_format() == "csv" && !result.csv.empty())
      out << result.csv;
    else
      out << result.envelope.dump(2) << '\n';
    if (!out)
      throw std::runtime_error("failed writing output file: " + path);
  }
  return result;
}

}  // namespace starslice
