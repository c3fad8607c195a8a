#include "starslice/serialize.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "json_util.hpp"

namespace starslice {

using nlohmann::json;
using namespace jsonu;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

json matrix_to_json(const Eigen::MatrixXd& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

Eigen::MatrixXd matrix_from_json(const json& j, const std::string& path) {
  if (!j.is_array() || j.empty())
    throw ConfigError(path, "expected a non-empty array of rows");
  std::size_t cols = 0;
  for (const auto& row : j) {
    if (!row.is_array() || row.empty())
      throw ConfigError(path, "expected rows of numbers");
    if (cols == 0) cols = row.size();
    if (row.size() != cols) throw ConfigError(path, "ragged matrix");
  }
  Eigen::MatrixXd m(j.size(), cols);
  for (std::size_t i = 0; i < j.size(); ++i)
    for (std::size_t c = 0; c < cols; ++c) {
      if (!j[i][c].is_number())
        throw ConfigError(path, "matrix entries must be numbers");
      m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(c)) =
          j[i][c].get<double>();
    }
  return m;
}

Eigen::VectorXd vector_from_json(const json& j, const std::string& path) {
  if (!j.is_array() || j.empty())
    throw ConfigError(path, "expected a non-empty array of numbers");
  Eigen::VectorXd v(j.size());
  for (std::size_t i = 0; i < j.size(); ++i) {
    if (!j[i].is_number()) throw ConfigError(path, "expected numbers");
    v[static_cast<Eigen::Index>(i)] = j[i].get<double>();
  }
  return v;
}

json vector_to_json(const Eigen::VectorXd& v) {
  json a = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v[i]);
  return a;
}

// p may be the string "inf"
double lp_exponent_from_json(const json& j, const std::string& path) {
  if (j.is_string()) {
    std::string s = j.get<std::string>();
    if (s == "inf" || s == "infinity") return kInf;
    throw ConfigError(path, "p must be a positive number or \"inf\"");
  }
  if (!j.is_number()) throw ConfigError(path, "p must be a number or \"inf\"");
  double p = j.get<double>();
  if (!(p > 0.0)) throw ConfigError(path, "p must be > 0");
  return p;
}

json lp_exponent_to_json(double p) {
  if (p == kInf) return json("inf");
  return json(p);
}

std::string grid_kind_name(GridKind kind) {
  switch (kind) {
    case GridKind::Angular: return "angular";
    case GridKind::Icosahedral: return "icosahedral";
    case GridKind::CapBlend: return "cap-blend";
  }
  return "?";
}

std::string interpolation_name(GridKind kind) {
  switch (kind) {
    case GridKind::Angular: return "angular-linear";
    case GridKind::Icosahedral: return "spherical-barycentric";
    case GridKind::CapBlend: return "cap-blend";
  }
  return "?";
}

// CSV cells: full round-trip precision, locale-independent
std::string csv_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

}  // namespace

json estimate_to_json(const Estimate& e) {
  return json{{"value", e.value},
              {"std_error", e.std_error},
              {"samples_used", e.samples_used}};
}

json subspace_to_json(const Subspace& h) {
  return json{{"ambient_dim", h.ambient_dim()},
              {"codim", h.codim()},
              {"basis", matrix_to_json(h.basis())}};
}

json body_to_json(const StarBody& body) {
  switch (body.family()) {
    case BodyFamily::EuclideanBall:
      return json{{"family", "ball"}, {"n", body.dim()}, {"radius", body.radius()}};
    case BodyFamily::LpBall:
      return json{{"family", "lp"},
                  {"n", body.dim()},
                  {"p", lp_exponent_to_json(body.lp_exponent())},
                  {"scale", body.lp_scale()}};
    case BodyFamily::Ellipsoid:
      return json{{"family", "ellipsoid"},
                  {"matrix", matrix_to_json(body.quadratic_form())}};
    case BodyFamily::LinearImage:
      return json{{"family", "linear_image"},
                  {"inner", body_to_json(body.inner())},
                  {"matrix", matrix_to_json(body.transform())}};
    case BodyFamily::RadialGrid:
      return json{{"family", "radial_grid"}, {"document", grid_document(body)}};
    case BodyFamily::Restriction:
      return json{{"family", "restriction"},
                  {"inner", body_to_json(body.inner())},
                  {"basis", matrix_to_json(body.restriction_basis())}};
  }
  throw std::logic_error("body_to_json: unhandled family");
}

StarBody body_from_json(const json& j, const std::string& path) {
  require_object(j, path);
  std::string family = get_string(j, "family", path);
  if (family == "ball") {
    require_keys(j, path, {"family", "n", "radius"});
    int n = static_cast<int>(get_integer(j, "n", path));
    double radius = get_number_or(j, "radius", 1.0, path);
    if (n < 2) throw ConfigError(path + "/n", "dimension must be >= 2");
    if (!(radius > 0.0)) throw ConfigError(path + "/radius", "radius must be > 0");
    return StarBody::euclidean_ball(n, radius);
  }
  if (family == "lp") {
    require_keys(j, path, {"family", "n", "p", "scale"});
    int n = static_cast<int>(get_integer(j, "n", path));
    if (n < 2) throw ConfigError(path + "/n", "dimension must be >= 2");
    const json* p = find(j, "p");
    if (p == nullptr) throw ConfigError(path + "/p", "missing required key");
    double exponent = lp_exponent_from_json(*p, path + "/p");
    double scale = get_number_or(j, "scale", 1.0, path);
    if (!(scale > 0.0)) throw ConfigError(path + "/scale", "scale must be > 0");
    return StarBody::lp_ball(n, exponent, scale);
  }
  if (family == "cube") {
    require_keys(j, path, {"family", "n", "half_side"});
    int n = static_cast<int>(get_integer(j, "n", path));
    if (n < 2) throw ConfigError(path + "/n", "dimension must be >= 2");
    double h = get_number_or(j, "half_side", 1.0, path);
    if (!(h > 0.0)) throw ConfigError(path + "/half_side", "must be > 0");
    return StarBody::cube(n, h);
  }
  if (family == "ellipsoid") {
    require_keys(j, path, {"family", "axes", "matrix"});
    const json* axes = find(j, "axes");
    const json* matrix = find(j, "matrix");
    if ((axes != nullptr) == (matrix != nullptr))
      throw ConfigError(path, "ellipsoid needs exactly one of axes / matrix");
    try {
      if (axes != nullptr)
        return StarBody::ellipsoid_from_axes(
            vector_from_json(*axes, path + "/axes"));
      return StarBody::ellipsoid(matrix_from_json(*matrix, path + "/matrix"));
    } catch (const std::invalid_argument& e) {
      throw ConfigError(path, e.what());
    }
  }
  if (family == "linear_image") {
    require_keys(j, path, {"family", "inner", "matrix"});
    const json* inner = find(j, "inner");
    const json* matrix = find(j, "matrix");
    if (inner == nullptr) throw ConfigError(path + "/inner", "missing required key");
    if (matrix == nullptr) throw ConfigError(path + "/matrix", "missing required key");
    StarBody base = body_from_json(*inner, path + "/inner");
    try {
      return StarBody::linear_image(std::move(base),
                                    matrix_from_json(*matrix, path + "/matrix"));
    } catch (const std::invalid_argument& e) {
      throw ConfigError(path + "/matrix", e.what());
    }
  }
  if (family == "radial_grid") {
    require_keys(j, path, {"family", "path", "document"});
    const json* file = find(j, "path");
    const json* doc = find(j, "document");
    if ((file != nullptr) == (doc != nullptr))
      throw ConfigError(path, "radial_grid needs exactly one of path / document");
    if (doc != nullptr) return grid_from_document(*doc, path + "/document");
    if (!file->is_string()) throw ConfigError(path + "/path", "expected a string");
    std::ifstream in(file->get<std::string>());
    if (!in)
      throw ConfigError(path + "/path",
                        "cannot open " + file->get<std::string>());
    json loaded;
    try {
      loaded = json::parse(in);
    } catch (const json::parse_error& e) {
      throw ConfigError(path + "/path", e.what());
    }
    return grid_from_document(loaded, path + "/path");
  }
  if (family == "restriction") {
    require_keys(j, path, {"family", "inner", "basis"});
    const json* inner = find(j, "inner");
    const json* basis = find(j, "basis");
    if (inner == nullptr) throw ConfigError(path + "/inner", "missing required key");
    if (basis == nullptr) throw ConfigError(path + "/basis", "missing required key");
    StarBody base = body_from_json(*inner, path + "/inner");
    Eigen::MatrixXd b = matrix_from_json(*basis, path + "/basis");
    try {
      return subspace_restrict(base, Subspace(base.dim(), std::move(b)));
    } catch (const std::invalid_argument& e) {
      throw ConfigError(path + "/basis", e.what());
    }
  }
  throw ConfigError(path + "/family", "unknown family: " + family);
}

json density_to_json(const DensitySpec& f) {
  switch (f.kind()) {
    case DensityKind::Constant:
      return json{{"kind", "constant"}, {"c", f.constant_value()}};
    case DensityKind::Gaussian:
      return json{{"kind", "gaussian"}, {"sigma", f.sigma()}};
    case DensityKind::GeneralizedGaussian:
      return json{{"kind", "gen_gaussian"},
                  {"q", f.gg_exponent()},
                  {"s", f.gg_scale()}};
    case DensityKind::Product:
      return json{{"kind", "product"},
                  {"a", density_to_json(f.factor_a())},
                  {"b", density_to_json(f.factor_b())}};
  }
  throw std::logic_error("density_to_json: unhandled kind");
}

DensitySpec density_from_json(const json& j, int dim, const std::string& path) {
  require_object(j, path);
  std::string kind = get_string(j, "kind", path);
  try {
    if (kind == "constant") {
      require_keys(j, path, {"kind", "c"});
      return DensitySpec::constant(dim, get_number_or(j, "c", 1.0, path));
    }
    if (kind == "gaussian") {
      require_keys(j, path, {"kind", "sigma"});
      double sigma = get_number_or(j, "sigma", 1.0, path);
      if (!(sigma > 0.0)) throw ConfigError(path + "/sigma", "sigma must be > 0");
      return DensitySpec::gaussian(dim, sigma);
    }
    if (kind == "gen_gaussian") {
      require_keys(j, path, {"kind", "q", "s"});
      double q = get_number_or(j, "q", 2.0, path);
      double s = get_number_or(j, "s", 1.0, path);
      if (!(q > 0.0)) throw ConfigError(path + "/q", "q must be > 0");
      if (!(s > 0.0)) throw ConfigError(path + "/s", "s must be > 0");
      return DensitySpec::generalized_gaussian(dim, q, s);
    }
    if (kind == "product") {
      require_keys(j, path, {"kind", "a", "b"});
      const json* a = find(j, "a");
      const json* b = find(j, "b");
      if (a == nullptr || b == nullptr)
        throw ConfigError(path, "product needs factors a and b");
      return DensitySpec::product(density_from_json(*a, dim, path + "/a"),
                                  density_from_json(*b, dim, path + "/b"));
    }
  } catch (const std::invalid_argument& e) {
    throw ConfigError(path, e.what());
  }
  throw ConfigError(path + "/kind", "unknown density kind: " + kind);
}

json grid_document(const StarBody& grid_body) {
  if (grid_body.family() != BodyFamily::RadialGrid)
    throw std::invalid_argument("grid_document: body is not a radial grid");
  const SphereGrid& grid = grid_body.grid();
  json nodes = json::array();
  for (std::size_t i = 0; i < grid.pair_count(); ++i)
    nodes.push_back(vector_to_json(grid.pair_direction(i)));
  return json{
      {"schema", "starslice.grid.v1"},
      {"dim", grid.dim()},
      {"kind", grid_kind_name(grid.kind())},
      {"resolution", grid.resolution()},
      {"grid_seed", grid.seed()},
      {"interpolation", interpolation_name(grid.kind())},
      {"values", grid_body.grid_values()},
      {"nodes", std::move(nodes)},
      {"provenance",
       grid_body.grid_provenance() == GridProvenance::SectionVolumes
           ? "intersection-body"
           : "tabulated"},
  };
}

StarBody grid_from_document(const json& doc, const std::string& path) {
  require_keys(doc, path,
               {"schema", "dim", "kind", "resolution", "grid_seed",
                "interpolation", "values", "nodes", "provenance", "meta"});
  std::string schema = get_string(doc, "schema", path);
  if (schema != "starslice.grid.v1")
    throw ConfigError(path + "/schema", "unsupported schema: " + schema);
  int dim = static_cast<int>(get_integer(doc, "dim", path));
  int resolution = static_cast<int>(get_integer(doc, "resolution", path));
  std::uint64_t seed =
      static_cast<std::uint64_t>(get_integer_or(doc, "grid_seed", 0, path));
  SphereGrid grid = SphereGrid::standard(dim, resolution, seed);

  const json* values = find(doc, "values");
  if (values == nullptr || !values->is_array())
    throw ConfigError(path + "/values", "expected an array");
  if (values->size() != grid.pair_count())
    throw ConfigError(path + "/values",
                      "value count does not match the grid (" +
                          std::to_string(values->size()) + " vs " +
                          std::to_string(grid.pair_count()) + ")");
  std::vector<double> vals;
  vals.reserve(values->size());
  for (const auto& v : *values) {
    if (!v.is_number()) throw ConfigError(path + "/values", "expected numbers");
    vals.push_back(v.get<double>());
  }

  // spot-check the first declared node against the rebuilt grid
  const json* nodes = find(doc, "nodes");
  if (nodes != nullptr && nodes->is_array() && !nodes->empty()) {
    Eigen::VectorXd first =
        vector_from_json((*nodes)[0], path + "/nodes/0");
    if (first.size() != dim ||
        (first - grid.pair_direction(0)).norm() > 1e-9)
      throw ConfigError(path + "/nodes", "nodes disagree with the rebuilt grid");
  }

  std::string prov = get_string_or(doc, "provenance", "tabulated", path);
  GridProvenance provenance = prov == "intersection-body"
                                  ? GridProvenance::SectionVolumes
                                  : GridProvenance::Tabulated;
  try {
    return StarBody::radial_grid(std::move(grid), std::move(vals), provenance);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(path, e.what());
  }
}

json distance_result_to_json(const DistanceResult& r) {
  json j{{"value", r.value}, {"witness_scale", r.witness_scale}};
  switch (r.certified) {
    case DistanceCertificate::ExactGrid: j["certified"] = "exact-grid"; break;
    case DistanceCertificate::SampledLowerBound:
      j["certified"] = "sampled-lower-bound";
      break;
    case DistanceCertificate::OptimizedUpperBound:
      j["certified"] = "optimized-upper-bound";
      break;
  }
  if (r.witness_map) j["witness_map"] = matrix_to_json(*r.witness_map);
  return j;
}

namespace {
json finite_or_null(double v) {
  if (std::isfinite(v)) return json(v);
  return json();  // inf / nan have no JSON literal
}
}  // namespace

json report_to_json(const InequalityReport& report) {
  json params{{"n", report.params.n},
              {"m", report.params.m},
              {"family", report.params.family},
              {"density", report.params.density},
              {"seed", report.params.seed}};
  if (report.params.p_or_k) params["p"] = *report.params.p_or_k;
  if (report.params.d) params["d"] = *report.params.d;

  json j{{"inequality_id", inequality_id_name(report.id)},
         {"lhs", estimate_to_json(report.lhs)},
         {"rhs", estimate_to_json(report.rhs)},
         {"ratio", finite_or_null(report.ratio)},
         {"margin_sigma", finite_or_null(report.margin_sigma)},
         {"verdict", verdict_name(report.verdict)},
         {"params", std::move(params)},
         {"extended_search", report.extended_search}};
  if (report.argmax_subspace)
    j["argmax_subspace"] = subspace_to_json(*report.argmax_subspace);
  if (report.trace) {
    const ProofTrace& t = *report.trace;
    j["proof_trace"] = json{{"epsilon", estimate_to_json(t.epsilon)},
                            {"mid_lhs", t.mid_lhs},
                            {"mid_rhs", t.mid_rhs},
                            {"mid_ok", t.mid_ok},
                            {"vol_k", t.vol_k},
                            {"d_pow_n_vol_l", t.d_pow_n_vol_l},
                            {"vol_step_ok", t.vol_step_ok},
                            {"containment_slack", t.containment_slack}};
  }
  if (report.d_prime) j["d_prime"] = *report.d_prime;
  if (report.d_certificate) j["d_certificate"] = *report.d_certificate;
  if (!report.note.empty()) j["note"] = report.note;
  return j;
}

std::string report_csv_header() {
  return "inequality_id,n,m,family,p,d,lhs,rhs,ratio,sigma,verdict,seed,wall_ms";
}

std::string report_csv_row(const InequalityReport& report) {
  std::ostringstream os;
  os << inequality_id_name(report.id) << ',' << report.params.n << ','
     << report.params.m << ',' << report.params.family << ',';
  if (report.params.p_or_k) os << csv_number(*report.params.p_or_k);
  os << ',';
  if (report.params.d) os << csv_number(*report.params.d);
  os << ',' << csv_number(report.lhs.value) << ','
     << csv_number(report.rhs.value) << ',' << csv_number(report.ratio) << ','
     << csv_number(combined_sigma(report.lhs, report.rhs)) << ','
     << verdict_name(report.verdict) << ',' << report.params.seed << ','
     << csv_number(report.wall_ms);
  return os.str();
}

}  // namespace starslice
