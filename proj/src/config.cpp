#include "starslice/config.hpp"

#include <set>
#include <vector>

#include "json_util.hpp"
#include "starslice/harness.hpp"
#include "starslice/serialize.hpp"

namespace starslice {

using nlohmann::json;
using namespace jsonu;

namespace {

const std::set<std::string> kCommands = {
    "volume",   "section",  "max-section", "radon", "intersection-body",
    "distance", "constant", "verify",      "sweep"};

void check_quadrature(const json& j, const std::string& path) {
  require_keys(j, path,
               {"sphere_samples", "radial_nodes", "subspace_samples",
                "refine_steps", "estimator", "seed"});
  if (get_integer_or(j, "sphere_samples", 8192, path) < 1)
    throw ConfigError(path + "/sphere_samples", "must be >= 1");
  if (get_integer_or(j, "radial_nodes", 64, path) < 1)
    throw ConfigError(path + "/radial_nodes", "must be >= 1");
  if (get_integer_or(j, "subspace_samples", 200, path) < 1)
    throw ConfigError(path + "/subspace_samples", "must be >= 1");
  if (get_integer_or(j, "refine_steps", 50, path) < 0)
    throw ConfigError(path + "/refine_steps", "must be >= 0");
  std::string est = get_string_or(j, "estimator", "monte_carlo", path);
  if (est != "monte_carlo" && est != "stratified_antithetic")
    throw ConfigError(path + "/estimator", "unknown estimator: " + est);
}

int body_dim(const json& config, const char* key, const std::string& path) {
  const json* b = find(config, key);
  if (b == nullptr)
    throw ConfigError(path + "/" + key, "missing required key");
  return body_from_json(*b, path + "/" + key).dim();
}

void check_subspace(const json& j, int n, const std::string& path) {
  require_keys(j, path, {"coords", "haar_index", "m", "basis"});
  const json* coords = find(j, "coords");
  const json* haar = find(j, "haar_index");
  const json* basis = find(j, "basis");
  int ways = (coords != nullptr) + (haar != nullptr) + (basis != nullptr);
  if (ways != 1)
    throw ConfigError(path, "need exactly one of coords / haar_index / basis");
  if (coords != nullptr) {
    if (!coords->is_array() || coords->empty())
      throw ConfigError(path + "/coords", "expected a non-empty index array");
    std::set<std::int64_t> seen;
    for (const auto& c : *coords) {
      if (!c.is_number_integer())
        throw ConfigError(path + "/coords", "expected integer indices");
      std::int64_t idx = c.get<std::int64_t>();
      if (idx < 0 || idx >= n)
        throw ConfigError(path + "/coords", "index out of range");
      if (!seen.insert(idx).second)
        throw ConfigError(path + "/coords", "repeated index");
    }
    if (static_cast<int>(seen.size()) >= n)
      throw ConfigError(path + "/coords", "codimension out of range");
  }
  if (haar != nullptr) {
    int m = static_cast<int>(get_integer_or(j, "m", 1, path));
    if (m < 1 || m >= n)
      throw ConfigError(path + "/m", "codimension out of range");
    if (!haar->is_number_integer() || haar->get<std::int64_t>() < 0)
      throw ConfigError(path + "/haar_index", "expected an index >= 0");
  }
  if (basis != nullptr) {
    // surface shape errors early; orthonormality is validated on build
    if (!basis->is_array() || basis->empty())
      throw ConfigError(path + "/basis", "expected a matrix");
  }
}

void check_function(const json& j, const std::string& path) {
  require_keys(j, path, {"kind", "n", "index", "u", "p", "c"});
  std::string kind = get_string(j, "kind", path);
  int n = static_cast<int>(get_integer(j, "n", path));
  if (n < 2) throw ConfigError(path + "/n", "dimension must be >= 2");
  if (kind == "one" || kind == "constant") return;
  if (kind == "coord_sq") {
    std::int64_t idx = get_integer(j, "index", path);
    if (idx < 0 || idx >= n)
      throw ConfigError(path + "/index", "index out of range");
    return;
  }
  if (kind == "abs_dot_pow") {
    const json* u = find(j, "u");
    if (u == nullptr || !u->is_array() || static_cast<int>(u->size()) != n)
      throw ConfigError(path + "/u", "expected a length-n vector");
    if (!(get_number_or(j, "p", 1.0, path) > 0.0))
      throw ConfigError(path + "/p", "p must be > 0");
    return;
  }
  throw ConfigError(path + "/kind", "unknown function kind: " + kind);
}

void check_density(const json& config, int n, const std::string& path) {
  const json* d = find(config, "density");
  if (d == nullptr) return;
  density_from_json(*d, n, path + "/density");
}

void check_m_for(const json& config, int n, const std::string& path) {
  std::int64_t m = get_integer_or(config, "m", 1, path);
  if (m < 1 || m >= n) throw ConfigError(path + "/m", "codimension out of range");
}

void check_verify_entry(const json& entry, const std::string& path,
                        std::initializer_list<const char*> extra_allowed) {
  std::vector<const char*> allowed = {"inequality", "body",       "body_k",
                                      "density",    "m",          "d",
                                      "candidates", "bm_budget"};
  for (const char* e : extra_allowed) allowed.push_back(e);
  require_object(entry, path);
  for (auto it = entry.begin(); it != entry.end(); ++it) {
    bool ok = false;
    for (const char* a : allowed)
      if (it.key() == a) ok = true;
    if (!ok) throw ConfigError(path + "/" + it.key(), "unknown key");
  }

  std::string id_name = get_string(entry, "inequality", path);
  InequalityId id;
  try {
    id = inequality_id_from_name(id_name);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(path + "/inequality", e.what());
  }
  int n = body_dim(entry, "body", path);
  check_m_for(entry, n, path);
  check_density(entry, n, path);
  if (const json* q = find(entry, "quadrature"))
    check_quadrature(*q, path + "/quadrature");

  if (id == InequalityId::Thm1) {
    if (find(entry, "body_k") == nullptr)
      throw ConfigError(path + "/body_k", "thm1 requires the normalized body K");
    int nk = body_dim(entry, "body_k", path);
    if (nk != n) throw ConfigError(path + "/body_k", "dimension mismatch");
    if (!(get_number_or(entry, "d", 0.0, path) > 0.0))
      throw ConfigError(path + "/d", "thm1 requires d > 0");
  }
  if (id == InequalityId::MainLp || id == InequalityId::CorKInt) {
    if (!(get_number_or(entry, "d", 0.0, path) > 0.0))
      throw ConfigError(path + "/d", "requires d > 0");
    const json* cands = find(entry, "candidates");
    if (cands == nullptr || !cands->is_array() || cands->empty())
      throw ConfigError(path + "/candidates", "requires a candidate list");
    for (std::size_t i = 0; i < cands->size(); ++i)
      body_from_json((*cands)[i], path + "/candidates/" + std::to_string(i));
  }
  if (get_integer_or(entry, "bm_budget", 4, path) < 1)
    throw ConfigError(path + "/bm_budget", "must be >= 1");
}

void check_output(const json& j, const std::string& path) {
  require_keys(j, path, {"path", "format"});
  std::string format = get_string_or(j, "format", "json", path);
  if (format != "json" && format != "csv")
    throw ConfigError(path + "/format", "format must be json or csv");
}

void check_top_level(const json& doc) {
  const std::string path = "";
  require_object(doc, "config");
  std::string command = get_string(doc, "command", path);
  if (kCommands.find(command) == kCommands.end())
    throw ConfigError("/command", "unknown command: " + command);

  std::vector<const char*> allowed = {"command", "seed", "threads", "output",
                                      "quadrature"};
  auto allow = [&](std::initializer_list<const char*> extra) {
    for (const char* e : extra) allowed.push_back(e);
  };
  if (command == "volume") allow({"body", "oracle_samples"});
  if (command == "section") allow({"body", "subspace"});
  if (command == "max-section") allow({"body", "density", "m"});
  if (command == "radon") allow({"function", "subspace"});
  if (command == "intersection-body") allow({"body", "resolution"});
  if (command == "distance")
    allow({"kind", "body", "body2", "candidates", "budget", "class_m"});
  if (command == "constant") allow({"name", "n", "m", "p"});
  if (command == "verify")
    allow({"inequality", "body", "body_k", "density", "m", "d", "candidates",
           "bm_budget"});
  if (command == "sweep") allow({"plan"});

  for (auto it = doc.begin(); it != doc.end(); ++it) {
    bool ok = false;
    for (const char* a : allowed)
      if (it.key() == a) ok = true;
    if (!ok) throw ConfigError("/" + it.key(), "unknown key");
  }

  if (get_integer_or(doc, "threads", 0, path) < 0)
    throw ConfigError("/threads", "threads must be >= 0");
  if (const json* q = find(doc, "quadrature")) check_quadrature(*q, "/quadrature");
  if (const json* out = find(doc, "output")) check_output(*out, "/output");

  if (command == "volume") {
    int n = body_dim(doc, "body", path);
    (void)n;
    if (get_integer_or(doc, "oracle_samples", 0, path) < 0)
      throw ConfigError("/oracle_samples", "must be >= 0");
  } else if (command == "section") {
    int n = body_dim(doc, "body", path);
    const json* sub = find(doc, "subspace");
    if (sub == nullptr) throw ConfigError("/subspace", "missing required key");
    check_subspace(*sub, n, "/subspace");
  } else if (command == "max-section") {
    int n = body_dim(doc, "body", path);
    check_m_for(doc, n, path);
    check_density(doc, n, path);
  } else if (command == "radon") {
    const json* fn = find(doc, "function");
    if (fn == nullptr) throw ConfigError("/function", "missing required key");
    check_function(*fn, "/function");
    int n = static_cast<int>(get_integer(*fn, "n", "/function"));
    const json* sub = find(doc, "subspace");
    if (sub == nullptr) throw ConfigError("/subspace", "missing required key");
    check_subspace(*sub, n, "/subspace");
  } else if (command == "intersection-body") {
    body_dim(doc, "body", path);
    if (get_integer_or(doc, "resolution", 0, path) < 0)
      throw ConfigError("/resolution", "must be >= 0");
  } else if (command == "distance") {
    std::string kind = get_string(doc, "kind", path);
    if (kind != "geometric" && kind != "bm" && kind != "to-class")
      throw ConfigError("/kind", "kind must be geometric, bm or to-class");
    int n = body_dim(doc, "body", path);
    if (kind == "to-class") {
      const json* cands = find(doc, "candidates");
      if (cands == nullptr || !cands->is_array() || cands->empty())
        throw ConfigError("/candidates", "to-class requires candidates");
      for (std::size_t i = 0; i < cands->size(); ++i) {
        StarBody c =
            body_from_json((*cands)[i], "/candidates/" + std::to_string(i));
        if (c.dim() != n)
          throw ConfigError("/candidates/" + std::to_string(i),
                            "dimension mismatch");
      }
      std::int64_t cm = get_integer_or(doc, "class_m", 1, path);
      if (cm < 1 || cm >= n) throw ConfigError("/class_m", "codimension out of range");
    } else {
      int n2 = body_dim(doc, "body2", path);
      if (n2 != n) throw ConfigError("/body2", "dimension mismatch");
    }
    if (get_integer_or(doc, "budget", 8, path) < 1)
      throw ConfigError("/budget", "budget must be >= 1");
  } else if (command == "constant") {
    std::string name = get_string(doc, "name", path);
    if (name != "ball-volume" && name != "cnm" && name != "lewis")
      throw ConfigError("/name", "name must be ball-volume, cnm or lewis");
    std::int64_t n = get_integer(doc, "n", path);
    if (name == "ball-volume" && n < 0)
      throw ConfigError("/n", "n must be >= 0");
    if (name == "cnm") {
      if (n < 2) throw ConfigError("/n", "n must be >= 2");
      std::int64_t m = get_integer(doc, "m", path);
      if (m < 1 || m >= n) throw ConfigError("/m", "codimension out of range");
    }
    if (name == "lewis") {
      if (n < 1) throw ConfigError("/n", "n must be >= 1");
      if (!(get_number(doc, "p", path) > 2.0))
        throw ConfigError("/p", "lewis requires p > 2");
    }
  } else if (command == "verify") {
    check_verify_entry(doc, "",
                       {"command", "seed", "threads", "output", "quadrature"});
  } else if (command == "sweep") {
    const json* plan = find(doc, "plan");
    if (plan == nullptr || !plan->is_array())
      throw ConfigError("/plan", "sweep requires a plan array");
    for (std::size_t i = 0; i < plan->size(); ++i)
      check_verify_entry((*plan)[i], "/plan/" + std::to_string(i),
                         {"quadrature"});
  }
}

}  // namespace

std::string RunConfig::command() const {
  return doc.at("command").get<std::string>();
}

std::uint64_t RunConfig::seed() const {
  return static_cast<std::uint64_t>(get_integer_or(doc, "seed", 0, ""));
}

int RunConfig::threads() const {
  return static_cast<int>(get_integer_or(doc, "threads", 0, ""));
}

std::string RunConfig::output_path() const {
  const json* out = find(doc, "output");
  if (out == nullptr) return "";
  return get_string_or(*out, "path", "", "/output");
}

std::string RunConfig::output_format() const {
  const json* out = find(doc, "output");
  if (out == nullptr) return command() == "sweep" ? "csv" : "json";
  return get_string_or(*out, "format", command() == "sweep" ? "csv" : "json",
                       "/output");
}

RunConfig parse_config(const std::string& text) {
  // duplicate keys are rejected (not last-wins) via the parser callback
  std::vector<std::set<std::string>> stack;
  std::vector<std::string> key_path;
  json::parser_callback_t cb = [&](int depth, json::parse_event_t event,
                                   json& parsed) {
    (void)depth;
    if (event == json::parse_event_t::object_start) {
      stack.emplace_back();
      key_path.emplace_back();
    } else if (event == json::parse_event_t::object_end) {
      stack.pop_back();
      key_path.pop_back();
    } else if (event == json::parse_event_t::key) {
      std::string key = parsed.get<std::string>();
      key_path.back() = key;
      if (!stack.back().insert(key).second) {
        std::string where;
        for (const auto& k : key_path) where += "/" + k;
        throw ConfigError(where, "duplicate key");
      }
    }
    return true;
  };
  json doc;
  try {
    doc = json::parse(text, cb);
  } catch (const json::parse_error& e) {
    throw ConfigError("/", e.what());
  }
  return validate_config(std::move(doc));
}

RunConfig validate_config(json doc) {
  check_top_level(doc);
  return RunConfig{std::move(doc)};
}

std::string serialize(const RunConfig& config) { return config.doc.dump(); }

std::uint64_t config_hash(const RunConfig& config) {
  // FNV-1a over the canonical serialization
  std::string s = serialize(config);
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

}  // namespace starslice
