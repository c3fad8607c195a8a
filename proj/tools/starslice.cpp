// starslice: sections, volumes, Radon transforms, intersection bodies,
// distances, and slicing-inequality verification for origin-symmetric star
// bodies.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "starslice/config.hpp"
#include "starslice/run.hpp"
#include "starslice/version.hpp"

namespace {

using nlohmann::json;

// compact body specs for flags:
//   ball:N[:RADIUS]  lp:N:P[:SCALE]  cube:N[:HALF_SIDE]
//   ellipsoid:A1,A2,...  grid:PATH
// P accepts "inf". JSON specs are passed through unchanged.
json body_spec_from_string(const std::string& text) {
  if (!text.empty() && text.front() == '{') return json::parse(text);
  std::vector<std::string> parts;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ':')) parts.push_back(item);
  if (parts.empty()) throw CLI::ValidationError("empty body spec");
  const std::string& family = parts[0];
  auto num = [&](std::size_t i) { return std::stod(parts.at(i)); };
  auto integer = [&](std::size_t i) { return std::stoi(parts.at(i)); };
  if (family == "ball") {
    json j{{"family", "ball"}, {"n", integer(1)}};
    if (parts.size() > 2) j["radius"] = num(2);
    return j;
  }
  if (family == "lp") {
    json j{{"family", "lp"}, {"n", integer(1)}};
    j["p"] = parts.at(2) == "inf" ? json("inf") : json(num(2));
    if (parts.size() > 3) j["scale"] = num(3);
    return j;
  }
  if (family == "cube") {
    json j{{"family", "cube"}, {"n", integer(1)}};
    if (parts.size() > 2) j["half_side"] = num(2);
    return j;
  }
  if (family == "ellipsoid") {
    json axes = json::array();
    std::stringstream as(parts.at(1));
    std::string a;
    while (std::getline(as, a, ',')) axes.push_back(std::stod(a));
    return json{{"family", "ellipsoid"}, {"axes", std::move(axes)}};
  }
  if (family == "grid")
    return json{{"family", "radial_grid"}, {"path", parts.at(1)}};
  throw CLI::ValidationError("unknown body spec: " + text);
}

json density_spec_from_string(const std::string& text) {
  if (text.empty()) return json{{"kind", "constant"}, {"c", 1.0}};
  if (text.front() == '{') return json::parse(text);
  std::vector<std::string> parts;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ':')) parts.push_back(item);
  const std::string& kind = parts.at(0);
  if (kind == "constant")
    return json{{"kind", "constant"},
                {"c", parts.size() > 1 ? std::stod(parts[1]) : 1.0}};
  if (kind == "gaussian")
    return json{{"kind", "gaussian"},
                {"sigma", parts.size() > 1 ? std::stod(parts[1]) : 1.0}};
  if (kind == "gen_gaussian")
    return json{{"kind", "gen_gaussian"},
                {"q", parts.size() > 1 ? std::stod(parts[1]) : 2.0},
                {"s", parts.size() > 2 ? std::stod(parts[2]) : 1.0}};
  throw CLI::ValidationError("unknown density spec: " + text);
}

struct GlobalOptions {
  std::uint64_t seed = 0;
  int threads = 0;
  std::string output;
  std::string format;
};

struct QuadOptions {
  std::int64_t sphere_samples = 0;
  int radial_nodes = 0;
  std::int64_t subspace_samples = 0;
  int refine_steps = -1;
  std::string estimator;
};

void add_quad_flags(CLI::App* cmd, QuadOptions& q) {
  cmd->add_option("--sphere-samples", q.sphere_samples, "sphere sample count");
  cmd->add_option("--radial-nodes", q.radial_nodes,
                  "Gauss-Legendre radial node count");
  cmd->add_option("--subspace-samples", q.subspace_samples,
                  "Haar subspace sample count");
  cmd->add_option("--refine-steps", q.refine_steps,
                  "hill-climbing refinement steps");
  cmd->add_option("--estimator", q.estimator,
                  "monte_carlo or stratified_antithetic");
}

void apply_common(json& doc, const std::string& command,
                  const GlobalOptions& g, const QuadOptions& q) {
  doc["command"] = command;
  doc["seed"] = static_cast<std::int64_t>(g.seed);
  if (g.threads > 0) doc["threads"] = g.threads;
  if (!g.output.empty() || !g.format.empty()) {
    json out = json::object();
    if (!g.output.empty()) out["path"] = g.output;
    if (!g.format.empty()) out["format"] = g.format;
    doc["output"] = std::move(out);
  }
  json quad = json::object();
  if (q.sphere_samples > 0) quad["sphere_samples"] = q.sphere_samples;
  if (q.radial_nodes > 0) quad["radial_nodes"] = q.radial_nodes;
  if (q.subspace_samples > 0) quad["subspace_samples"] = q.subspace_samples;
  if (q.refine_steps >= 0) quad["refine_steps"] = q.refine_steps;
  if (!q.estimator.empty()) quad["estimator"] = q.estimator;
  if (!quad.empty()) doc["quadrature"] = std::move(quad);
}

json subspace_spec(const std::string& coords, int haar_index, int m) {
  json j = json::object();
  if (!coords.empty()) {
    json idx = json::array();
    std::stringstream ss(coords);
    std::string item;
    while (std::getline(ss, item, ',')) idx.push_back(std::stoi(item));
    j["coords"] = std::move(idx);
  } else {
    j["haar_index"] = haar_index;
    j["m"] = m;
  }
  return j;
}

int execute(const json& doc, const GlobalOptions&) {
  starslice::RunConfig config = starslice::validate_config(doc);
  starslice::RunResult result = starslice::run(config);
  std::string path = config.output_path();
  if (path.empty() || path == "-") {
    if (config.command() == "constant") {
      // bare full-precision value for shell use
      double value = result.envelope["report"]["value"].get<double>();
      std::printf("%.17g\n", value);
    } else if (config.output_format() == "csv" && !result.csv.empty()) {
      std::cout << result.csv;
    } else {
      std::cout << result.envelope.dump(2) << '\n';
    }
  }
  return result.exit_code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"slicing-inequality engine for origin-symmetric star bodies"};
  app.set_version_flag("--version", std::string(starslice::kVersion) + " (" +
                                        starslice::kBuildId + ")");
  app.require_subcommand(1);

  GlobalOptions g;
  app.add_option("--seed", g.seed, "base RNG seed")->capture_default_str();
  app.add_option("--threads", g.threads, "worker threads (0 = hardware)");
  app.add_option("--output", g.output, "report file path (default stdout)");
  app.add_option("--format", g.format, "json or csv");

  // run --config FILE
  auto* cmd_run = app.add_subcommand("run", "execute a JSON config file");
  std::string config_path;
  cmd_run->add_option("--config", config_path, "config file")->required();

  QuadOptions quad;

  std::string body_spec, body2_spec, body_k_spec, density_spec, coords;
  int m = 1, haar_index = 0;

  auto* cmd_volume = app.add_subcommand("volume", "volume of a star body");
  cmd_volume->add_option("--body", body_spec)->required();
  std::int64_t oracle_samples = 0;
  cmd_volume->add_option("--oracle-samples", oracle_samples,
                         "also run the rejection-sampling oracle");
  add_quad_flags(cmd_volume, quad);

  auto* cmd_section =
      app.add_subcommand("section", "volume of a central section");
  cmd_section->add_option("--body", body_spec)->required();
  cmd_section->add_option("--coords", coords,
                          "coordinate subspace, e.g. 0,1");
  cmd_section->add_option("--haar-index", haar_index,
                          "Haar-sampled subspace index");
  cmd_section->add_option("--m", m, "codimension for Haar subspaces");
  add_quad_flags(cmd_section, quad);

  auto* cmd_max = app.add_subcommand(
      "max-section", "maximize the section measure over the Grassmannian");
  cmd_max->add_option("--body", body_spec)->required();
  cmd_max->add_option("--density", density_spec,
                      "constant[:c] | gaussian[:sigma] | gen_gaussian[:q[:s]]");
  cmd_max->add_option("--m", m, "codimension");
  add_quad_flags(cmd_max, quad);

  auto* cmd_radon =
      app.add_subcommand("radon", "spherical Radon transform of a function");
  std::string function_spec = "{\"kind\":\"one\",\"n\":3}";
  cmd_radon->add_option("--function", function_spec,
                        "JSON function spec, e.g. {\"kind\":\"coord_sq\","
                        "\"n\":3,\"index\":0}");
  cmd_radon->add_option("--coords", coords, "coordinate subspace");
  cmd_radon->add_option("--haar-index", haar_index, "Haar subspace index");
  cmd_radon->add_option("--m", m, "codimension for Haar subspaces");
  add_quad_flags(cmd_radon, quad);

  auto* cmd_int = app.add_subcommand(
      "intersection-body", "tabulate the intersection body on a radial grid");
  cmd_int->add_option("--body", body_spec)->required();
  int resolution = 0;
  cmd_int->add_option("--resolution", resolution,
                      "grid resolution (0 = dimension default)");
  add_quad_flags(cmd_int, quad);

  auto* cmd_dist = app.add_subcommand("distance", "geometric / Banach-Mazur");
  std::string dist_kind = "geometric";
  cmd_dist->add_option("--kind", dist_kind, "geometric | bm | to-class");
  cmd_dist->add_option("--body", body_spec)->required();
  cmd_dist->add_option("--body2", body2_spec);
  std::vector<std::string> candidate_specs;
  cmd_dist->add_option("--candidate", candidate_specs,
                       "candidate body (repeatable, to-class)");
  int budget = 8, class_m = 1;
  cmd_dist->add_option("--budget", budget, "optimizer restarts");
  cmd_dist->add_option("--class-m", class_m, "class parameter m (to-class)");

  auto* cmd_const = app.add_subcommand("constant", "closed-form constants");
  std::string const_name;
  int const_n = 0, const_m = 1;
  double const_p = 0.0;
  cmd_const->add_option("--name", const_name, "ball-volume | cnm | lewis")
      ->required();
  cmd_const->add_option("--n", const_n)->required();
  cmd_const->add_option("--m", const_m);
  cmd_const->add_option("--p", const_p);

  auto* cmd_verify =
      app.add_subcommand("verify", "verify one slicing inequality");
  std::string inequality;
  double d_value = 0.0;
  cmd_verify->add_option("--inequality", inequality,
                         "hyper | hyper-int | arbmeas | sqrtn2 | thm1 | "
                         "main-lp | cor-kint | p-gt-2 | stability")
      ->required();
  cmd_verify->add_option("--body", body_spec)->required();
  cmd_verify->add_option("--body-k", body_k_spec, "normalized body K (thm1)");
  cmd_verify->add_option("--density", density_spec);
  cmd_verify->add_option("--m", m, "codimension");
  cmd_verify->add_option("--d", d_value, "distance constant");
  std::vector<std::string> verify_candidates;
  cmd_verify->add_option("--candidate", verify_candidates,
                         "class candidate (repeatable, main-lp/cor-kint)");
  int bm_budget = 4;
  cmd_verify->add_option("--bm-budget", bm_budget, "optimizer restarts");
  add_quad_flags(cmd_verify, quad);

  auto* cmd_sweep = app.add_subcommand("sweep", "run a plan of verifications");
  std::string plan_path;
  cmd_sweep->add_option("--plan", plan_path, "JSON file with a plan array")
      ->required();
  add_quad_flags(cmd_sweep, quad);

  // global flags (--seed etc.) remain usable after a subcommand name
  for (CLI::App* sub : app.get_subcommands([](const CLI::App*) { return true; }))
    sub->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    // exit-code contract: 0 for --help/--version, 2 for any usage error
    return code == 0 ? 0 : 2;
  }

  try {
    json doc;
    std::string command;
    if (app.got_subcommand(cmd_run)) {
      std::ifstream in(config_path);
      if (!in) {
        std::cerr << "cannot open config file: " << config_path << "\n";
        return 2;
      }
      std::stringstream buffer;
      buffer << in.rdbuf();
      starslice::RunConfig config = starslice::parse_config(buffer.str());
      starslice::RunResult result = starslice::run(config);
      std::string path = config.output_path();
      if (path.empty() || path == "-") {
        if (config.output_format() == "csv" && !result.csv.empty())
          std::cout << result.csv;
        else
          std::cout << result.envelope.dump(2) << '\n';
      }
      return result.exit_code;
    }

    if (app.got_subcommand(cmd_volume)) {
      doc["body"] = body_spec_from_string(body_spec);
      if (oracle_samples > 0) doc["oracle_samples"] = oracle_samples;
      command = "volume";
    } else if (app.got_subcommand(cmd_section)) {
      doc["body"] = body_spec_from_string(body_spec);
      doc["subspace"] = subspace_spec(coords, haar_index, m);
      command = "section";
    } else if (app.got_subcommand(cmd_max)) {
      doc["body"] = body_spec_from_string(body_spec);
      doc["density"] = density_spec_from_string(density_spec);
      doc["m"] = m;
      command = "max-section";
    } else if (app.got_subcommand(cmd_radon)) {
      doc["function"] = json::parse(function_spec);
      doc["subspace"] = subspace_spec(coords, haar_index, m);
      command = "radon";
    } else if (app.got_subcommand(cmd_int)) {
      doc["body"] = body_spec_from_string(body_spec);
      if (resolution > 0) doc["resolution"] = resolution;
      command = "intersection-body";
    } else if (app.got_subcommand(cmd_dist)) {
      doc["kind"] = dist_kind;
      doc["body"] = body_spec_from_string(body_spec);
      if (!body2_spec.empty()) doc["body2"] = body_spec_from_string(body2_spec);
      if (!candidate_specs.empty()) {
        json cands = json::array();
        for (const auto& c : candidate_specs)
          cands.push_back(body_spec_from_string(c));
        doc["candidates"] = std::move(cands);
      }
      doc["budget"] = budget;
      doc["class_m"] = class_m;
      command = "distance";
    } else if (app.got_subcommand(cmd_const)) {
      doc["name"] = const_name;
      doc["n"] = const_n;
      if (const_name == "cnm") doc["m"] = const_m;
      if (const_name == "lewis") doc["p"] = const_p;
      command = "constant";
    } else if (app.got_subcommand(cmd_verify)) {
      doc["inequality"] = inequality;
      doc["body"] = body_spec_from_string(body_spec);
      if (!body_k_spec.empty()) doc["body_k"] = body_spec_from_string(body_k_spec);
      if (!density_spec.empty())
        doc["density"] = density_spec_from_string(density_spec);
      doc["m"] = m;
      if (d_value > 0.0) doc["d"] = d_value;
      if (!verify_candidates.empty()) {
        json cands = json::array();
        for (const auto& c : verify_candidates)
          cands.push_back(body_spec_from_string(c));
        doc["candidates"] = std::move(cands);
      }
      doc["bm_budget"] = bm_budget;
      command = "verify";
    } else if (app.got_subcommand(cmd_sweep)) {
      std::ifstream in(plan_path);
      if (!in) {
        std::cerr << "cannot open plan file: " << plan_path << "\n";
        return 2;
      }
      json plan = json::parse(in);
      doc["plan"] = plan.is_array() ? plan : plan.at("plan");
      command = "sweep";
    }

    apply_common(doc, command, g, quad);
    return execute(doc, g);
  } catch (const starslice::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
