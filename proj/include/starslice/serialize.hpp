#pragma once

#include <string>

#include <nlohmann/json.hpp>

#include "starslice/bodies.hpp"
#include "starslice/density.hpp"
#include "starslice/distance.hpp"
#include "starslice/estimate.hpp"
#include "starslice/harness.hpp"

namespace starslice {

nlohmann::json estimate_to_json(const Estimate& e);
nlohmann::json subspace_to_json(const Subspace& h);

// body specs: {"family":"lp","n":3,"p":1.0}, {"family":"ellipsoid",
// "axes":[...]}, {"family":"linear_image","inner":...,"matrix":[[...]]},
// {"family":"radial_grid","path"|"document":...} and so on
nlohmann::json body_to_json(const StarBody& body);
StarBody body_from_json(const nlohmann::json& j, const std::string& path);

nlohmann::json density_to_json(const DensitySpec& f);
DensitySpec density_from_json(const nlohmann::json& j, int dim,
                              const std::string& path);

// the grid-body document emitted by the intersection-body command
nlohmann::json grid_document(const StarBody& grid_body);
StarBody grid_from_document(const nlohmann::json& doc, const std::string& path);

nlohmann::json distance_result_to_json(const DistanceResult& r);

// deterministic report payload; wall-clock time is excluded (metadata)
nlohmann::json report_to_json(const InequalityReport& report);

std::string report_csv_header();
std::string report_csv_row(const InequalityReport& report);

}  // namespace starslice
