#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

#include <nlohmann/json.hpp>

namespace starslice {

// configuration / document errors carrying a JSON-pointer-style location
class ConfigError : public std::runtime_error {
 public:
  ConfigError(const std::string& path, const std::string& message)
      : std::runtime_error(path + ": " + message) {}
};

// A validated run configuration. The document is schema-checked (strict keys,
// range checks, duplicate-key rejection) at parse time; a run is reproducible
// from the config alone.
struct RunConfig {
  nlohmann::json doc;

  bool operator==(const RunConfig& other) const { return doc == other.doc; }

  std::string command() const;
  std::uint64_t seed() const;
  int threads() const;
  std::string output_path() const;   // empty = stdout
  std::string output_format() const; // "json" or "csv"
};

/// Parses and validates a configuration document (JSON text). Unknown keys,
/// duplicate keys and out-of-range parameters are rejected with the offending
/// location.
RunConfig parse_config(const std::string& text);

// validate an already-parsed document (duplicate keys cannot be detected here)
RunConfig validate_config(nlohmann::json doc);

/// Canonical serialization; parse_config(serialize(c)) == c.
std::string serialize(const RunConfig& config);

std::uint64_t config_hash(const RunConfig& config);

}  // namespace starslice
