#pragma once

#include <string>

#include <nlohmann/json.hpp>

#include "starslice/config.hpp"

namespace starslice {

// exit codes: 0 pass/success, 1 any Fail (or sweep entry error), 2 usage
// error (raised as exceptions before this point), 3 inconclusive-only
struct RunResult {
  int exit_code = 0;
  nlohmann::json envelope;  // {"schema", "command", "report", "meta"}
  std::string csv;          // sweep only
};

/// Executes the configured command and writes the report file when an output
/// path is configured. The "report" section of the envelope is a
/// deterministic function of (config, seed); wall-clock fields live under
/// "meta".
RunResult run(const RunConfig& config);

}  // namespace starslice
