#pragma once

#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"

namespace teichlab {

inline constexpr const char* kArtifactVersion = "1.0.0";

// Malformed invocation (unknown key, unparsable value): exit status 1.
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct RunConfig {
  std::string command;                       // lyapunov, deviation, solve-torus, loss, gh-bound, surface, weyl, split
  std::vector<std::string> positional;       // e.g. {"validate", "file.json"} for surface
  std::uint64_t seed = 1;
  std::map<std::string, std::string> params; // command-specific, string-valued
  std::string out;                           // empty: stdout
  std::string format = "json";               // json or csv
};

struct ResultEnvelope {
  nlohmann::ordered_json config;
  std::string version = kArtifactVersion;
  double wall_time = 0.0;
  nlohmann::ordered_json payload;
  // Primary series for CSV output, if the command has one.
  std::vector<std::string> csv_columns;
  std::vector<std::vector<double>> csv_rows;

  nlohmann::ordered_json to_json() const;
};

// Keys accepted by each command.
const std::vector<std::string>& known_params(const std::string& command);

// Applies the TEICHLAB_SEED override, validates keys and dispatches. Throws
// UsageError or a teichlab::Error (domain failure).
ResultEnvelope run(const RunConfig& config);

// Writes the envelope (json) or the primary series (csv) to config.out or
// stdout, and any `csv` side file requested in params.
void write_outputs(const RunConfig& config, const ResultEnvelope& env);

// Full CLI: parse, run, emit; returns the process exit status.
int cli_main(int argc, char** argv);

}  // namespace teichlab
