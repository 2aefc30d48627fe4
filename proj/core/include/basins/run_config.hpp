#pragma once

#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include "basins/basin.hpp"

namespace basins {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Thrown by parse_config on --help; carries the usage text.
struct HelpRequested {
  std::string text;
};

enum class Transform { None, Quotient, TimesExp };

struct RunConfig {
  std::string function_id;            // catalog entry, or empty when roots are inline
  std::vector<RootSpec> inline_roots; // used when function_id is empty
  Transform transform = Transform::None;
  Engine engine = Engine::Newton;
  SweepConfig sweep;
  bool jitter_deltas = false;
  std::string out_ppm;
  std::string out_csv;
  std::string compare_with;
};

const char* engine_name(Engine e);

// Parses command-line arguments (without the program name). Unknown flags,
// unknown function ids, out-of-range parameters, and malformed lists all
// throw ConfigError. When --seed is absent the BASINS_SEED environment
// variable supplies the default (0 if unset).
RunConfig parse_config(const std::vector<std::string>& args);

// Builds the function under study: catalog entry or inline roots, with the
// requested transform applied. Rejects more than 8 distinct roots (palette).
FunctionExpr make_function(const RunConfig& cfg);

// Full pipeline: build the function, draw the grid jitter from the seed, run
// the sweep, write the requested outputs, honor --compare-with. Progress and
// the run summary go to `log`. Returns a process exit code.
int run_cli(const RunConfig& cfg, std::ostream& log);

}  // namespace basins
