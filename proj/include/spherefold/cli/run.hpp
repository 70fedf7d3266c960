#pragma once

#include <optional>
#include <ostream>
#include <string>

#include "spherefold/cli/config.hpp"

namespace spherefold::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitAssertion = 1;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitNumerical = 3;

struct ExecOptions {
  std::string out_dir;  // artifacts are written only when non-empty
};

struct RunOutcome {
  int exit_code = kExitOk;
  io::Json report;  // command, config hash, version, result, assertions
  std::optional<io::Json> error;  // for stderr when exit_code is 2 or 3
};

/// Runs one command. Errors inside the computation are mapped to exit codes:
/// PreconditionError -> 2, NumericalFailure / SearchExhausted -> 3.
RunOutcome execute(const RunConfig& config, const ExecOptions& opt);

/// Machine-readable error object for stderr.
io::Json error_json(const std::string& kind, const std::string& message,
                    const std::vector<SchemaError>& details = {});

std::string version();

}  // namespace spherefold::cli
