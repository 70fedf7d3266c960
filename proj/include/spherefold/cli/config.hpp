#pragma once

// Run configuration: a JSON object naming one command plus its parameters.
// Validation happens up front; every problem is reported with a JSON-pointer
// style path, and unknown keys are rejected.

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "spherefold/direction_set.hpp"
#include "spherefold/dynamics.hpp"
#include "spherefold/io.hpp"
#include "spherefold/random_walk.hpp"

namespace spherefold::cli {

enum class Command {
  CheckConditions,
  SynthesizeDense,
  VerifyCertificate,
  FindPeriodic,
  SimulateWalk,
  EstimateInvariant,
  PowerIterate,
  TestEvenness,
  FunkHecke,
};

std::string to_string(Command c);
std::optional<Command> command_from_string(const std::string& s);

struct SchemaError {
  std::string path;
  std::string message;
};

class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(std::vector<SchemaError> errors);
  ConfigError(const std::string& path, const std::string& message) : ConfigError(std::vector<SchemaError>{{path, message}}) {}
  const std::vector<SchemaError>& errors() const { return errors_; }

 private:
  std::vector<SchemaError> errors_;
};

struct FunctionSpec {
  enum class Kind { Coordinate, Constant } kind = Kind::Coordinate;
  int axis = 0;
  double value = 0.0;
};

struct RunConfig {
  Command command = Command::CheckConditions;
  std::uint64_t seed = 0;
  int dimension = 0;
  std::uint64_t config_hash = 0;  // FNV-1a of the raw config bytes

  std::optional<DirectionSet> direction_set;
  std::optional<DirectionDistribution> mu;
  std::optional<FoldWord> word;

  double epsilon = 0.2;
  std::optional<double> tolerance;  // command-specific default when absent
  std::size_t grid = 0;  // certificate grid / evenness grid / power-iteration nodes; 0 = default
  std::uint64_t budget = 1'000'000;
  std::size_t max_iterations = 10'000;

  std::optional<UnitVector> start;
  std::vector<UnitVector> init;
  std::uint64_t n = 100'000;
  std::size_t steps = 100;
  std::size_t cap = 100'000;
  std::size_t partition_cells = 100;
  std::size_t replicas = 1;
  std::vector<std::size_t> diagnostic_cells;
  int harmonics_degree = 0;
  FunctionSpec function;
  int k_max = 15;

  /// Requested assertions, validated per command.
  io::Json assertions = io::Json::object();
};

std::uint64_t fnv1a64(const std::string& bytes);

/// Throws ConfigError (malformed JSON, schema violations, dimension outside [2, 8]).
RunConfig parse_config(const std::string& bytes);

}  // namespace spherefold::cli
