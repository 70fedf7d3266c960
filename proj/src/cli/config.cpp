#include "spherefold/cli/config.hpp"

#include <array>
#include <cmath>
#include <map>
#include <set>

namespace spherefold::cli {

namespace {

constexpr std::array<std::pair<Command, const char*>, 9> kCommands{{
    {Command::CheckConditions, "check-conditions"},
    {Command::SynthesizeDense, "synthesize-dense"},
    {Command::VerifyCertificate, "verify-certificate"},
    {Command::FindPeriodic, "find-periodic"},
    {Command::SimulateWalk, "simulate-walk"},
    {Command::EstimateInvariant, "estimate-invariant"},
    {Command::PowerIterate, "power-iterate"},
    {Command::TestEvenness, "test-evenness"},
    {Command::FunkHecke, "funk-hecke"},
}};

using Json = io::Json;

// Keys accepted next to "command", "seed" and "dimension", and the assertion
// names each command understands.
struct Schema {
  std::set<std::string> keys;
  std::map<std::string, Json::value_t> assertions;
};

const Schema& schema_for(Command c) {
  static const std::map<Command, Schema> table = {
      {Command::CheckConditions, {{"direction_set"}, {{"c1", Json::value_t::boolean}, {"c2", Json::value_t::string}}}},
      {Command::SynthesizeDense,
       {{"direction_set", "epsilon", "budget", "grid"}, {{"certificate_pass", Json::value_t::boolean}}}},
      {Command::VerifyCertificate, {{"direction_set", "word", "epsilon", "grid"}, {{"pass", Json::value_t::boolean}}}},
      {Command::FindPeriodic,
       {{"direction_set", "word", "tolerance", "max_iterations"}, {{"non_constant", Json::value_t::boolean}}}},
      {Command::SimulateWalk,
       {{"mu", "start", "n", "partition_cells", "replicas"}, {{"cap_coverage", Json::value_t::boolean}}}},
      {Command::EstimateInvariant,
       {{"mu", "init", "steps", "cap", "partition_cells", "diagnostic_cells", "harmonics_degree"},
        {{"full_support", Json::value_t::boolean}}}},
      {Command::PowerIterate,
       {{"mu", "grid", "function", "tolerance", "max_iterations"}, {{"converged", Json::value_t::boolean}}}},
      {Command::TestEvenness, {{"mu", "grid"}, {{"is_even", Json::value_t::boolean}}}},
      {Command::FunkHecke, {{"k_max"}, {{"odd_nonvanishing", Json::value_t::boolean}}}},
  };
  return table.at(c);
}

class Reader {
 public:
  explicit Reader(std::vector<SchemaError>& errs) : errs_(errs) {}

  void fail(const std::string& path, const std::string& msg) { errs_.push_back({path, msg}); }

  std::optional<std::uint64_t> uint(const Json& j, const std::string& path, std::uint64_t lo = 0) {
    if (!j.is_number_integer() || (j.is_number_integer() && !j.is_number_unsigned())) {
      fail(path, "expected a non-negative integer");
      return std::nullopt;
    }
    const auto v = j.get<std::uint64_t>();
    if (v < lo) {
      fail(path, "must be >= " + std::to_string(lo));
      return std::nullopt;
    }
    return v;
  }

  std::optional<double> positive(const Json& j, const std::string& path) {
    if (!j.is_number()) {
      fail(path, "expected a number");
      return std::nullopt;
    }
    const double v = j.get<double>();
    if (!(v > 0.0) || !std::isfinite(v)) {
      fail(path, "must be a positive finite number");
      return std::nullopt;
    }
    return v;
  }

  std::optional<UnitVector> point(const Json& j, const std::string& path) {
    if (!j.is_array()) {
      fail(path, "expected an array of numbers");
      return std::nullopt;
    }
    std::vector<double> c;
    for (std::size_t i = 0; i < j.size(); ++i) {
      if (!j[i].is_number()) {
        fail(path + "/" + std::to_string(i), "expected a number");
        return std::nullopt;
      }
      c.push_back(j[i].get<double>());
    }
    if (c.size() < static_cast<std::size_t>(kMinDim) || c.size() > static_cast<std::size_t>(kMaxDim)) {
      fail(path, "dimension must be in [2, 8]");
      return std::nullopt;
    }
    try {
      return UnitVector(std::span<const double>(c));
    } catch (const std::exception& e) {
      fail(path, e.what());
      return std::nullopt;
    }
  }

  // Array of arrays, or {"minimal": {"dimension": d, "seed": s}}.
  std::optional<DirectionSet> direction_set(const Json& j, const std::string& path) {
    if (j.is_object()) {
      for (const auto& [k, v] : j.items()) {
        if (k != "minimal") fail(path + "/" + k, "unknown key \"" + k + "\"");
      }
      if (!j.contains("minimal") || !j.at("minimal").is_object()) {
        fail(path, "expected an array of directions or {\"minimal\": {...}}");
        return std::nullopt;
      }
      const Json& m = j.at("minimal");
      std::uint64_t seed = 0;
      std::optional<std::uint64_t> dim;
      for (const auto& [k, v] : m.items()) {
        const std::string p = path + "/minimal/" + k;
        if (k == "dimension") {
          dim = uint(v, p);
        } else if (k == "seed") {
          seed = uint(v, p).value_or(0);
        } else {
          fail(p, "unknown key \"" + k + "\"");
        }
      }
      if (!dim) {
        if (!m.contains("dimension")) fail(path + "/minimal/dimension", "required");
        return std::nullopt;
      }
      if (*dim < kMinDim || *dim > kMaxDim) {
        fail(path + "/minimal/dimension", "dimension must be in [2, 8]");
        return std::nullopt;
      }
      return construct_minimal(static_cast<int>(*dim), seed);
    }
    if (!j.is_array() || j.empty()) {
      fail(path, "expected a non-empty array of directions");
      return std::nullopt;
    }
    std::vector<UnitVector> dirs;
    bool ok = true;
    for (std::size_t i = 0; i < j.size(); ++i) {
      auto p = point(j[i], path + "/" + std::to_string(i));
      if (p) {
        dirs.push_back(*p);
      } else {
        ok = false;
      }
    }
    if (!ok) return std::nullopt;
    try {
      return DirectionSet(std::move(dirs));
    } catch (const std::exception& e) {
      fail(path, e.what());
      return std::nullopt;
    }
  }

  // {"uniform_sphere": d} | {"directions": G, "weights": [..]} | {"directions": G} (uniform on G)
  std::optional<DirectionDistribution> mu(const Json& j, const std::string& path) {
    if (!j.is_object()) {
      fail(path, "expected an object");
      return std::nullopt;
    }
    for (const auto& [k, v] : j.items()) {
      if (k != "uniform_sphere" && k != "directions" && k != "weights") fail(path + "/" + k, "unknown key \"" + k + "\"");
    }
    if (j.contains("uniform_sphere")) {
      if (j.contains("directions") || j.contains("weights")) {
        fail(path, "uniform_sphere excludes directions and weights");
        return std::nullopt;
      }
      const auto d = uint(j.at("uniform_sphere"), path + "/uniform_sphere");
      if (!d) return std::nullopt;
      if (*d < kMinDim || *d > kMaxDim) {
        fail(path + "/uniform_sphere", "dimension must be in [2, 8]");
        return std::nullopt;
      }
      return DirectionDistribution::uniform_sphere(static_cast<int>(*d));
    }
    if (!j.contains("directions")) {
      fail(path + "/directions", "required");
      return std::nullopt;
    }
    auto g = direction_set(j.at("directions"), path + "/directions");
    if (!g) return std::nullopt;
    if (!j.contains("weights")) return DirectionDistribution::uniform_on(std::move(*g));
    const Json& w = j.at("weights");
    if (!w.is_array()) {
      fail(path + "/weights", "expected an array of numbers");
      return std::nullopt;
    }
    std::vector<double> weights;
    double sum = 0.0;
    for (std::size_t i = 0; i < w.size(); ++i) {
      if (!w[i].is_number() || !(w[i].get<double>() > 0.0)) {
        fail(path + "/weights/" + std::to_string(i), "weights must be positive numbers");
        return std::nullopt;
      }
      weights.push_back(w[i].get<double>());
      sum += weights.back();
    }
    if (weights.size() != g->size()) {
      fail(path + "/weights", "expected one weight per direction");
      return std::nullopt;
    }
    if (std::abs(sum - 1.0) > 1e-12) {
      fail(path + "/weights", "weights must sum to 1");
      return std::nullopt;
    }
    return DirectionDistribution(std::move(*g), std::move(weights));
  }

 private:
  std::vector<SchemaError>& errs_;
};

}  // namespace

std::string to_string(Command c) {
  for (const auto& [cmd, name] : kCommands) {
    if (cmd == c) return name;
  }
  return "unknown";
}

std::optional<Command> command_from_string(const std::string& s) {
  for (const auto& [cmd, name] : kCommands) {
    if (s == name) return cmd;
  }
  return std::nullopt;
}

namespace {

std::string join_errors(const std::vector<SchemaError>& errors) {
  std::string s;
  for (const auto& e : errors) {
    if (!s.empty()) s += "; ";
    s += (e.path.empty() ? "/" : e.path) + ": " + e.message;
  }
  return s;
}

}  // namespace

ConfigError::ConfigError(std::vector<SchemaError> errors)
    : std::runtime_error(join_errors(errors)), errors_(std::move(errors)) {}

std::uint64_t fnv1a64(const std::string& bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (const unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

RunConfig parse_config(const std::string& bytes) {
  Json j;
  try {
    j = Json::parse(bytes);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError("", std::string("malformed JSON: ") + e.what());
  }
  if (!j.is_object()) throw ConfigError("", "config must be a JSON object");

  std::vector<SchemaError> errs;
  Reader rd(errs);
  RunConfig cfg;
  cfg.config_hash = fnv1a64(bytes);

  if (!j.contains("command") || !j.at("command").is_string()) throw ConfigError("/command", "required string");
  const auto cmd = command_from_string(j.at("command").get<std::string>());
  if (!cmd) throw ConfigError("/command", "unknown command \"" + j.at("command").get<std::string>() + "\"");
  cfg.command = *cmd;
  const Schema& schema = schema_for(cfg.command);

  std::optional<std::uint64_t> dimension;
  for (const auto& [key, v] : j.items()) {
    const std::string path = "/" + key;
    if (key == "command") continue;
    if (key == "seed") {
      cfg.seed = rd.uint(v, path).value_or(0);
    } else if (key == "dimension") {
      dimension = rd.uint(v, path);
      if (dimension && (*dimension < kMinDim || *dimension > kMaxDim)) {
        rd.fail(path, "dimension must be in [2, 8]");
        dimension.reset();
      }
    } else if (key == "assert") {
      if (!v.is_object()) {
        rd.fail(path, "expected an object");
        continue;
      }
      for (const auto& [a, val] : v.items()) {
        const auto it = schema.assertions.find(a);
        if (it == schema.assertions.end()) {
          rd.fail(path + "/" + a, "unknown assertion \"" + a + "\" for " + to_string(cfg.command));
        } else if (val.type() != it->second) {
          rd.fail(path + "/" + a, "wrong type");
        }
      }
      cfg.assertions = v;
    } else if (!schema.keys.contains(key)) {
      rd.fail(path, "unknown key \"" + key + "\"");
    } else if (key == "direction_set") {
      cfg.direction_set = rd.direction_set(v, path);
    } else if (key == "mu") {
      cfg.mu = rd.mu(v, path);
    } else if (key == "word") {
      try {
        cfg.word = io::fold_word_from_json(v);
      } catch (const std::exception& e) {
        rd.fail(path, e.what());
      }
    } else if (key == "epsilon") {
      cfg.epsilon = rd.positive(v, path).value_or(cfg.epsilon);
    } else if (key == "tolerance") {
      cfg.tolerance = rd.positive(v, path);
    } else if (key == "grid") {
      cfg.grid = rd.uint(v, path, 2).value_or(0);
    } else if (key == "budget") {
      cfg.budget = rd.uint(v, path, 1).value_or(cfg.budget);
    } else if (key == "max_iterations") {
      cfg.max_iterations = rd.uint(v, path, 1).value_or(cfg.max_iterations);
    } else if (key == "start") {
      cfg.start = rd.point(v, path);
    } else if (key == "init") {
      if (!v.is_array() || v.empty()) {
        rd.fail(path, "expected a non-empty array of points");
      } else {
        for (std::size_t i = 0; i < v.size(); ++i) {
          if (auto p = rd.point(v[i], path + "/" + std::to_string(i))) cfg.init.push_back(*p);
        }
      }
    } else if (key == "n") {
      cfg.n = rd.uint(v, path, 1).value_or(cfg.n);
    } else if (key == "steps") {
      cfg.steps = rd.uint(v, path, 1).value_or(cfg.steps);
    } else if (key == "cap") {
      cfg.cap = rd.uint(v, path, 1).value_or(cfg.cap);
    } else if (key == "partition_cells") {
      cfg.partition_cells = rd.uint(v, path, 1).value_or(cfg.partition_cells);
    } else if (key == "replicas") {
      cfg.replicas = rd.uint(v, path, 1).value_or(cfg.replicas);
    } else if (key == "diagnostic_cells") {
      if (!v.is_array()) {
        rd.fail(path, "expected an array of cell counts");
      } else {
        for (std::size_t i = 0; i < v.size(); ++i) {
          if (auto c = rd.uint(v[i], path + "/" + std::to_string(i), 1)) cfg.diagnostic_cells.push_back(*c);
        }
      }
    } else if (key == "harmonics_degree") {
      const auto h = rd.uint(v, path);
      if (h && *h > 32) rd.fail(path, "must be <= 32");
      cfg.harmonics_degree = static_cast<int>(h.value_or(0));
    } else if (key == "k_max") {
      const auto k = rd.uint(v, path);
      if (k && *k > 64) rd.fail(path, "must be <= 64");
      cfg.k_max = static_cast<int>(k.value_or(15));
    } else if (key == "function") {
      if (!v.is_object() || !v.contains("type") || !v.at("type").is_string()) {
        rd.fail(path, "expected {\"type\": \"coordinate\" | \"constant\", ...}");
        continue;
      }
      const auto type = v.at("type").get<std::string>();
      for (const auto& [fk, fv] : v.items()) {
        if (fk == "type") continue;
        if (type == "coordinate" && fk == "axis") {
          cfg.function.axis = static_cast<int>(rd.uint(fv, path + "/axis").value_or(0));
        } else if (type == "constant" && fk == "value" && fv.is_number()) {
          cfg.function.value = fv.get<double>();
        } else {
          rd.fail(path + "/" + fk, "unknown or invalid key \"" + fk + "\"");
        }
      }
      if (type == "coordinate") {
        cfg.function.kind = FunctionSpec::Kind::Coordinate;
      } else if (type == "constant") {
        cfg.function.kind = FunctionSpec::Kind::Constant;
      } else {
        rd.fail(path + "/type", "unknown function type \"" + type + "\"");
      }
    }
  }

  // Required inputs and dimension consistency.
  auto need = [&](bool present, const char* key) {
    if (!present && !j.contains(key)) rd.fail(std::string("/") + key, "required");
  };
  int derived = 0;
  switch (cfg.command) {
    case Command::CheckConditions:
    case Command::SynthesizeDense:
      need(cfg.direction_set.has_value(), "direction_set");
      break;
    case Command::VerifyCertificate:
    case Command::FindPeriodic:
      need(cfg.direction_set.has_value(), "direction_set");
      need(cfg.word.has_value(), "word");
      break;
    case Command::SimulateWalk:
    case Command::EstimateInvariant:
    case Command::PowerIterate:
    case Command::TestEvenness:
      need(cfg.mu.has_value(), "mu");
      break;
    case Command::FunkHecke:
      if (!dimension && !j.contains("dimension")) rd.fail("/dimension", "required");
      if (dimension && *dimension > 3) rd.fail("/dimension", "funk-hecke supports d = 2, 3");
      break;
  }
  if (cfg.direction_set) derived = cfg.direction_set->dim();
  if (cfg.mu) derived = cfg.mu->dim();
  if (dimension && derived != 0 && static_cast<int>(*dimension) != derived) {
    rd.fail("/dimension", "does not match the dimension of the directions");
  }
  cfg.dimension = derived != 0 ? derived : static_cast<int>(dimension.value_or(0));

  if (cfg.word && cfg.direction_set) {
    for (std::size_t i = 0; i < cfg.word->indices.size(); ++i) {
      if (cfg.word->indices[i] >= cfg.direction_set->size()) {
        rd.fail("/word/indices/" + std::to_string(i), "index out of range");
        break;
      }
    }
  }
  const bool needs_partition = cfg.command == Command::SimulateWalk || cfg.command == Command::EstimateInvariant ||
                               cfg.command == Command::PowerIterate;
  if (needs_partition && cfg.dimension != 0 && cfg.dimension > 3) {
    rd.fail("/mu", "histograms and grids support d = 2, 3");
  }
  if ((cfg.command == Command::EstimateInvariant || cfg.command == Command::PowerIterate ||
       cfg.command == Command::TestEvenness) &&
      cfg.mu && !cfg.mu->is_finite()) {
    rd.fail("/mu", "operator routines need a finitely supported mu");
  }
  if (cfg.start && cfg.dimension != 0 && cfg.start->dim() != cfg.dimension) rd.fail("/start", "dimension mismatch");
  for (std::size_t i = 0; i < cfg.init.size(); ++i) {
    if (cfg.dimension != 0 && cfg.init[i].dim() != cfg.dimension) rd.fail("/init/" + std::to_string(i), "dimension mismatch");
  }
  if (cfg.command == Command::PowerIterate && cfg.function.kind == FunctionSpec::Kind::Coordinate &&
      cfg.dimension != 0 && cfg.function.axis >= cfg.dimension) {
    rd.fail("/function/axis", "axis out of range");
  }

  if (!errs.empty()) throw ConfigError(std::move(errs));
  return cfg;
}

}  // namespace spherefold::cli
