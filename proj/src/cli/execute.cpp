#include "spherefold/cli/run.hpp"

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <sstream>

#include "spherefold/harmonics.hpp"
#include "spherefold/io.hpp"
#include "spherefold/markov.hpp"
#include "spherefold/parallel.hpp"
#include "spherefold/stats.hpp"

#ifndef SPHEREFOLD_VERSION
#define SPHEREFOLD_VERSION "0.0.0"
#endif

namespace spherefold::cli {

using Json = io::Json;

std::string version() { return SPHEREFOLD_VERSION; }

Json error_json(const std::string& kind, const std::string& message, const std::vector<SchemaError>& details) {
  Json j;
  j["error"] = kind;
  j["message"] = message;
  if (!details.empty()) {
    Json arr = Json::array();
    for (const auto& e : details) arr.push_back({{"path", e.path}, {"message", e.message}});
    j["details"] = std::move(arr);
  }
  return j;
}

namespace {

std::string hex64(std::uint64_t h) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

Json vec_json(const UnitVector& x) {
  Json v = Json::array();
  for (int k = 0; k < x.dim(); ++k) v.push_back(x[k]);
  return v;
}

class Context {
 public:
  Context(const RunConfig& cfg, const ExecOptions& opt) : cfg_(cfg), opt_(opt) {}

  Json result = Json::object();
  Json assertions = Json::object();
  Json artifacts = Json::array();
  bool failed = false;

  void emit(const std::string& name, const std::string& content) {
    artifacts.push_back(name);
    if (opt_.out_dir.empty()) return;
    std::filesystem::create_directories(opt_.out_dir);
    io::write_file((std::filesystem::path(opt_.out_dir) / name).string(), content);
  }

  // Records an assertion if the config asked for it.
  void check(const std::string& name, const Json& actual) {
    if (!cfg_.assertions.contains(name)) return;
    const Json& expected = cfg_.assertions.at(name);
    const bool pass = expected == actual;
    assertions[name] = {{"expected", expected}, {"actual", actual}, {"pass", pass}};
    if (!pass) failed = true;
  }

 private:
  const RunConfig& cfg_;
  const ExecOptions& opt_;
};

std::size_t default_certificate_grid(int dim, double eps) {
  return CellPartition::with_covering_radius(dim, eps / 3.0).size();
}

void run_check_conditions(const RunConfig& cfg, Context& ctx) {
  const auto& g = *cfg.direction_set;
  const auto rep = check_conditions(g);
  ctx.result = io::to_json(rep);
  ctx.result["fingerprint"] = g.fingerprint();
  ctx.emit("conditions.json", ctx.result.dump(2) + "\n");
  ctx.check("c1", rep.c1.satisfied);
  ctx.check("c2", to_string(rep.c2.verdict));
}

void run_synthesize(const RunConfig& cfg, Context& ctx) {
  const auto& g = *cfg.direction_set;
  SynthesisOptions opt;
  opt.seed = cfg.seed;
  opt.budget_per_search = cfg.budget;
  const auto seq = synthesize_dense_sequence(g, Angle{cfg.epsilon}, opt);
  const std::size_t grid = cfg.grid != 0 ? cfg.grid : default_certificate_grid(g.dim(), cfg.epsilon);
  const auto cert = verify_density_certificate(seq.word, g, Angle{cfg.epsilon}, grid);
  std::ostringstream csv;
  io::write_certificate_header(csv);
  io::write_certificate_row(csv, cert);
  ctx.emit("word.json", io::to_json(seq.word).dump() + "\n");
  ctx.emit("certificate.csv", csv.str());
  ctx.result = {{"length", seq.word.size()},
                {"cover_cells", seq.cover.size()},
                {"searches", seq.searches},
                {"worst_gap", cert.worst_gap.radians},
                {"grid", cert.test_grid_size},
                {"pass", cert.pass}};
  ctx.check("certificate_pass", cert.pass);
}

void run_verify(const RunConfig& cfg, Context& ctx) {
  const auto& g = *cfg.direction_set;
  const std::size_t grid = cfg.grid != 0 ? cfg.grid : default_certificate_grid(g.dim(), cfg.epsilon);
  const auto cert = verify_density_certificate(*cfg.word, g, Angle{cfg.epsilon}, grid);
  std::ostringstream csv;
  io::write_certificate_header(csv);
  io::write_certificate_row(csv, cert);
  ctx.emit("certificate.csv", csv.str());
  ctx.result = {{"epsilon", cert.epsilon.radians},
                {"length", cert.length},
                {"worst_gap", cert.worst_gap.radians},
                {"grid", cert.test_grid_size},
                {"pass", cert.pass}};
  ctx.check("pass", cert.pass);
}

void run_periodic(const RunConfig& cfg, Context& ctx) {
  const auto& g = *cfg.direction_set;
  const auto orbit = find_periodic_orbit(*cfg.word, g, Angle{cfg.tolerance.value_or(1e-9)}, cfg.max_iterations);
  if (!orbit) throw NumericalFailure("find-periodic: no fixed point within the iteration budget");
  Json pts = Json::array();
  for (const auto& p : orbit->orbit) pts.push_back(vec_json(p));
  ctx.result = {{"point", vec_json(orbit->point)},
                {"residual", orbit->residual},
                {"iterations", orbit->iterations},
                {"diameter", orbit->diameter()},
                {"orbit", pts}};
  ctx.emit("periodic.json", ctx.result.dump(2) + "\n");
  ctx.check("non_constant", orbit->diameter() > 1e-6);
}

void run_walk(const RunConfig& cfg, Context& ctx) {
  const auto& mu = *cfg.mu;
  const CellPartition part(mu.dim(), cfg.partition_cells);
  const UnitVector x = cfg.start.value_or(UnitVector::basis(mu.dim(), 0));
  const auto hist = cfg.replicas > 1 ? occupation_histogram_replicas(x, mu, cfg.n, cfg.seed, part, cfg.replicas)
                                     : occupation_histogram(x, mu, cfg.n, cfg.seed, part);
  std::ostringstream csv;
  io::write_histogram_csv(csv, hist, part);
  ctx.emit("histogram.csv", csv.str());
  const auto chi = stats::chi_square_uniform(hist.counts);
  ctx.result = {{"total", hist.total},
                {"cells", part.size()},
                {"empty_cells", hist.empty_cells()},
                {"tv_to_uniform", stats::tv_to_uniform(hist.frequencies)},
                {"chi_square", chi.statistic},
                {"chi_square_p_value", chi.p_value}};
  ctx.check("cap_coverage", hist.empty_cells() == 0);
}

void run_invariant(const RunConfig& cfg, Context& ctx) {
  const auto& mu = *cfg.mu;
  const int d = mu.dim();
  std::vector<UnitVector> init = cfg.init;
  if (init.empty()) init.push_back(UnitVector::basis(d, 0));
  std::vector<double> w(init.size(), 1.0 / static_cast<double>(init.size()));
  w.back() = 1.0;
  for (std::size_t i = 0; i + 1 < w.size(); ++i) w.back() -= w[i];
  const auto nu0 = ParticleMeasure::from_points(init, w);
  const auto nu = evolve_measure(mu, nu0, cfg.steps, cfg.cap, cfg.seed);
  const CellPartition part(d, cfg.partition_cells);
  const auto hist = cell_histogram(nu, part);
  std::ostringstream csv;
  io::write_histogram_csv(csv, hist, part);
  ctx.emit("histogram.csv", csv.str());

  Json diag = Json::array();
  std::vector<std::size_t> levels = cfg.diagnostic_cells;
  if (levels.empty()) levels = {cfg.partition_cells, 4 * cfg.partition_cells};
  for (const std::size_t k : levels) {
    const CellPartition p(d, k);
    const auto h = cell_histogram(nu, p);
    diag.push_back({{"cells", k},
                    {"empty_fraction", static_cast<double>(h.empty_cells()) / static_cast<double>(k)}});
  }
  ctx.result = {{"particles", nu.size()},
                {"cells", part.size()},
                {"empty_cells", hist.empty_cells()},
                {"tv_to_uniform", stats::tv_to_uniform(hist.frequencies)},
                {"empty_fraction_by_resolution", diag}};
  if (cfg.harmonics_degree > 0) {
    const auto coeffs = harmonic_coefficients(nu, cfg.harmonics_degree);
    std::ostringstream c;
    io::write_coefficients_csv(c, coeffs);
    ctx.emit("coefficients.csv", c.str());
  }
  ctx.check("full_support", hist.empty_cells() == 0);
}

void run_power(const RunConfig& cfg, Context& ctx) {
  const auto& mu = *cfg.mu;
  const int d = mu.dim();
  const std::size_t nodes = cfg.grid != 0 ? cfg.grid : (d == 2 ? 720 : 4000);
  const auto grid = Grid::standard(d, nodes);
  const auto spec = cfg.function;
  const auto f = GridFunction::sample(grid, [&](const UnitVector& x) {
    return spec.kind == FunctionSpec::Kind::Constant ? spec.value : x[spec.axis];
  });
  const auto r = power_iterate(mu, f, cfg.tolerance.value_or(1e-3), cfg.max_iterations);
  std::ostringstream hist;
  io::write_range_history_csv(hist, r.range_history);
  ctx.emit("range_history.csv", hist.str());
  if (r.final) {
    std::ostringstream fin;
    io::write_grid_function_csv(fin, *r.final);
    ctx.emit("final.csv", fin.str());
  }
  ctx.result = {{"phi_bar", r.phi_bar},
                {"half_range", r.half_range},
                {"n_used", r.n_used},
                {"converged", r.converged},
                {"grid_nodes", nodes}};
  ctx.check("converged", r.converged);
}

void run_evenness(const RunConfig& cfg, Context& ctx) {
  const auto& mu = *cfg.mu;
  const int grid = static_cast<int>(cfg.grid != 0 ? cfg.grid : (mu.dim() == 2 ? 3600 : 10000));
  const auto r = evenness_test(mu, grid);
  ctx.result = io::to_json(r);
  ctx.emit("evenness.json", ctx.result.dump(2) + "\n");
  ctx.check("is_even", r.is_even);
}

void run_funk_hecke(const RunConfig& cfg, Context& ctx) {
  std::ostringstream csv;
  csv << "k,gamma\n";
  Json gammas = Json::array();
  bool odd_ok = true;
  for (int k = 0; k <= cfg.k_max; ++k) {
    const double g = funk_hecke_gamma(cfg.dimension, k);
    csv << k << ',' << io::format_real(g) << '\n';
    gammas.push_back(g);
    if (k % 2 == 1 && !(std::abs(g) > 1e-6)) odd_ok = false;
  }
  ctx.emit("gamma.csv", csv.str());
  ctx.result = {{"dimension", cfg.dimension}, {"gamma", gammas}, {"odd_nonvanishing", odd_ok}};
  ctx.check("odd_nonvanishing", odd_ok);
}

}  // namespace

RunOutcome execute(const RunConfig& cfg, const ExecOptions& opt) {
  RunOutcome out;
  Context ctx(cfg, opt);
  const auto t0 = std::chrono::steady_clock::now();
  try {
    switch (cfg.command) {
      case Command::CheckConditions: run_check_conditions(cfg, ctx); break;
      case Command::SynthesizeDense: run_synthesize(cfg, ctx); break;
      case Command::VerifyCertificate: run_verify(cfg, ctx); break;
      case Command::FindPeriodic: run_periodic(cfg, ctx); break;
      case Command::SimulateWalk: run_walk(cfg, ctx); break;
      case Command::EstimateInvariant: run_invariant(cfg, ctx); break;
      case Command::PowerIterate: run_power(cfg, ctx); break;
      case Command::TestEvenness: run_evenness(cfg, ctx); break;
      case Command::FunkHecke: run_funk_hecke(cfg, ctx); break;
    }
    out.exit_code = ctx.failed ? kExitAssertion : kExitOk;
  } catch (const PreconditionError& e) {
    out.exit_code = kExitConfig;
    out.error = error_json("precondition", e.what());
  } catch (const NumericalFailure& e) {
    out.exit_code = kExitNumerical;
    out.error = error_json("numerical", e.what());
  } catch (const SearchExhausted& e) {
    out.exit_code = kExitNumerical;
    out.error = error_json("search_exhausted", e.what());
  }
  const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

  Json& r = out.report;
  r["command"] = to_string(cfg.command);
  r["config_hash"] = hex64(cfg.config_hash);
  r["version"] = version();
  r["seed"] = cfg.seed;
  r["threads"] = thread_count();
  r["wall_time_s"] = wall;
  r["exit_code"] = out.exit_code;
  r["result"] = ctx.result;
  r["assertions"] = ctx.assertions;
  r["artifacts"] = ctx.artifacts;
  return out;
}

}  // namespace spherefold::cli
