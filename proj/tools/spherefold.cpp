// spherefold: batch front end. Reads a JSON run config, executes one command,
// prints the run report on stdout and writes artifacts to --out.

#include <cstdlib>
#include <iostream>
#include <string>
#include <thread>

#include <CLI11.hpp>

#include "spherefold/cli/run.hpp"
#include "spherefold/io.hpp"
#include "spherefold/parallel.hpp"

namespace sf = spherefold;

int main(int argc, char** argv) {
  CLI::App app{"Random foldings of the sphere: conditions, dense words, walks and invariant measures"};
  std::string config_path;
  std::string out_dir;
  unsigned threads = 0;
  std::uint64_t seed = 0;
  app.add_option("--config", config_path, "Run config (JSON)")->required();
  app.add_option("--out", out_dir, "Directory for CSV/JSON artifacts");
  auto* threads_opt = app.add_option("--threads", threads, "Worker threads (default: SPHEREFOLD_THREADS or hardware)");
  auto* seed_opt = app.add_option("--seed", seed, "Overrides the config seed");
  app.set_version_flag("--version", sf::cli::version());

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);
    std::cerr << sf::cli::error_json("usage", e.what()).dump() << '\n';
    return sf::cli::kExitConfig;
  }

  if (threads_opt->count() == 0) {
    if (const char* env = std::getenv("SPHEREFOLD_THREADS")) {
      try {
        threads = static_cast<unsigned>(std::stoul(env));
      } catch (const std::exception&) {
        std::cerr << sf::cli::error_json("usage", "SPHEREFOLD_THREADS must be a positive integer").dump() << '\n';
        return sf::cli::kExitConfig;
      }
    }
  }
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  sf::set_thread_count(threads);

  sf::cli::RunConfig cfg;
  try {
    cfg = sf::cli::parse_config(sf::io::read_file(config_path));
  } catch (const sf::cli::ConfigError& e) {
    std::cerr << sf::cli::error_json("config", "invalid config", e.errors()).dump() << '\n';
    return sf::cli::kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << sf::cli::error_json("config", e.what()).dump() << '\n';
    return sf::cli::kExitConfig;
  }
  if (seed_opt->count() > 0) cfg.seed = seed;

  const auto outcome = sf::cli::execute(cfg, {out_dir});
  std::cout << outcome.report.dump(2) << '\n';
  if (outcome.error) std::cerr << outcome.error->dump() << '\n';
  return outcome.exit_code;
}
