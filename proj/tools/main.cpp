#include <cstdio>
#include <iostream>

#include "CLI11.hpp"
#include "experiment.hpp"

namespace {

void print_summary(const svelab::cli::RunResult& r) {
  std::size_t width = 8;
  for (const auto& [k, v] : r.summary) width = std::max(width, k.size());
  std::cout << "experiment: " << r.kind << '\n';
  for (const auto& [k, v] : r.summary) std::cout << "  " << k << std::string(width - k.size() + 2, ' ') << v << '\n';
  for (const auto& a : r.artifacts) std::cout << "  wrote " << a << '\n';
}

}  // namespace

int main(int argc, char** argv) {
  using svelab::cli::ExitCode;
  CLI::App app{"svelab: stochastic Volterra equation experiments"};
  std::string config, describe, out;
  std::uint64_t seed = 0;
  unsigned workers = 1;
  auto* config_opt = app.add_option("--config", config, "experiment config (JSON)")->check(CLI::ExistingFile);
  auto* seed_opt = app.add_option("--seed", seed, "master seed, overrides numerics.master_seed");
  auto* workers_opt = app.add_option("--workers", workers, "worker threads (0 = hardware count)");
  auto* out_opt = app.add_option("--out", out, "output directory, overrides output.dir");
  auto* describe_opt = app.add_option("--describe", describe, "print the config schema of an experiment kind");
  app.add_flag("--validate-only", "check the config without running it");
  config_opt->excludes(describe_opt);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : static_cast<int>(ExitCode::usage);
  }

  if (*describe_opt) {
    try {
      std::cout << svelab::cli::describe(describe);
      return 0;
    } catch (const std::exception& e) {
      std::cerr << e.what() << '\n';
      return static_cast<int>(ExitCode::usage);
    }
  }
  if (!*config_opt) {
    std::cerr << "either --config or --describe is required\n" << app.help();
    return static_cast<int>(ExitCode::usage);
  }

  svelab::cli::Overrides ov;
  if (*seed_opt) ov.seed = seed;
  if (*workers_opt) ov.workers = workers;
  if (*out_opt) ov.out_dir = out;
  try {
    if (app.count("--validate-only")) {
      std::ifstream in(config);
      svelab::cli::validate_config(nlohmann::json::parse(in), ov);
      std::cout << "config ok\n";
      return 0;
    }
    print_summary(svelab::cli::run_file(config, ov));
    return 0;
  } catch (const nlohmann::json::parse_error& e) {
    std::cerr << "config is not valid JSON: " << e.what() << '\n';
    return static_cast<int>(ExitCode::validation);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return static_cast<int>(svelab::cli::exit_code_for(e));
  }
}
