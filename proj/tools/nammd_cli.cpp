// Command-line front end for the experiment harness.
//
// Exit codes: 0 success, 1 configuration error, 2 runtime error.

#include "nammd/error.hpp"
#include "nammd/harness.hpp"

#include <CLI11.hpp>

#include <cstdint>
#include <iostream>
#include <optional>
#include <string>

int main(int argc, char** argv) {
  CLI::App app{"NAMMD closeness and two-sample testing experiments"};

  std::string config_path;
  std::optional<std::string> experiment;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out;
  std::optional<std::string> format;
  std::optional<int> threads;
  bool timing = false;

  app.add_option("--config", config_path, "JSON experiment configuration")->check(CLI::ExistingFile);
  app.add_option("--experiment", experiment,
                 "power_dct | power_tst | type1_dct | type1_tst | closeness_sweep | figure1_sweep | oracle_check");
  app.add_option("--seed", seed, "master seed");
  app.add_option("--out", out, "result file (stdout when omitted)");
  app.add_option("--format", format, "csv | json");
  app.add_option("--threads", threads, "worker threads")->check(CLI::PositiveNumber);
  app.add_flag("--timing", timing, "add a wall_seconds column (output is then not reproducible)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }

  nammd::ExperimentConfig cfg;
  try {
    if (!config_path.empty()) {
      cfg = nammd::load_config(config_path);
    } else if (!experiment) {
      throw nammd::ConfigError("either --config or --experiment is required");
    }
    if (experiment) cfg.kind = nammd::experiment_kind_from_string(*experiment);
    if (config_path.empty() && (cfg.kind == nammd::ExperimentKind::power_dct ||
                                cfg.kind == nammd::ExperimentKind::type1_dct)) {
      cfg.dataset.name = "learned";
    }
    if (config_path.empty() && cfg.kind == nammd::ExperimentKind::closeness_sweep) cfg.dataset.name = "uniform_tv";
    if (seed) cfg.seed = *seed;
    if (out) cfg.output = *out;
    if (format) cfg.format = nammd::output_format_from_string(*format);
    if (threads) cfg.threads = *threads;
    if (timing) cfg.include_timing = true;
    nammd::validate(cfg);
  } catch (const nammd::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 1;
  }

  try {
    const auto rows = nammd::run_experiment(cfg);
    if (cfg.output.empty()) {
      std::cout << nammd::format_results(rows, cfg.format, cfg.include_timing);
    } else {
      nammd::emit_results(rows, cfg.format, cfg.output, cfg.include_timing);
    }
  } catch (const nammd::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
