#pragma once

#include "nammd/kernels.hpp"
#include "nammd/kernelsel.hpp"
#include "nammd/synthesis.hpp"
#include "nammd/types.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace nammd {

enum class ExperimentKind { power_dct, power_tst, type1_dct, type1_tst, closeness_sweep, figure1_sweep, oracle_check };
enum class OutputFormat { csv, json };

std::string_view to_string(ExperimentKind kind);
ExperimentKind experiment_kind_from_string(std::string_view name);
std::string_view to_string(OutputFormat format);
OutputFormat output_format_from_string(std::string_view name);

struct KernelSettings {
  KernelFamily family = KernelFamily::gaussian;
  std::optional<double> bandwidth;  // unset: median heuristic on each repetition's pooled sample
  bool select = false;              // optimize on a training split first (TST experiments)
  double train_fraction = 0.5;
  OptimizerConfig optimizer{0.05, 100};
};

struct DatasetSettings {
  std::string name = "blob";  // blob | hdgm | csv (TST); learned (DCT); uniform_tv (closeness)
  BlobConfig blob;
  HdgmConfig hdgm;
  std::string x_path;  // csv: two numeric files, or one labeled file in x_path
  std::string y_path;
  Index support_points = 50;  // learned: points per distribution
  Index dimension = 2;
  int construction_iterations = 5000;
  double construction_step = 0.01;
  double norm_margin = 0.5;   // power_dct: fraction of the admissible norm-gap window
  Index support_size = 50;     // uniform_tv: n
  double reference_tv = 0.3;   // uniform_tv: epsilon'
  std::vector<double> tv_gaps{0.0, 0.1, 0.2};
  std::vector<double> variances{0.1, 0.25, 0.5, 1.0, 1.5, 2.0};  // figure1_sweep
  double target_mmd2 = 0.15;
};

struct ExperimentConfig {
  ExperimentKind kind = ExperimentKind::type1_tst;
  int repetitions = 100;
  int outer_repeats = 1;
  std::vector<Index> sample_sizes{100};
  bool tune_sample_size = false;  // power_dct: search m so that MMD power is near tuned_power
  double tuned_power = 0.75;
  int tuning_repetitions = 100;
  double alpha = 0.05;
  std::vector<double> epsilons{0.1, 0.3, 0.5, 0.7};
  KernelSettings kernel;
  DatasetSettings dataset;
  std::vector<std::string> methods;  // empty: every method the experiment supports
  int permutations = 200;
  int canonne_resamples = 200;
  int fuse_half_width = 2;
  double fuse_lambda = 1.0;
  std::uint64_t seed = 0;
  int threads = 1;
  std::string output;
  OutputFormat format = OutputFormat::csv;
  bool include_timing = false;
};

/// Parses a JSON document; unknown keys and ill-typed values raise ConfigError.
ExperimentConfig parse_config(std::string_view json_text);
ExperimentConfig load_config(const std::string& path);
/// Throws ConfigError on any violated invariant.
void validate(const ExperimentConfig& cfg);

struct ResultRow {
  std::string experiment;
  std::string method;
  std::string dataset;
  std::string setting;  // free-form cell label, e.g. "gap=0.2"
  Index sample_size = 0;
  std::optional<double> alpha;
  std::optional<double> epsilon;
  int repetitions = 0;
  std::optional<double> rejection_rate;
  std::optional<double> rejection_se;
  std::optional<double> outer_std;  // std of the rejection rate across outer repeats
  std::optional<double> statistic_mean;
  std::optional<double> statistic_std;
  std::optional<double> exact;
  std::optional<double> p_value_mean;
  std::optional<double> p_value_median;
  std::string status = "ok";
  std::string message;
  std::optional<double> wall_seconds;
};

/// Column order shared by both output formats.
const std::vector<std::string>& result_columns(bool include_timing);

/// Runs every cell of the experiment. Cells that throw produce a row with
/// status "error" instead of aborting the run; invalid configs throw ConfigError.
std::vector<ResultRow> run_experiment(const ExperimentConfig& cfg);

std::string format_results(const std::vector<ResultRow>& rows, OutputFormat format, bool include_timing = false);

/// Writes to a temporary file next to `path` and renames it into place.
void emit_results(const std::vector<ResultRow>& rows, OutputFormat format, const std::string& path,
                  bool include_timing = false);

/// Rectangular numeric CSV, one point per row; an optional non-numeric header line is skipped.
Sample load_csv(const std::string& path);

/// CSV whose last column is a 0/1 label, as written by write_labeled_csv.
std::pair<Sample, Sample> load_labeled_csv(const std::string& path);

}  // namespace nammd
