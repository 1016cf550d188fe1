#include "nammd/harness.hpp"

#include "nammd/dct.hpp"
#include "nammd/error.hpp"
#include "nammd/estimators.hpp"
#include "nammd/stats.hpp"
#include "nammd/tst.hpp"

#include <json.hpp>

#include <algorithm>
#include <atomic>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <functional>
#include <mutex>
#include <numeric>
#include <set>
#include <sstream>
#include <thread>
#include <variant>

namespace nammd {

using json = nlohmann::json;

namespace {

constexpr std::uint64_t kConstructionStream = 1ULL << 40;
constexpr std::uint64_t kTuningStream = 1ULL << 41;

const std::vector<std::pair<ExperimentKind, std::string_view>> kKinds = {
    {ExperimentKind::power_dct, "power_dct"},           {ExperimentKind::power_tst, "power_tst"},
    {ExperimentKind::type1_dct, "type1_dct"},           {ExperimentKind::type1_tst, "type1_tst"},
    {ExperimentKind::closeness_sweep, "closeness_sweep"}, {ExperimentKind::figure1_sweep, "figure1_sweep"},
    {ExperimentKind::oracle_check, "oracle_check"},
};

}  // namespace

std::string_view to_string(ExperimentKind kind) {
  for (const auto& [k, name] : kKinds) {
    if (k == kind) return name;
  }
  return "unknown";
}

ExperimentKind experiment_kind_from_string(std::string_view name) {
  for (const auto& [k, n] : kKinds) {
    if (n == name) return k;
  }
  throw ConfigError("unknown experiment '" + std::string(name) + "'");
}

std::string_view to_string(OutputFormat format) { return format == OutputFormat::csv ? "csv" : "json"; }

OutputFormat output_format_from_string(std::string_view name) {
  if (name == "csv") return OutputFormat::csv;
  if (name == "json") return OutputFormat::json;
  throw ConfigError("unknown output format '" + std::string(name) + "' (expected csv or json)");
}

// ---------------------------------------------------------------------------
// configuration

namespace {

void reject_unknown_keys(const json& obj, const std::set<std::string>& allowed, const std::string& where) {
  if (!obj.is_object()) throw ConfigError(where + " must be a JSON object");
  for (const auto& item : obj.items()) {
    if (!allowed.count(item.key())) throw ConfigError("unknown key '" + item.key() + "' in " + where);
  }
}

template <class T>
void read(const json& obj, const char* key, T& out) {
  if (!obj.contains(key)) return;
  try {
    out = obj.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config key '") + key + "': " + e.what());
  }
}

template <class T>
void read_optional(const json& obj, const char* key, std::optional<T>& out) {
  if (!obj.contains(key) || obj.at(key).is_null()) return;
  T value{};
  read(obj, key, value);
  out = value;
}

Matrix read_matrix(const json& obj, const char* key, const Matrix& fallback) {
  if (!obj.contains(key)) return fallback;
  std::vector<std::vector<double>> rows;
  read(obj, key, rows);
  if (rows.empty()) throw ConfigError(std::string("config key '") + key + "' is empty");
  Matrix out(static_cast<Index>(rows.size()), static_cast<Index>(rows[0].size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].size() != rows[0].size()) throw ConfigError(std::string("config key '") + key + "' is ragged");
    for (std::size_t j = 0; j < rows[i].size(); ++j) out(static_cast<Index>(i), static_cast<Index>(j)) = rows[i][j];
  }
  return out;
}

KernelSettings parse_kernel(const json& obj) {
  reject_unknown_keys(obj, {"family", "bandwidth", "select", "train_fraction", "step_size", "iterations"}, "kernel");
  KernelSettings k;
  std::string family = "gaussian";
  read(obj, "family", family);
  k.family = kernel_family_from_string(family);
  if (obj.contains("bandwidth") && obj.at("bandwidth").is_string()) {
    if (obj.at("bandwidth").get<std::string>() != "median") {
      throw ConfigError("kernel bandwidth must be a number or \"median\"");
    }
  } else {
    read_optional(obj, "bandwidth", k.bandwidth);
  }
  read(obj, "select", k.select);
  read(obj, "train_fraction", k.train_fraction);
  read(obj, "step_size", k.optimizer.step_size);
  read(obj, "iterations", k.optimizer.iterations);
  return k;
}

DatasetSettings parse_dataset(const json& obj) {
  reject_unknown_keys(obj,
                      {"name", "grid_side", "cell_spacing", "null_covariance", "alt_covariance", "dimension",
                       "components", "component_spacing", "shifted_coordinates", "mean_shift", "x_path", "y_path",
                       "support_points", "construction_iterations", "construction_step", "norm_margin",
                       "support_size", "reference_tv", "tv_gaps", "variances", "target_mmd2"},
                      "dataset");
  DatasetSettings d;
  read(obj, "name", d.name);
  read(obj, "grid_side", d.blob.grid_side);
  read(obj, "cell_spacing", d.blob.cell_spacing);
  d.blob.null_covariance = read_matrix(obj, "null_covariance", d.blob.null_covariance);
  d.blob.alt_covariance = read_matrix(obj, "alt_covariance", d.blob.alt_covariance);
  long long dim = -1;
  read(obj, "dimension", dim);
  if (dim != -1) {
    d.dimension = dim;
    d.hdgm.dimension = dim;
  }
  read(obj, "components", d.hdgm.components);
  read(obj, "component_spacing", d.hdgm.component_spacing);
  long long shifted = d.hdgm.shifted_coordinates;
  read(obj, "shifted_coordinates", shifted);
  d.hdgm.shifted_coordinates = shifted;
  read(obj, "mean_shift", d.hdgm.mean_shift);
  read(obj, "x_path", d.x_path);
  read(obj, "y_path", d.y_path);
  long long support_points = d.support_points;
  read(obj, "support_points", support_points);
  d.support_points = support_points;
  read(obj, "construction_iterations", d.construction_iterations);
  read(obj, "construction_step", d.construction_step);
  read(obj, "norm_margin", d.norm_margin);
  long long support_size = d.support_size;
  read(obj, "support_size", support_size);
  d.support_size = support_size;
  read(obj, "reference_tv", d.reference_tv);
  read(obj, "tv_gaps", d.tv_gaps);
  read(obj, "variances", d.variances);
  read(obj, "target_mmd2", d.target_mmd2);
  return d;
}

}  // namespace

ExperimentConfig parse_config(std::string_view json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  reject_unknown_keys(doc,
                      {"experiment", "repetitions", "outer_repeats", "sample_sizes", "sample_size",
                       "tune_sample_size", "tuned_power", "tuning_repetitions", "alpha", "epsilons", "epsilon",
                       "kernel", "dataset", "methods", "permutations", "canonne_resamples", "fuse_half_width",
                       "fuse_lambda", "seed", "threads", "output", "format", "include_timing"},
                      "config");
  ExperimentConfig cfg;
  std::string kind = "type1_tst";
  read(doc, "experiment", kind);
  cfg.kind = experiment_kind_from_string(kind);
  read(doc, "repetitions", cfg.repetitions);
  read(doc, "outer_repeats", cfg.outer_repeats);
  if (doc.contains("sample_size")) {
    long long m = 0;
    read(doc, "sample_size", m);
    cfg.sample_sizes = {m};
  }
  if (doc.contains("sample_sizes")) {
    std::vector<long long> ms;
    read(doc, "sample_sizes", ms);
    cfg.sample_sizes.assign(ms.begin(), ms.end());
  }
  read(doc, "tune_sample_size", cfg.tune_sample_size);
  read(doc, "tuned_power", cfg.tuned_power);
  read(doc, "tuning_repetitions", cfg.tuning_repetitions);
  read(doc, "alpha", cfg.alpha);
  if (doc.contains("epsilon")) {
    double e = 0.0;
    read(doc, "epsilon", e);
    cfg.epsilons = {e};
  }
  read(doc, "epsilons", cfg.epsilons);
  if (doc.contains("kernel")) cfg.kernel = parse_kernel(doc.at("kernel"));
  if (doc.contains("dataset")) cfg.dataset = parse_dataset(doc.at("dataset"));
  read(doc, "methods", cfg.methods);
  read(doc, "permutations", cfg.permutations);
  read(doc, "canonne_resamples", cfg.canonne_resamples);
  read(doc, "fuse_half_width", cfg.fuse_half_width);
  read(doc, "fuse_lambda", cfg.fuse_lambda);
  read(doc, "seed", cfg.seed);
  read(doc, "threads", cfg.threads);
  read(doc, "output", cfg.output);
  if (doc.contains("format")) {
    std::string f;
    read(doc, "format", f);
    cfg.format = output_format_from_string(f);
  }
  read(doc, "include_timing", cfg.include_timing);
  return cfg;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

namespace {

std::vector<std::string> supported_methods(ExperimentKind kind) {
  switch (kind) {
    case ExperimentKind::power_tst:
    case ExperimentKind::type1_tst:
      return {"nammd", "mmd", "fuse"};
    case ExperimentKind::power_dct:
      return {"nammd", "mmd", "mmd_only"};
    case ExperimentKind::type1_dct:
      return {"nammd", "mmd"};
    case ExperimentKind::closeness_sweep:
      return {"nammd", "mmd", "canonne"};
    case ExperimentKind::figure1_sweep:
      return {"nammd", "mmd"};
    case ExperimentKind::oracle_check:
      return {"norm_p", "norm_q", "cross", "mmd2", "sigma2_m"};
  }
  return {};
}

std::vector<std::string> active_methods(const ExperimentConfig& cfg) {
  return cfg.methods.empty() ? supported_methods(cfg.kind) : cfg.methods;
}

bool wants(const std::vector<std::string>& methods, std::string_view name) {
  return std::find(methods.begin(), methods.end(), name) != methods.end();
}

}  // namespace

void validate(const ExperimentConfig& cfg) {
  if (cfg.repetitions < 1) throw ConfigError("repetitions must be at least 1");
  if (cfg.outer_repeats < 1) throw ConfigError("outer_repeats must be at least 1");
  if (cfg.threads < 1) throw ConfigError("threads must be at least 1");
  if (cfg.sample_sizes.empty()) throw ConfigError("sample_sizes must be nonempty");
  for (Index m : cfg.sample_sizes) {
    if (m < 4) throw ConfigError("every sample size must be at least 4");
  }
  if (!(cfg.alpha > 0.0 && cfg.alpha < 1.0)) throw ConfigError("alpha must lie in (0, 1)");
  if (cfg.permutations < 1) throw ConfigError("permutations must be at least 1");
  if (cfg.canonne_resamples < 100) throw ConfigError("canonne_resamples must be at least 100");
  if (cfg.kernel.bandwidth && !(*cfg.kernel.bandwidth > 0.0)) throw ConfigError("kernel bandwidth must be positive");
  if (!(cfg.kernel.train_fraction > 0.0 && cfg.kernel.train_fraction < 1.0)) {
    throw ConfigError("kernel train_fraction must lie in (0, 1)");
  }
  if (cfg.tune_sample_size && !(cfg.tuned_power > cfg.alpha && cfg.tuned_power < 1.0)) {
    throw ConfigError("tuned_power must lie in (alpha, 1)");
  }
  if (cfg.tuning_repetitions < 10) throw ConfigError("tuning_repetitions must be at least 10");
  const auto supported = supported_methods(cfg.kind);
  for (const auto& m : cfg.methods) {
    if (!wants(supported, m)) {
      throw ConfigError("method '" + m + "' is not available for " + std::string(to_string(cfg.kind)));
    }
  }
  const bool dct = cfg.kind == ExperimentKind::power_dct || cfg.kind == ExperimentKind::type1_dct;
  if (dct) {
    if (cfg.epsilons.empty()) throw ConfigError("epsilons must be nonempty");
    for (double e : cfg.epsilons) {
      if (!(e > 0.0 && e < 0.99)) throw ConfigError("DCT epsilons must lie in (0, 0.99)");
    }
    if (cfg.dataset.name != "learned") throw ConfigError("DCT experiments use dataset 'learned'");
    if (cfg.dataset.support_points < 2 || cfg.dataset.dimension < 1) throw ConfigError("invalid learned point sets");
    if (cfg.dataset.construction_iterations < 1) throw ConfigError("construction_iterations must be positive");
    if (!(cfg.dataset.norm_margin > 0.0 && cfg.dataset.norm_margin < 1.0)) {
      throw ConfigError("norm_margin must lie in (0, 1)");
    }
  }
  if (cfg.kind == ExperimentKind::power_tst || cfg.kind == ExperimentKind::type1_tst) {
    const auto& n = cfg.dataset.name;
    if (n != "blob" && n != "hdgm" && n != "csv") throw ConfigError("TST datasets are blob, hdgm or csv");
    if (n == "csv" && cfg.dataset.x_path.empty()) throw ConfigError("csv dataset needs x_path");
  }
  if (cfg.kind == ExperimentKind::closeness_sweep) {
    if (cfg.dataset.name != "uniform_tv") throw ConfigError("closeness_sweep uses dataset 'uniform_tv'");
    if (cfg.dataset.tv_gaps.empty()) throw ConfigError("tv_gaps must be nonempty");
    if (cfg.dataset.support_size < 2) throw ConfigError("support_size must be at least 2");
  }
  if (cfg.kind == ExperimentKind::figure1_sweep && cfg.dataset.variances.empty()) {
    throw ConfigError("variances must be nonempty");
  }
}

// ---------------------------------------------------------------------------
// execution helpers

namespace {

/// Calls fn(i) for i in [0, n) on `threads` workers. Results are written by index,
/// so the outcome does not depend on scheduling. The first exception is rethrown.
void parallel_for(int n, int threads, const std::function<void(int)>& fn) {
  if (threads <= 1 || n <= 1) {
    for (int i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<int> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&] {
    for (int i = next++; i < n; i = next++) {
      try {
        fn(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next = n;
      }
    }
  };
  std::vector<std::thread> pool;
  const int count = std::min(threads, n);
  for (int t = 0; t < count; ++t) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
}

struct MethodTrace {
  std::vector<char> reject;
  std::vector<double> statistic;
  std::vector<double> p_value;

  explicit MethodTrace(int n = 0)
      : reject(static_cast<std::size_t>(n), 0),
        statistic(static_cast<std::size_t>(n), std::nan("")),
        p_value(static_cast<std::size_t>(n), std::nan("")) {}

  void record(int i, const TestOutcome& t) {
    reject[static_cast<std::size_t>(i)] = t.reject ? 1 : 0;
    statistic[static_cast<std::size_t>(i)] = t.statistic;
    if (t.p_value) p_value[static_cast<std::size_t>(i)] = *t.p_value;
  }
};

double sample_std(std::span<const double> v) {
  if (v.size() < 2) return 0.0;
  const double mean = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
  double ss = 0.0;
  for (double x : v) ss += (x - mean) * (x - mean);
  return std::sqrt(ss / static_cast<double>(v.size() - 1));
}

std::vector<double> finite_values(const std::vector<double>& v) {
  std::vector<double> out;
  for (double x : v) {
    if (std::isfinite(x)) out.push_back(x);
  }
  return out;
}

void fill_statistic(ResultRow& row, const std::vector<double>& stats) {
  const auto s = finite_values(stats);
  if (s.empty()) return;
  row.statistic_mean = std::accumulate(s.begin(), s.end(), 0.0) / static_cast<double>(s.size());
  row.statistic_std = sample_std(s);
}

void fill_rejections(ResultRow& row, const std::vector<char>& reject, int outer_repeats) {
  const auto n = static_cast<int>(reject.size());
  std::vector<double> r(reject.begin(), reject.end());
  const MeanStderr ms = mean_stderr(r);
  row.rejection_rate = ms.mean;
  row.rejection_se = ms.std_error;
  const int per = n / outer_repeats;
  std::vector<double> rates;
  for (int o = 0; o < outer_repeats; ++o) {
    const auto first = r.begin() + static_cast<std::ptrdiff_t>(o) * per;
    rates.push_back(std::accumulate(first, first + per, 0.0) / static_cast<double>(per));
  }
  row.outer_std = sample_std(rates);
}

ResultRow summarize_trace(const ResultRow& base, const MethodTrace& t, int outer_repeats) {
  ResultRow row = base;
  row.repetitions = static_cast<int>(t.reject.size());
  fill_rejections(row, t.reject, outer_repeats);
  fill_statistic(row, t.statistic);
  auto p = finite_values(t.p_value);
  if (!p.empty()) {
    row.p_value_mean = std::accumulate(p.begin(), p.end(), 0.0) / static_cast<double>(p.size());
    std::sort(p.begin(), p.end());
    const std::size_t h = p.size() / 2;
    row.p_value_median = p.size() % 2 ? p[h] : 0.5 * (p[h - 1] + p[h]);
  }
  return row;
}

std::string format_number(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

KernelSpec make_kernel(KernelFamily family, double bandwidth, Index dim) {
  switch (family) {
    case KernelFamily::gaussian:
      return KernelSpec::gaussian(bandwidth);
    case KernelFamily::laplace:
      return KernelSpec::laplace(bandwidth);
    case KernelFamily::mahalanobis:
      return KernelSpec::mahalanobis(Matrix::Identity(dim, dim), bandwidth);
  }
  throw ConfigError("unknown kernel family");
}

KernelSpec kernel_for(const KernelSettings& k, const Sample& x, const Sample& y) {
  const double bw = k.bandwidth ? *k.bandwidth : median_heuristic(x, y);
  return make_kernel(k.family, bw, x.dimension());
}

struct Context {
  const ExperimentConfig& cfg;
  std::vector<std::string> methods;
  std::uint64_t cell = 0;  // running cell id, the stream of derive_seed
  std::vector<ResultRow> rows;

  int total_reps() const { return cfg.repetitions * cfg.outer_repeats; }

  ResultRow base_row(std::string method, std::string setting, Index m) const {
    ResultRow r;
    r.experiment = std::string(to_string(cfg.kind));
    r.method = std::move(method);
    r.dataset = cfg.dataset.name;
    r.setting = std::move(setting);
    r.sample_size = m;
    r.alpha = cfg.alpha;
    return r;
  }

  // Runs `body` for one cell; any toolkit error becomes error rows for `methods_here`.
  void cell_guard(const std::string& setting, Index m, const std::vector<std::string>& methods_here,
                  const std::function<void(std::vector<ResultRow>&)>& body) {
    const auto start = std::chrono::steady_clock::now();
    std::vector<ResultRow> produced;
    try {
      body(produced);
    } catch (const ConfigError&) {
      throw;
    } catch (const Error& e) {
      produced.clear();
      for (const auto& meth : methods_here) {
        ResultRow r = base_row(meth, setting, m);
        r.status = "error";
        r.message = e.what();
        produced.push_back(std::move(r));
      }
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    for (auto& r : produced) {
      if (cfg.include_timing) r.wall_seconds = secs;
      rows.push_back(std::move(r));
    }
    ++cell;
  }
};

std::string setting_label(std::string_view key, double value) { return std::string(key) + "=" + format_number(value); }

// ---------------------------------------------------------------------------
// two-sample experiments

struct CsvPools {
  std::optional<Sample> x;
  std::optional<Sample> y;
};

Sample draw_rows(const Sample& pool, Index count, Rng& rng, std::vector<Index>* rest = nullptr) {
  if (pool.size() < count) {
    throw InputError("csv pool holds " + std::to_string(pool.size()) + " rows, need " + std::to_string(count));
  }
  std::vector<Index> idx(static_cast<std::size_t>(pool.size()));
  std::iota(idx.begin(), idx.end(), Index{0});
  std::shuffle(idx.begin(), idx.end(), rng);
  if (rest) rest->assign(idx.begin() + count, idx.end());
  idx.resize(static_cast<std::size_t>(count));
  return pool.select(idx);
}

std::pair<Sample, Sample> tst_data(const ExperimentConfig& cfg, const CsvPools& pools, MixtureMode mode, Index m,
                                   Rng& rng) {
  const auto& d = cfg.dataset;
  if (d.name == "blob") return blob_pair(d.blob, mode, m, rng);
  if (d.name == "hdgm") return hdgm_pair(d.hdgm, mode, m, rng);
  if (mode == MixtureMode::null) {
    Sample both = draw_rows(*pools.x, 2 * m, rng);
    std::vector<Index> first(static_cast<std::size_t>(m)), second(static_cast<std::size_t>(m));
    std::iota(first.begin(), first.end(), Index{0});
    std::iota(second.begin(), second.end(), m);
    return {both.select(first), both.select(second)};
  }
  return {draw_rows(*pools.x, m, rng), draw_rows(*pools.y, m, rng)};
}

CsvPools load_pools(const DatasetSettings& d) {
  CsvPools p;
  if (d.name != "csv") return p;
  if (d.y_path.empty()) {
    auto [x, y] = load_labeled_csv(d.x_path);
    p.x = std::move(x);
    p.y = std::move(y);
  } else {
    p.x = load_csv(d.x_path);
    p.y = load_csv(d.y_path);
  }
  return p;
}

void run_tst(Context& ctx, MixtureMode mode) {
  const auto& cfg = ctx.cfg;
  const CsvPools pools = load_pools(cfg.dataset);
  const bool want_pair = wants(ctx.methods, "nammd") || wants(ctx.methods, "mmd");
  const bool want_fuse = wants(ctx.methods, "fuse");
  for (Index m : cfg.sample_sizes) {
    const std::string setting = mode == MixtureMode::null ? "null" : "alternative";
    ctx.cell_guard(setting, m, ctx.methods, [&](std::vector<ResultRow>& out) {
      const int n = ctx.total_reps();
      MethodTrace nammd(n), mmd(n), fuse(n);
      const std::uint64_t stream = ctx.cell;
      const double f = cfg.kernel.train_fraction;
      const Index drawn = cfg.kernel.select ? static_cast<Index>(std::llround(static_cast<double>(m) / (1.0 - f))) : m;
      parallel_for(n, cfg.threads, [&](int i) {
        Rng rng(derive_seed(cfg.seed, stream, static_cast<std::uint64_t>(i)));
        auto [x, y] = tst_data(cfg, pools, mode, drawn, rng);
        const PermutationPlan plan{cfg.permutations, rng()};
        if (cfg.kernel.select) {
          TrainTestSplit split = split_train_test(x, y, f, rng);
          const KernelSpec init = kernel_for(cfg.kernel, split.x_train, split.y_train);
          const KernelSpec chosen = select_kernel(split.x_train, split.y_train, init, cfg.kernel.optimizer).spec;
          x = std::move(split.x_test);
          y = std::move(split.y_test);
          if (want_pair) {
            const auto both = paired_permutation_test(x, y, chosen, cfg.alpha, plan);
            nammd.record(i, both.nammd);
            mmd.record(i, both.mmd2);
          }
        } else if (want_pair) {
          const auto both = paired_permutation_test(x, y, kernel_for(cfg.kernel, x, y), cfg.alpha, plan);
          nammd.record(i, both.nammd);
          mmd.record(i, both.mmd2);
        }
        if (want_fuse) {
          const KernelBank bank = gaussian_bank(x, y, cfg.fuse_half_width, cfg.fuse_lambda);
          fuse.record(i, permutation_test(x, y, bank, cfg.alpha, plan));
        }
      });
      if (wants(ctx.methods, "nammd")) out.push_back(summarize_trace(ctx.base_row("nammd", setting, m), nammd, cfg.outer_repeats));
      if (wants(ctx.methods, "mmd")) out.push_back(summarize_trace(ctx.base_row("mmd", setting, m), mmd, cfg.outer_repeats));
      if (want_fuse) out.push_back(summarize_trace(ctx.base_row("fuse", setting, m), fuse, cfg.outer_repeats));
    });
  }
}

// ---------------------------------------------------------------------------
// closeness experiments on learned pairs

struct LearnedSetup {
  DiscretePair pair;      // distribution the test samples come from
  Matrix gram;            // kernel on pair.support()
  KernelSpec spec;
  double eps_nammd = 0.0;  // closeness levels handed to the tests
  double eps_mmd = 0.0;
  PointSetMoments tested;  // exact moments of `pair`
  std::string note;
};

LearnedPair learn(const Sample& z, const Sample& zp, const KernelSpec& spec, double target,
                  const DatasetSettings& d, std::optional<double> norm_target = std::nullopt) {
  TargetConfig tc;
  tc.optimizer.iterations = d.construction_iterations;
  tc.optimizer.step_size = d.construction_step;
  tc.norm_sum_target = norm_target;
  LearnedPair lp = learn_target_nammd(z, zp, spec, target, tc);
  if (!lp.converged) {
    throw InfeasibleError("construction did not reach NAMMD " + format_number(target) + " (best " +
                          format_number(lp.moments.nammd) + ")");
  }
  return lp;
}

std::pair<Sample, Sample> initial_point_sets(const DatasetSettings& d, Rng& rng) {
  std::normal_distribution<double> normal;
  Matrix z(d.support_points, d.dimension), zp(d.support_points, d.dimension);
  for (Index i = 0; i < z.rows(); ++i) {
    for (Index c = 0; c < z.cols(); ++c) {
      z(i, c) = normal(rng);
      zp(i, c) = normal(rng) + (c == 0 ? 1.0 : 0.0);
    }
  }
  return {Sample(std::move(z)), Sample(std::move(zp))};
}

LearnedSetup finish_setup(const LearnedPair& tested, const KernelSpec& spec) {
  LearnedSetup s{uniform_pair(tested.z, tested.zp), {}, spec, 0.0, 0.0, tested.moments, {}};
  s.gram = gram_matrix(spec, s.pair.support());
  return s;
}

/// Boundary case: the tested pair itself sits exactly at the closeness levels.
LearnedSetup type1_setup(const ExperimentConfig& cfg, double epsilon, Rng& rng) {
  auto [z, zp] = initial_point_sets(cfg.dataset, rng);
  const double bw = cfg.kernel.bandwidth ? *cfg.kernel.bandwidth : median_heuristic(z, zp);
  const KernelSpec spec = make_kernel(KernelFamily::gaussian, bw, z.dimension());
  LearnedSetup s = finish_setup(learn(z, zp, spec, epsilon, cfg.dataset), spec);
  s.eps_nammd = s.tested.nammd;
  s.eps_mmd = s.tested.mmd2;
  return s;
}

/// Reference pair at NAMMD epsilon and tested pair at epsilon + 0.01 whose norm sum exceeds
/// the reference's by a fraction `norm_margin` of the window that keeps MMD ordered the same way.
LearnedSetup dominance_setup(const ExperimentConfig& cfg, double epsilon, Rng& rng) {
  auto [z, zp] = initial_point_sets(cfg.dataset, rng);
  const double bw = cfg.kernel.bandwidth ? *cfg.kernel.bandwidth : median_heuristic(z, zp);
  const KernelSpec spec = make_kernel(KernelFamily::gaussian, bw, z.dimension());
  const double K = spec.upper_bound();
  const LearnedPair tested = learn(z, zp, spec, epsilon + 0.01, cfg.dataset);
  const double norms2 = tested.moments.norm_p + tested.moments.norm_q;
  const double d2 = 4.0 * K - norms2;
  const double gap = cfg.dataset.norm_margin * 0.01 * d2 / epsilon;
  const LearnedPair reference = learn(tested.z, tested.zp, spec, epsilon, cfg.dataset, norms2 - gap);

  LearnedSetup s = finish_setup(tested, spec);
  s.eps_nammd = reference.moments.nammd;
  s.eps_mmd = reference.moments.mmd2;
  const double norms1 = reference.moments.norm_p + reference.moments.norm_q;
  if (!(s.tested.nammd > s.eps_nammd && s.tested.mmd2 > s.eps_mmd && norms1 < norms2)) {
    s.note = "constructed pairs violate the ordering conditions";
  }
  return s;
}

struct DctPair {
  TestOutcome nammd;
  TestOutcome mmd;
};

DctPair dct_once(const LearnedSetup& s, Index m, double alpha, Rng& rng) {
  const GramSummary g = sample_discrete_summary(s.pair, s.gram, s.spec.upper_bound(), m, rng);
  return {nammd_dct(g, s.eps_nammd, alpha), mmd_dct(g, s.eps_mmd, alpha)};
}

double mmd_power(const LearnedSetup& s, Index m, const ExperimentConfig& cfg, std::uint64_t stream) {
  std::vector<char> rej(static_cast<std::size_t>(cfg.tuning_repetitions));
  parallel_for(cfg.tuning_repetitions, cfg.threads, [&](int i) {
    Rng rng(derive_seed(cfg.seed, stream, static_cast<std::uint64_t>(i)));
    rej[static_cast<std::size_t>(i)] = dct_once(s, m, cfg.alpha, rng).mmd.reject ? 1 : 0;
  });
  return std::accumulate(rej.begin(), rej.end(), 0.0) / static_cast<double>(rej.size());
}

/// Smallest m (to ~5%) with pilot MMD power at least cfg.tuned_power: doubling then bisection.
Index tune_sample_size(const LearnedSetup& s, const ExperimentConfig& cfg, std::uint64_t stream) {
  constexpr Index kMaxM = Index{1} << 24;
  Index lo = cfg.sample_sizes.front(), hi = lo;
  std::uint64_t probe = 0;
  while (mmd_power(s, hi, cfg, stream + (probe++ << 20)) < cfg.tuned_power) {
    lo = hi;
    hi *= 2;
    if (hi > kMaxM) throw InfeasibleError("MMD power stays below the tuning target up to m = 2^24");
  }
  if (hi == lo) return hi;
  while (static_cast<double>(hi - lo) > 0.05 * static_cast<double>(hi)) {
    const Index mid = lo + (hi - lo) / 2;
    (mmd_power(s, mid, cfg, stream + (probe++ << 20)) < cfg.tuned_power ? lo : hi) = mid;
  }
  return hi;
}

void run_dct(Context& ctx, bool power) {
  const auto& cfg = ctx.cfg;
  for (double eps : cfg.epsilons) {
    const std::string setting = setting_label("epsilon", eps);
    std::vector<Index> sizes = cfg.sample_sizes;
    if (power && cfg.tune_sample_size) sizes = {cfg.sample_sizes.front()};
    for (Index m0 : sizes) {
      ctx.cell_guard(setting, m0, ctx.methods, [&](std::vector<ResultRow>& out) {
        Rng build_rng(derive_seed(cfg.seed, kConstructionStream + ctx.cell));
        const LearnedSetup s = power ? dominance_setup(cfg, eps, build_rng) : type1_setup(cfg, eps, build_rng);
        const Index m = power && cfg.tune_sample_size ? tune_sample_size(s, cfg, kTuningStream + (ctx.cell << 24)) : m0;
        const int n = ctx.total_reps();
        MethodTrace nammd(n), mmd(n), only(n);
        const std::uint64_t stream = ctx.cell;
        parallel_for(n, cfg.threads, [&](int i) {
          Rng rng(derive_seed(cfg.seed, stream, static_cast<std::uint64_t>(i)));
          const DctPair r = dct_once(s, m, cfg.alpha, rng);
          nammd.record(i, r.nammd);
          mmd.record(i, r.mmd);
          only.reject[static_cast<std::size_t>(i)] = r.mmd.reject && !r.nammd.reject;
        });
        auto row = [&](const char* method, const MethodTrace& t, double level, double truth) {
          ResultRow r = summarize_trace(ctx.base_row(method, setting, m), t, cfg.outer_repeats);
          r.epsilon = level;
          r.exact = truth;
          r.message = s.note;
          if (!s.note.empty()) r.status = "warning";
          return r;
        };
        if (wants(ctx.methods, "nammd")) out.push_back(row("nammd", nammd, s.eps_nammd, s.tested.nammd));
        if (wants(ctx.methods, "mmd")) out.push_back(row("mmd", mmd, s.eps_mmd, s.tested.mmd2));
        if (power && wants(ctx.methods, "mmd_only")) {
          ResultRow r = ctx.base_row("mmd_only", setting, m);
          r.repetitions = n;
          fill_rejections(r, only.reject, cfg.outer_repeats);
          r.message = s.note;
          out.push_back(std::move(r));
        }
      });
    }
  }
}

// ---------------------------------------------------------------------------
// total-variation closeness sweep

void run_closeness(Context& ctx) {
  const auto& cfg = ctx.cfg;
  const auto& d = cfg.dataset;
  const Matrix support = integer_support(d.support_size);
  Rng ref_rng(derive_seed(cfg.seed, kConstructionStream));
  const DiscretePair reference = uniform_with_tv(support, d.reference_tv, ref_rng);
  const Sample support_sample(support);
  const double bw = cfg.kernel.bandwidth ? *cfg.kernel.bandwidth : median_heuristic(support);
  const KernelSpec spec = make_kernel(cfg.kernel.family, bw, 1);
  const Matrix gram = gram_matrix(spec, support);
  const double K = spec.upper_bound();
  const double ref_nammd = exact_discrete_nammd(reference, gram, K);
  const double ref_mmd = exact_discrete_mmd2(reference, gram);

  for (std::size_t gi = 0; gi < d.tv_gaps.size(); ++gi) {
    const double gap = d.tv_gaps[gi];
    const std::string setting = setting_label("gap", gap);
    for (Index m : cfg.sample_sizes) {
      ctx.cell_guard(setting, m, ctx.methods, [&](std::vector<ResultRow>& out) {
        Rng test_rng(derive_seed(cfg.seed, kConstructionStream, gi + 1));
        const DiscretePair tested = uniform_with_tv(support, d.reference_tv + gap, test_rng);
        const int n = ctx.total_reps();
        MethodTrace nammd(n), mmd(n), canonne(n);
        const std::uint64_t stream = ctx.cell;
        const bool kernel_tests = wants(ctx.methods, "nammd") || wants(ctx.methods, "mmd");
        parallel_for(n, cfg.threads, [&](int i) {
          Rng rng(derive_seed(cfg.seed, stream, static_cast<std::uint64_t>(i)));
          if (kernel_tests) {
            const GramSummary g = sample_discrete_summary(tested, gram, K, m, rng);
            nammd.record(i, nammd_dct(g, ref_nammd, cfg.alpha));
            mmd.record(i, mmd_dct(g, ref_mmd, cfg.alpha));
          }
          if (wants(ctx.methods, "canonne")) {
            canonne.record(i, canonne_dct(reference, tested, {m, cfg.alpha, cfg.canonne_resamples}, rng));
          }
        });
        auto row = [&](const char* method, const MethodTrace& t, double level, double truth) {
          ResultRow r = summarize_trace(ctx.base_row(method, setting, m), t, cfg.outer_repeats);
          r.epsilon = level;
          r.exact = truth;
          return r;
        };
        if (wants(ctx.methods, "nammd")) out.push_back(row("nammd", nammd, ref_nammd, exact_discrete_nammd(tested, gram, K)));
        if (wants(ctx.methods, "mmd")) out.push_back(row("mmd", mmd, ref_mmd, exact_discrete_mmd2(tested, gram)));
        if (wants(ctx.methods, "canonne")) {
          out.push_back(row("canonne", canonne, d.reference_tv, tv_distance(tested.p(), tested.q())));
        }
      });
    }
  }
}

// ---------------------------------------------------------------------------
// closed-form checks

Sample normal_sample(Index m, double mean, double variance, Rng& rng) {
  std::normal_distribution<double> dist(mean, std::sqrt(variance));
  Matrix pts(m, 1);
  for (Index i = 0; i < m; ++i) pts(i, 0) = dist(rng);
  return Sample(std::move(pts));
}

struct MomentEstimates {
  double norm_p, norm_q, cross, mmd2, nammd, sigma2_m;
};

MomentEstimates estimate_moments(const KernelSpec& spec, Index m, double var_p, double var_q, double gap, Rng& rng) {
  const Sample x = normal_sample(m, 0.0, var_p, rng);
  const Sample y = normal_sample(m, gap, var_q, rng);
  const GramSummary s = summarize(spec, x, y);
  const double pairs = static_cast<double>(m) * static_cast<double>(m - 1);
  return {s.sum_xx / pairs,
          s.sum_yy / pairs,
          s.sum_xy / (static_cast<double>(m) * static_cast<double>(m)),
          mmd2_u_statistic(s),
          nammd_u_statistic(s),
          mmd_asymptotic_variance(variance_components(s), m)};
}

void run_gaussian_cells(Context& ctx, const std::vector<std::tuple<std::string, double, double, double>>& cells,
                        double bw) {
  const auto& cfg = ctx.cfg;
  const KernelSpec spec = KernelSpec::gaussian(bw);
  for (const auto& [label, var_p, var_q, gap] : cells) {
    const Index m = cfg.sample_sizes.front();
    ctx.cell_guard(label, m, ctx.methods, [&, label = label, var_p = var_p, var_q = var_q, gap = gap](auto& out) {
      const GaussianMoments g = gaussian_moment_oracle(var_p, var_q, gap, bw);
      const double nammd_exact = g.mmd2 / (4.0 * spec.upper_bound() - g.norm_p - g.norm_q);
      const int n = ctx.total_reps();
      std::vector<MomentEstimates> est(static_cast<std::size_t>(n));
      const std::uint64_t stream = ctx.cell;
      parallel_for(n, cfg.threads, [&](int i) {
        Rng rng(derive_seed(cfg.seed, stream, static_cast<std::uint64_t>(i)));
        est[static_cast<std::size_t>(i)] = estimate_moments(spec, m, var_p, var_q, gap, rng);
      });
      auto row = [&](const std::string& method, double MomentEstimates::*field, std::optional<double> exact) {
        ResultRow r = ctx.base_row(method, label, m);
        r.alpha.reset();
        r.repetitions = n;
        std::vector<double> v;
        for (const auto& e : est) v.push_back(e.*field);
        fill_statistic(r, v);
        r.exact = exact;
        return r;
      };
      const bool fig = cfg.kind == ExperimentKind::figure1_sweep;
      if (fig) {
        if (wants(ctx.methods, "nammd")) out.push_back(row("nammd", &MomentEstimates::nammd, nammd_exact));
        if (wants(ctx.methods, "mmd")) out.push_back(row("mmd", &MomentEstimates::mmd2, g.mmd2));
        return;
      }
      if (wants(ctx.methods, "norm_p")) out.push_back(row("norm_p", &MomentEstimates::norm_p, g.norm_p));
      if (wants(ctx.methods, "norm_q")) out.push_back(row("norm_q", &MomentEstimates::norm_q, g.norm_q));
      if (wants(ctx.methods, "cross")) out.push_back(row("cross", &MomentEstimates::cross, g.cross));
      if (wants(ctx.methods, "mmd2")) out.push_back(row("mmd2", &MomentEstimates::mmd2, g.mmd2));
      if (wants(ctx.methods, "sigma2_m")) out.push_back(row("sigma2_m", &MomentEstimates::sigma2_m, std::nullopt));
    });
  }
}

void run_oracle_check(Context& ctx) {
  const double bw = ctx.cfg.kernel.bandwidth ? *ctx.cfg.kernel.bandwidth : 1.0 / std::sqrt(2.0);
  run_gaussian_cells(ctx,
                     {{"var_0.01_1", 0.01, 1.0, 0.0}, {"var_1.1_1.6", 1.1, 1.6, 0.0}, {"var_0.5_1", 0.5, 1.0, 0.0}},
                     bw);
}

void run_figure1(Context& ctx) {
  const auto& d = ctx.cfg.dataset;
  const double bw = ctx.cfg.kernel.bandwidth ? *ctx.cfg.kernel.bandwidth : 1.0 / std::sqrt(2.0);
  std::vector<std::tuple<std::string, double, double, double>> cells;
  for (double v : d.variances) {
    const double gap = constant_mmd_gaussian_sweep(v, d.target_mmd2, bw);
    cells.emplace_back(setting_label("variance", v) + ";" + setting_label("gap", gap), v, v, gap);
  }
  run_gaussian_cells(ctx, cells, bw);
}

}  // namespace

std::vector<ResultRow> run_experiment(const ExperimentConfig& cfg) {
  validate(cfg);
  Context ctx{cfg, active_methods(cfg), 0, {}};
  switch (cfg.kind) {
    case ExperimentKind::power_tst:
      run_tst(ctx, MixtureMode::alternative);
      break;
    case ExperimentKind::type1_tst:
      run_tst(ctx, MixtureMode::null);
      break;
    case ExperimentKind::power_dct:
      run_dct(ctx, true);
      break;
    case ExperimentKind::type1_dct:
      run_dct(ctx, false);
      break;
    case ExperimentKind::closeness_sweep:
      run_closeness(ctx);
      break;
    case ExperimentKind::figure1_sweep:
      run_figure1(ctx);
      break;
    case ExperimentKind::oracle_check:
      run_oracle_check(ctx);
      break;
  }
  return std::move(ctx.rows);
}

// ---------------------------------------------------------------------------
// output

const std::vector<std::string>& result_columns(bool include_timing) {
  static const std::vector<std::string> base = {
      "experiment",     "method",        "dataset",        "setting",   "sample_size", "alpha",
      "epsilon",        "repetitions",   "rejection_rate", "rejection_se", "outer_std", "statistic_mean",
      "statistic_std",  "exact",         "p_value_mean",   "p_value_median", "status",  "message"};
  static const std::vector<std::string> timed = [] {
    auto v = base;
    v.push_back("wall_seconds");
    return v;
  }();
  return include_timing ? timed : base;
}

namespace {

using Cell = std::variant<std::monostate, std::string, long long, double>;

std::vector<Cell> row_cells(const ResultRow& r, bool include_timing) {
  auto opt = [](const std::optional<double>& v) -> Cell {
    if (v && std::isfinite(*v)) return *v;
    return std::monostate{};
  };
  std::vector<Cell> c = {r.experiment,
                         r.method,
                         r.dataset,
                         r.setting,
                         static_cast<long long>(r.sample_size),
                         opt(r.alpha),
                         opt(r.epsilon),
                         static_cast<long long>(r.repetitions),
                         opt(r.rejection_rate),
                         opt(r.rejection_se),
                         opt(r.outer_std),
                         opt(r.statistic_mean),
                         opt(r.statistic_std),
                         opt(r.exact),
                         opt(r.p_value_mean),
                         opt(r.p_value_median),
                         r.status,
                         r.message};
  if (include_timing) c.push_back(opt(r.wall_seconds));
  return c;
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char ch : s) {
    if (ch == '"') out += '"';
    out += ch;
  }
  return out + "\"";
}

}  // namespace

std::string format_results(const std::vector<ResultRow>& rows, OutputFormat format, bool include_timing) {
  const auto& cols = result_columns(include_timing);
  if (format == OutputFormat::csv) {
    std::string out;
    for (std::size_t i = 0; i < cols.size(); ++i) out += (i ? "," : "") + cols[i];
    out += '\n';
    for (const auto& r : rows) {
      const auto cells = row_cells(r, include_timing);
      for (std::size_t i = 0; i < cells.size(); ++i) {
        if (i) out += ',';
        std::visit(
            [&out](const auto& v) {
              using T = std::decay_t<decltype(v)>;
              if constexpr (std::is_same_v<T, std::string>) {
                out += csv_field(v);
              } else if constexpr (std::is_same_v<T, long long>) {
                out += std::to_string(v);
              } else if constexpr (std::is_same_v<T, double>) {
                out += format_number(v);
              }
            },
            cells[i]);
      }
      out += '\n';
    }
    return out;
  }
  nlohmann::ordered_json doc = nlohmann::ordered_json::array();
  for (const auto& r : rows) {
    nlohmann::ordered_json rec = nlohmann::ordered_json::object();
    const auto cells = row_cells(r, include_timing);
    for (std::size_t i = 0; i < cells.size(); ++i) {
      std::visit(
          [&](const auto& v) {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, std::monostate>) {
              rec[cols[i]] = nullptr;
            } else {
              rec[cols[i]] = v;
            }
          },
          cells[i]);
    }
    doc.push_back(std::move(rec));
  }
  return doc.dump(2) + "\n";
}

void emit_results(const std::vector<ResultRow>& rows, OutputFormat format, const std::string& path,
                  bool include_timing) {
  if (rows.empty()) throw InputError("no result rows to emit");
  const std::string text = format_results(rows, format, include_timing);
  namespace fs = std::filesystem;
  const fs::path target(path);
  fs::path tmp = target;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open '" + tmp.string() + "' for writing");
    out << text;
    out.flush();
    if (!out) throw IoError("write to '" + tmp.string() + "' failed");
  }
  std::error_code ec;
  fs::rename(tmp, target, ec);
  if (ec) {
    fs::remove(tmp, ec);
    throw IoError("cannot move results into '" + path + "'");
  }
}

// ---------------------------------------------------------------------------
// input

namespace {

std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  std::stringstream ss(line);
  while (std::getline(ss, field, ',')) out.push_back(field);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

bool parse_double(const std::string& text, double& out) {
  const std::string t = trim(text);
  if (t.empty()) return false;
  const char* first = t.data();
  const char* last = t.data() + t.size();
  if (*first == '+') ++first;
  const auto res = std::from_chars(first, last, out);
  return res.ec == std::errc() && res.ptr == last;
}

}  // namespace

Sample load_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path + "'");
  std::vector<double> values;
  std::size_t cols = 0;
  Index rows = 0;
  std::string line;
  int line_no = 0;
  bool first_content = true;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto fields = split_line(line);
    std::vector<double> parsed(fields.size());
    bool numeric = true;
    for (std::size_t i = 0; i < fields.size(); ++i) numeric = numeric && parse_double(fields[i], parsed[i]);
    if (first_content) {
      first_content = false;
      cols = fields.size();
      if (!numeric) continue;  // header
    }
    const std::string where = path + ":" + std::to_string(line_no) + ": ";
    if (fields.size() != cols) {
      throw InputError(where + "expected " + std::to_string(cols) + " fields, found " + std::to_string(fields.size()));
    }
    for (std::size_t i = 0; i < fields.size(); ++i) {
      if (!parse_double(fields[i], parsed[i])) {
        throw InputError(where + "field " + std::to_string(i + 1) + " is not a number: '" + trim(fields[i]) + "'");
      }
      if (!std::isfinite(parsed[i])) throw InputError(where + "field " + std::to_string(i + 1) + " is not finite");
    }
    values.insert(values.end(), parsed.begin(), parsed.end());
    ++rows;
  }
  if (rows == 0) throw InputError(path + ": no data rows");
  Matrix m(rows, static_cast<Index>(cols));
  std::copy(values.begin(), values.end(), m.data());
  return Sample(std::move(m));
}

std::pair<Sample, Sample> load_labeled_csv(const std::string& path) {
  const Sample all = load_csv(path);
  if (all.dimension() < 2) throw InputError(path + ": labeled CSV needs a data column and a label column");
  const Index d = all.dimension() - 1;
  std::vector<Index> xi, yi;
  for (Index i = 0; i < all.size(); ++i) {
    const double label = all.rows()(i, d);
    if (label == 0.0) {
      xi.push_back(i);
    } else if (label == 1.0) {
      yi.push_back(i);
    } else {
      throw InputError(path + ": data row " + std::to_string(i + 1) + " has label other than 0 or 1");
    }
  }
  auto take = [&](const std::vector<Index>& idx) {
    Matrix out(static_cast<Index>(idx.size()), d);
    for (std::size_t r = 0; r < idx.size(); ++r) out.row(static_cast<Index>(r)) = all.rows().row(idx[r]).head(d);
    return Sample(std::move(out));
  };
  return {take(xi), take(yi)};
}

}  // namespace nammd
