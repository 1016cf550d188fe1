#include "nammd/tst.hpp"

#include "nammd/error.hpp"
#include "nammd/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

namespace nammd {

std::string_view to_string(StatisticKind kind) {
  switch (kind) {
    case StatisticKind::nammd:
      return "nammd";
    case StatisticKind::mmd2:
      return "mmd";
    case StatisticKind::fuse:
      return "fuse";
  }
  return "unknown";
}

StatisticKind statistic_kind_from_string(std::string_view name) {
  if (name == "nammd") return StatisticKind::nammd;
  if (name == "mmd" || name == "mmd2") return StatisticKind::mmd2;
  if (name == "fuse") return StatisticKind::fuse;
  throw ConfigError("unknown statistic '" + std::string(name) + "'");
}

KernelBank::KernelBank(std::vector<KernelSpec> kernels, Vector weights, double lambda)
    : kernels_(std::move(kernels)), weights_(std::move(weights)), lambda_(lambda) {
  if (kernels_.empty()) throw ConfigError("kernel bank is empty");
  if (weights_.size() != static_cast<Index>(kernels_.size())) {
    throw ConfigError("kernel bank: one prior weight per kernel required");
  }
  try {
    check_probability_vector(weights_, "kernel bank weights");
  } catch (const InputError& e) {
    throw ConfigError(e.what());
  }
  if (!(lambda_ > 0.0) || !std::isfinite(lambda_)) throw ConfigError("kernel bank: lambda must be positive");
}

KernelBank KernelBank::uniform(std::vector<KernelSpec> kernels, double lambda) {
  const auto n = static_cast<Index>(kernels.size());
  if (n == 0) throw ConfigError("kernel bank is empty");
  return {std::move(kernels), Vector::Constant(n, 1.0 / static_cast<double>(n)), lambda};
}

KernelBank gaussian_bank(const Sample& x, const Sample& y, int half_width, double lambda) {
  if (half_width < 0) throw ConfigError("gaussian_bank: half_width must be nonnegative");
  const double base = median_heuristic(x, y);
  std::vector<KernelSpec> kernels;
  for (int k = -half_width; k <= half_width; ++k) kernels.push_back(KernelSpec::gaussian(base * std::ldexp(1.0, k)));
  return KernelBank::uniform(std::move(kernels), lambda);
}

namespace {

void check_pair(const Sample& x, const Sample& y) {
  if (x.dimension() != y.dimension()) throw InputError("samples differ in dimension");
  if (x.size() != y.size()) {
    throw InputError("samples must have equal size, got " + std::to_string(x.size()) + " and " +
                     std::to_string(y.size()));
  }
}

// Within-split sums gathered from the pooled Gram matrix through a permutation.
struct SplitSums {
  double sum_xx = 0.0;
  double sum_yy = 0.0;
  double sum_xy = 0.0;
  double trace_xy = 0.0;
  double sq_xx = 0.0;  // only filled when requested
  double sq_yy = 0.0;
};

SplitSums split_sums(const Matrix& g, std::span<const Index> perm, Index m, bool squares) {
  SplitSums s;
  for (Index i = 0; i < m; ++i) {
    const Index xi = perm[static_cast<std::size_t>(i)];
    const Index yi = perm[static_cast<std::size_t>(m + i)];
    const double* gx = g.row(xi).data();
    const double* gy = g.row(yi).data();
    double xx = 0.0, yy = 0.0, sxx = 0.0, syy = 0.0;
    for (Index j = i + 1; j < m; ++j) {
      const double a = gx[perm[static_cast<std::size_t>(j)]];
      const double b = gy[perm[static_cast<std::size_t>(m + j)]];
      xx += a;
      yy += b;
      if (squares) {
        sxx += a * a;
        syy += b * b;
      }
    }
    double xy = 0.0;
    for (Index j = 0; j < m; ++j) xy += gx[perm[static_cast<std::size_t>(m + j)]];
    s.sum_xx += 2.0 * xx;
    s.sum_yy += 2.0 * yy;
    s.sq_xx += 2.0 * sxx;
    s.sq_yy += 2.0 * syy;
    s.sum_xy += xy;
    s.trace_xy += gx[yi];
  }
  return s;
}

GramSummary as_summary(const SplitSums& s, Index m, double upper_bound) {
  GramSummary out;
  out.m = m;
  out.upper_bound = upper_bound;
  out.sum_xx = s.sum_xx;
  out.sum_yy = s.sum_yy;
  out.sum_xy = s.sum_xy;
  out.trace_xy = s.trace_xy;
  return out;
}

double kind_statistic(const SplitSums& s, Index m, double upper_bound, StatisticKind which) {
  const GramSummary summary = as_summary(s, m, upper_bound);
  const double mmd2 = detail::mmd2_from_summary(summary);
  if (which == StatisticKind::mmd2) return mmd2;
  if (which == StatisticKind::nammd) return mmd2 / detail::norm_from_summary(summary);
  throw ConfigError("fuse statistic requires a kernel bank");
}

// Each kernel contributes NAMMD_k / sqrt(N_k); the bank combines them by log-mean-exp.
struct FuseGrams {
  std::vector<Matrix> grams;
  std::vector<double> bounds;
};

double fuse_from_grams(const FuseGrams& fg, const KernelBank& bank, std::span<const Index> perm, Index m) {
  const double lambda = bank.lambda();
  const double pairs = static_cast<double>(m) * static_cast<double>(m - 1);
  std::vector<double> logs;
  logs.reserve(fg.grams.size());
  for (std::size_t k = 0; k < fg.grams.size(); ++k) {
    const double w = bank.weights()[static_cast<Index>(k)];
    if (w <= 0.0) continue;
    const SplitSums s = split_sums(fg.grams[k], perm, m, true);
    const GramSummary summary = as_summary(s, m, fg.bounds[k]);
    const double nammd = detail::mmd2_from_summary(summary) / detail::norm_from_summary(summary);
    // Floor keeps the ratio finite when every within-sample kernel value underflows.
    const double normalizer = std::max((s.sq_xx + s.sq_yy) / pairs, 1e-300);
    logs.push_back(lambda * nammd / std::sqrt(normalizer) + std::log(w));
  }
  const double top = *std::max_element(logs.begin(), logs.end());
  double acc = 0.0;
  for (double v : logs) acc += std::exp(v - top);
  return (top + std::log(acc)) / lambda;
}

FuseGrams fuse_grams(const Matrix& pooled, const KernelBank& bank) {
  FuseGrams fg;
  for (const auto& spec : bank.kernels()) {
    fg.grams.push_back(gram_matrix(spec, pooled));
    fg.bounds.push_back(spec.upper_bound());
  }
  return fg;
}

std::vector<Index> identity_permutation(Index n) {
  std::vector<Index> perm(static_cast<std::size_t>(n));
  std::iota(perm.begin(), perm.end(), Index{0});
  return perm;
}

void check_plan(const PermutationPlan& plan, double alpha) {
  if (plan.iterations < 1) throw ConfigError("permutation test needs at least 1 iteration");
  if (!(alpha > 0.0 && alpha < 1.0)) throw InputError("alpha must lie in (0, 1)");
}

TestOutcome finish(double observed, const std::vector<double>& permuted, double alpha, Index m,
                   const PermutationPlan& plan, std::string method) {
  TestOutcome out;
  out.statistic = observed;
  out.threshold = empirical_upper_quantile(permuted, alpha);
  out.p_value = permutation_p_value(permuted, observed);
  out.reject = observed > out.threshold;
  out.alpha = alpha;
  out.epsilon = 0.0;
  out.m = m;
  out.method = std::move(method);
  out.seed = plan.seed;
  return out;
}

}  // namespace

double fuse_normalizer(const KernelSpec& spec, const Sample& x, const Sample& y) {
  check_pair(x, y);
  const GramSummary s = summarize(spec, x, y);
  const double m = static_cast<double>(s.m);
  return (s.frob_xx + s.frob_yy) / (m * (m - 1.0));
}

double fuse_statistic(const Sample& x, const Sample& y, const KernelBank& bank) {
  check_pair(x, y);
  const Sample pooled = Sample::concat(x, y);
  const auto perm = identity_permutation(pooled.size());
  return fuse_from_grams(fuse_grams(pooled.rows(), bank), bank, perm, x.size());
}

bool is_permutation(std::span<const Index> perm, Index n) {
  if (static_cast<Index>(perm.size()) != n) return false;
  std::vector<char> seen(static_cast<std::size_t>(n), 0);
  for (Index v : perm) {
    if (v < 0 || v >= n || seen[static_cast<std::size_t>(v)]) return false;
    seen[static_cast<std::size_t>(v)] = 1;
  }
  return true;
}

double permuted_statistic(const Sample& pooled, std::span<const Index> perm, const KernelSpec& spec,
                          StatisticKind which) {
  if (pooled.size() % 2 != 0) throw InputError("pooled sample must have even size 2m");
  if (!is_permutation(perm, pooled.size())) throw InputError("perm is not a permutation of the pooled indices");
  const Index m = pooled.size() / 2;
  const Matrix g = gram_matrix(spec, pooled.rows());
  return kind_statistic(split_sums(g, perm, m, false), m, spec.upper_bound(), which);
}

double permuted_statistic(const Sample& pooled, std::span<const Index> perm, const KernelBank& bank) {
  if (pooled.size() % 2 != 0) throw InputError("pooled sample must have even size 2m");
  if (!is_permutation(perm, pooled.size())) throw InputError("perm is not a permutation of the pooled indices");
  return fuse_from_grams(fuse_grams(pooled.rows(), bank), bank, perm, pooled.size() / 2);
}

PairedPermutationOutcome paired_permutation_test(const Sample& x, const Sample& y, const KernelSpec& spec,
                                                 double alpha, const PermutationPlan& plan) {
  check_pair(x, y);
  check_plan(plan, alpha);
  const Index m = x.size();
  const double K = spec.upper_bound();
  const Matrix g = gram_matrix(spec, Sample::concat(x, y).rows());

  auto perm = identity_permutation(2 * m);
  const SplitSums observed = split_sums(g, perm, m, false);
  std::vector<double> t_nammd(static_cast<std::size_t>(plan.iterations));
  std::vector<double> t_mmd(static_cast<std::size_t>(plan.iterations));
  Rng rng(plan.seed);
  for (int b = 0; b < plan.iterations; ++b) {
    std::shuffle(perm.begin(), perm.end(), rng);
    const SplitSums s = split_sums(g, perm, m, false);
    t_nammd[static_cast<std::size_t>(b)] = kind_statistic(s, m, K, StatisticKind::nammd);
    t_mmd[static_cast<std::size_t>(b)] = kind_statistic(s, m, K, StatisticKind::mmd2);
  }
  return {finish(kind_statistic(observed, m, K, StatisticKind::nammd), t_nammd, alpha, m, plan, "nammd_tst"),
          finish(kind_statistic(observed, m, K, StatisticKind::mmd2), t_mmd, alpha, m, plan, "mmd_tst")};
}

TestOutcome permutation_test(const Sample& x, const Sample& y, const KernelSpec& spec, StatisticKind which,
                             double alpha, const PermutationPlan& plan) {
  if (which == StatisticKind::fuse) throw ConfigError("fuse statistic requires a kernel bank");
  auto both = paired_permutation_test(x, y, spec, alpha, plan);
  return which == StatisticKind::nammd ? std::move(both.nammd) : std::move(both.mmd2);
}

TestOutcome permutation_test(const Sample& x, const Sample& y, const KernelBank& bank, double alpha,
                             const PermutationPlan& plan) {
  check_pair(x, y);
  check_plan(plan, alpha);
  const Index m = x.size();
  const FuseGrams fg = fuse_grams(Sample::concat(x, y).rows(), bank);
  auto perm = identity_permutation(2 * m);
  const double observed = fuse_from_grams(fg, bank, perm, m);
  std::vector<double> permuted(static_cast<std::size_t>(plan.iterations));
  Rng rng(plan.seed);
  for (auto& t : permuted) {
    std::shuffle(perm.begin(), perm.end(), rng);
    t = fuse_from_grams(fg, bank, perm, m);
  }
  return finish(observed, permuted, alpha, m, plan, "nammd_fuse_tst");
}

}  // namespace nammd
