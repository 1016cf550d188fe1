#include "nammd/dct.hpp"

#include "nammd/error.hpp"

#include <cmath>
#include <string>
#include <vector>

namespace nammd {

namespace {

void check_alpha(double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw InputError("alpha must lie in (0, 1), got " + std::to_string(alpha));
}

// Shared asymptotic test: reject when sqrt(m) (stat - eps) / sd > z_{1-alpha}.
TestOutcome asymptotic_test(double statistic, double sd, double epsilon, double alpha, Index m,
                            std::string method) {
  TestOutcome out;
  out.statistic = statistic;
  out.alpha = alpha;
  out.epsilon = epsilon;
  out.m = m;
  out.method = std::move(method);
  const double root_m = std::sqrt(static_cast<double>(m));
  out.threshold = epsilon + sd * normal_quantile(1.0 - alpha) / root_m;
  out.reject = statistic > out.threshold;
  if (sd > 0.0) {
    out.p_value = 1.0 - normal_cdf(root_m * (statistic - epsilon) / sd);
  } else {
    out.p_value = statistic > epsilon ? 0.0 : 1.0;
  }
  return out;
}

}  // namespace

TestOutcome nammd_dct(const GramSummary& summary, double epsilon, double alpha) {
  if (!(epsilon > 0.0 && epsilon < 1.0)) {
    throw InputError("nammd_dct: epsilon must lie in (0, 1); use a permutation two-sample test for epsilon = 0");
  }
  check_alpha(alpha);
  if (summary.m < 4) throw InputError("nammd_dct needs m >= 4");
  const EstimatorReport r = estimator_report(summary);
  return asymptotic_test(r.nammd_hat, r.sigma_hat, epsilon, alpha, summary.m, "nammd_dct");
}

TestOutcome nammd_dct(const Sample& x, const Sample& y, const KernelSpec& spec, double epsilon, double alpha) {
  return nammd_dct(summarize(spec, x, y), epsilon, alpha);
}

TestOutcome mmd_dct(const GramSummary& summary, double epsilon_m, double alpha) {
  if (!(epsilon_m >= 0.0) || !std::isfinite(epsilon_m)) {
    throw InputError("mmd_dct: epsilon_m must be finite and nonnegative");
  }
  check_alpha(alpha);
  if (summary.m < 4) throw InputError("mmd_dct needs m >= 4");
  const double stat = mmd2_u_statistic(summary);
  const double v = mmd_asymptotic_variance(variance_components(summary), summary.m);
  return asymptotic_test(stat, std::sqrt(std::max(0.0, v)), epsilon_m, alpha, summary.m, "mmd_dct");
}

TestOutcome mmd_dct(const Sample& x, const Sample& y, const KernelSpec& spec, double epsilon_m, double alpha) {
  return mmd_dct(summarize(spec, x, y), epsilon_m, alpha);
}

ReferenceEpsilon reference_epsilon(const Sample& x_ref, const Sample& y_ref, const KernelSpec& spec) {
  const GramSummary s = summarize(spec, x_ref, y_ref);
  return {nammd_u_statistic(s), mmd2_u_statistic(s)};
}

double canonne_statistic(std::span<const std::int64_t> cx, std::span<const std::int64_t> cy,
                         std::span<const std::int64_t> cx_ref, std::span<const std::int64_t> cy_ref) {
  const std::size_t n = cx.size();
  if (cy.size() != n || cx_ref.size() != n || cy_ref.size() != n) {
    throw InputError("canonne_statistic: count vectors differ in length");
  }
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    if (cx[i] < 0 || cy[i] < 0 || cx_ref[i] < 0 || cy_ref[i] < 0) {
      throw InputError("canonne_statistic: counts must be nonnegative");
    }
    const auto x = static_cast<double>(cx[i]);
    const auto y = static_cast<double>(cy[i]);
    const auto xr = static_cast<double>(cx_ref[i]);
    const auto yr = static_cast<double>(cy_ref[i]);
    const double f = std::max({std::abs(xr - yr), xr + yr, 1.0});
    total += ((x - y) * (x - y) - x - y) / f;
  }
  return total;
}

namespace {

double draw_canonne(const DiscretePair& pair, Index m, Rng& rng) {
  const std::span<const double> p(pair.p().data(), static_cast<std::size_t>(pair.size()));
  const std::span<const double> q(pair.q().data(), static_cast<std::size_t>(pair.size()));
  const auto cx = multinomial_counts(p, m, rng);
  const auto cy = multinomial_counts(q, m, rng);
  const auto cx_ref = multinomial_counts(p, m, rng);
  const auto cy_ref = multinomial_counts(q, m, rng);
  return canonne_statistic(cx, cy, cx_ref, cy_ref);
}

}  // namespace

TestOutcome canonne_dct(const DiscretePair& null_pair, const DiscretePair& test_pair,
                        const CanonneConfig& config, Rng& rng) {
  if (config.resamples < 100) {
    throw ConfigError("canonne_dct needs at least 100 resamples, got " + std::to_string(config.resamples));
  }
  check_alpha(config.alpha);
  if (config.m < 1) throw ConfigError("canonne_dct: sample size must be positive");
  if (null_pair.size() != test_pair.size()) throw InputError("canonne_dct: pairs differ in support size");

  TestOutcome out;
  out.method = "canonne_dct";
  out.alpha = config.alpha;
  out.m = config.m;
  out.epsilon = tv_distance(null_pair.p(), null_pair.q());
  out.statistic = draw_canonne(test_pair, config.m, rng);

  std::vector<double> null_stats(static_cast<std::size_t>(config.resamples));
  for (auto& t : null_stats) t = draw_canonne(null_pair, config.m, rng);
  out.threshold = empirical_upper_quantile(null_stats, config.alpha);
  out.p_value = permutation_p_value(null_stats, out.statistic);
  out.reject = out.statistic > out.threshold;
  return out;
}

}  // namespace nammd
