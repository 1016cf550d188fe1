#pragma once

#include "nammd/estimators.hpp"
#include "nammd/kernels.hpp"
#include "nammd/stats.hpp"

#include <cstdint>
#include <optional>
#include <span>
#include <string>

namespace nammd {

/// Result of one hypothesis test. `reject` is always statistic > threshold.
struct TestOutcome {
  double statistic = 0.0;
  double threshold = 0.0;
  std::optional<double> p_value;
  bool reject = false;
  double alpha = 0.05;
  double epsilon = 0.0;
  Index m = 0;
  std::string method;
  std::optional<std::uint64_t> seed;
};

/// Closeness test of H0: NAMMD <= epsilon with the asymptotic normal threshold
/// epsilon + sigma_hat * z_{1-alpha} / sqrt(m). epsilon must lie in (0, 1); the
/// epsilon = 0 case is a two-sample test (see tst.hpp).
TestOutcome nammd_dct(const Sample& x, const Sample& y, const KernelSpec& spec, double epsilon, double alpha);
TestOutcome nammd_dct(const GramSummary& summary, double epsilon, double alpha);

/// The same construction on the MMD^2 U-statistic with closeness level epsilon_m >= 0,
/// using the unnormalized standard deviation sqrt(((4m-8) zeta1 + 2 zeta2) / (m-1)).
TestOutcome mmd_dct(const Sample& x, const Sample& y, const KernelSpec& spec, double epsilon_m, double alpha);
TestOutcome mmd_dct(const GramSummary& summary, double epsilon_m, double alpha);

struct ReferenceEpsilon {
  double nammd = 0.0;
  double mmd2 = 0.0;
};

/// Empirical NAMMD and MMD^2 of a reference pair, used as closeness levels.
ReferenceEpsilon reference_epsilon(const Sample& x_ref, const Sample& y_ref, const KernelSpec& spec);

/// sum_i ((X_i - Y_i)^2 - X_i - Y_i) / max(|X'_i - Y'_i|, X'_i + Y'_i, 1).
double canonne_statistic(std::span<const std::int64_t> cx, std::span<const std::int64_t> cy,
                         std::span<const std::int64_t> cx_ref, std::span<const std::int64_t> cy_ref);

struct CanonneConfig {
  Index m = 100;       // size of each of the four samples
  double alpha = 0.05;
  int resamples = 200;  // B, at least 100
};

/// Total-variation closeness test against the null pair (P_n, Q_n) with
/// TV(P_n, Q_n) = epsilon'. Test samples come from `test_pair`; the threshold is the
/// empirical (1 - alpha)-quantile of B statistics resampled under `null_pair` with
/// the same sample sizes.
TestOutcome canonne_dct(const DiscretePair& null_pair, const DiscretePair& test_pair,
                        const CanonneConfig& config, Rng& rng);

}  // namespace nammd
