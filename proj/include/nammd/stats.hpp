#pragma once

#include "nammd/types.hpp"

#include <cstdint>
#include <random>
#include <span>
#include <vector>

namespace nammd {

using Rng = std::mt19937_64;

double normal_cdf(double x);
/// Inverse of normal_cdf on (0, 1).
double normal_quantile(double p);

/// Smallest value t among `values` with #{v <= t} / n >= 1 - alpha.
double empirical_upper_quantile(std::span<const double> values, double alpha);

/// (1 + #{v >= observed}) / (n + 1).
double permutation_p_value(std::span<const double> null_values, double observed);

/// Stateless seed derivation: the same (master, stream, index) always yields the
/// same seed regardless of scheduling.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream, std::uint64_t index = 0);

/// Counts of m categorical draws from `probs`, via conditional binomials (O(n), not O(m)).
std::vector<std::int64_t> multinomial_counts(std::span<const double> probs, std::int64_t m, Rng& rng);

/// m i.i.d. categorical draws (indices) from `probs`.
std::vector<Index> categorical_draws(std::span<const double> probs, Index m, Rng& rng);

/// sup_t |F_n(t) - t|, the Kolmogorov-Smirnov distance to Uniform(0, 1).
double ks_distance_uniform(std::vector<double> values);

/// Mean and standard error of a 0/1 or real-valued sequence.
struct MeanStderr {
  double mean = 0.0;
  double std_error = 0.0;
};
MeanStderr mean_stderr(std::span<const double> values);

}  // namespace nammd
