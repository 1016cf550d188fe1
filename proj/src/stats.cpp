#include "nammd/stats.hpp"

#include "nammd/error.hpp"

#include <boost/math/distributions/normal.hpp>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace nammd {

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

double normal_quantile(double p) {
  if (!(p > 0.0 && p < 1.0)) throw InputError("normal_quantile: p must lie in (0, 1)");
  return boost::math::quantile(boost::math::normal_distribution<double>(0.0, 1.0), p);
}

double empirical_upper_quantile(std::span<const double> values, double alpha) {
  if (values.empty()) throw InputError("empirical_upper_quantile: no values");
  if (!(alpha > 0.0 && alpha < 1.0)) throw InputError("empirical_upper_quantile: alpha must lie in (0, 1)");
  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());
  const double n = static_cast<double>(sorted.size());
  // Smallest k with k / n >= 1 - alpha; the slack absorbs (1 - 0.05) * 200 = 190.00000000000003.
  auto k = static_cast<std::size_t>(std::ceil((1.0 - alpha) * n - 1e-9));
  k = std::clamp<std::size_t>(k, 1, sorted.size());
  return sorted[k - 1];
}

double permutation_p_value(std::span<const double> null_values, double observed) {
  const auto exceed = std::count_if(null_values.begin(), null_values.end(),
                                    [observed](double v) { return v >= observed; });
  return (1.0 + static_cast<double>(exceed)) / (1.0 + static_cast<double>(null_values.size()));
}

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

}  // namespace

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream, std::uint64_t index) {
  return splitmix64(splitmix64(splitmix64(master) ^ stream) ^ index);
}

std::vector<std::int64_t> multinomial_counts(std::span<const double> probs, std::int64_t m, Rng& rng) {
  if (m < 0) throw InputError("multinomial_counts: negative draw count");
  std::vector<std::int64_t> counts(probs.size(), 0);
  std::int64_t remaining = m;
  double mass_left = 1.0;
  for (std::size_t i = 0; i + 1 < probs.size() && remaining > 0; ++i) {
    const double p = probs[i];
    if (p <= 0.0) continue;
    const double cond = std::clamp(p / mass_left, 0.0, 1.0);
    std::binomial_distribution<std::int64_t> draw(remaining, cond);
    counts[i] = draw(rng);
    remaining -= counts[i];
    mass_left -= p;
    if (mass_left <= 0.0) break;
  }
  if (!probs.empty()) counts.back() += remaining;
  return counts;
}

std::vector<Index> categorical_draws(std::span<const double> probs, Index m, Rng& rng) {
  std::discrete_distribution<Index> draw(probs.begin(), probs.end());
  std::vector<Index> out(static_cast<std::size_t>(m));
  for (auto& v : out) v = draw(rng);
  return out;
}

double ks_distance_uniform(std::vector<double> values) {
  if (values.empty()) throw InputError("ks_distance_uniform: no values");
  std::sort(values.begin(), values.end());
  const double n = static_cast<double>(values.size());
  double d = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    const double t = std::clamp(values[i], 0.0, 1.0);
    d = std::max({d, (static_cast<double>(i) + 1.0) / n - t, t - static_cast<double>(i) / n});
  }
  return d;
}

MeanStderr mean_stderr(std::span<const double> values) {
  MeanStderr r;
  if (values.empty()) return r;
  const double n = static_cast<double>(values.size());
  r.mean = std::accumulate(values.begin(), values.end(), 0.0) / n;
  if (values.size() < 2) return r;
  double ss = 0.0;
  for (double v : values) ss += (v - r.mean) * (v - r.mean);
  r.std_error = std::sqrt(ss / (n - 1.0) / n);
  return r;
}

}  // namespace nammd
