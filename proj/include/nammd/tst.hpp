#pragma once

#include "nammd/dct.hpp"
#include "nammd/kernels.hpp"
#include "nammd/stats.hpp"

#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

namespace nammd {

enum class StatisticKind { nammd, mmd2, fuse };

std::string_view to_string(StatisticKind kind);
StatisticKind statistic_kind_from_string(std::string_view name);

/// Monte Carlo permutation plan: `iterations` permutations of the pooled sample,
/// drawn uniformly with replacement from all (2m)! orderings.
struct PermutationPlan {
  int iterations = 200;
  std::uint64_t seed = 0;
};

/// Kernels with prior weights and the soft-max temperature lambda of the FUSE statistic.
class KernelBank {
 public:
  KernelBank(std::vector<KernelSpec> kernels, Vector weights, double lambda);
  static KernelBank uniform(std::vector<KernelSpec> kernels, double lambda = 1.0);

  const std::vector<KernelSpec>& kernels() const noexcept { return kernels_; }
  const Vector& weights() const noexcept { return weights_; }
  double lambda() const noexcept { return lambda_; }

 private:
  std::vector<KernelSpec> kernels_;
  Vector weights_;
  double lambda_;
};

/// Gaussian kernels at median-heuristic bandwidth times 2^k for k in [-half_width, half_width].
KernelBank gaussian_bank(const Sample& x, const Sample& y, int half_width, double lambda = 1.0);

/// (1/(m(m-1))) sum_{i != j} k(x_i, x_j)^2 + k(y_i, y_j)^2.
double fuse_normalizer(const KernelSpec& spec, const Sample& x, const Sample& y);

/// (1/lambda) log sum_k w_k exp(lambda * NAMMD_k / sqrt(N_k)), evaluated with log-sum-exp.
double fuse_statistic(const Sample& x, const Sample& y, const KernelBank& bank);

bool is_permutation(std::span<const Index> perm, Index n);

/// Statistic of the split (first m rows, last m rows) of pooled[perm]. `which` must
/// be nammd or mmd2; the bank overload computes fuse.
double permuted_statistic(const Sample& pooled, std::span<const Index> perm, const KernelSpec& spec,
                          StatisticKind which);
double permuted_statistic(const Sample& pooled, std::span<const Index> perm, const KernelBank& bank);

/// Permutation two-sample test. threshold is the empirical (1 - alpha)-quantile of
/// the permuted statistics, p_value = (1 + #{T_b >= T_obs}) / (B + 1), and
/// reject follows the threshold rule.
TestOutcome permutation_test(const Sample& x, const Sample& y, const KernelSpec& spec, StatisticKind which,
                             double alpha, const PermutationPlan& plan);
TestOutcome permutation_test(const Sample& x, const Sample& y, const KernelBank& bank, double alpha,
                             const PermutationPlan& plan);

/// NAMMD and MMD permutation tests sharing one Gram matrix and one set of permutations.
struct PairedPermutationOutcome {
  TestOutcome nammd;
  TestOutcome mmd2;
};
PairedPermutationOutcome paired_permutation_test(const Sample& x, const Sample& y, const KernelSpec& spec,
                                                 double alpha, const PermutationPlan& plan);

}  // namespace nammd
