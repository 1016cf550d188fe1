#pragma once

#include "nammd/estimators.hpp"
#include "nammd/kernels.hpp"
#include "nammd/kernelsel.hpp"
#include "nammd/stats.hpp"
#include "nammd/types.hpp"

#include <optional>
#include <string>
#include <utility>

namespace nammd {

/// n one-dimensional support points 1, 2, ..., n.
Matrix integer_support(Index n);

/// p uniform on `support`, q obtained by moving total mass eps_prime from
/// ceil(eps_prime * n) randomly chosen points onto the others, so TV(p, q) = eps_prime.
/// Throws InputError for eps_prime outside (0, 1) and InfeasibleError when
/// eps_prime > (n - 1) / n (no nonnegative q exists with this shape).
DiscretePair uniform_with_tv(const Matrix& support, double eps_prime, Rng& rng);

/// Uniform distributions on the rows of z (p) and of zp (q), over the stacked support [z; zp].
DiscretePair uniform_pair(const Sample& z, const Sample& zp);

/// Dirac masses at z0 (p) and zi (q) over the support {z0, zi}.
DiscretePair dirac_pair(std::span<const double> z0, std::span<const double> zi);

/// Population moments of the uniform distributions on two point sets (all pairs, diagonal included).
struct PointSetMoments {
  double norm_p = 0.0;
  double norm_q = 0.0;
  double cross = 0.0;
  double mmd2 = 0.0;
  double nammd = 0.0;
};
PointSetMoments point_set_moments(const Sample& z, const Sample& zp, const KernelSpec& spec);

struct TargetConfig {
  OptimizerConfig optimizer{0.01, 5000};
  double tolerance = 1e-3;
  /// When set, also drives |mu_P|^2 + |mu_Q|^2 towards this value.
  std::optional<double> norm_sum_target;
  double norm_tolerance = 1e-3;
  double norm_weight = 1.0;
};

struct LearnedPair {
  Sample z;
  Sample zp;
  PointSetMoments moments;
  int iterations = 0;
  bool converged = false;
  bool aborted = false;  // non-finite loss; z, zp are the best iterate before it
};

/// Moves the points of z and zp by Adam descent on (NAMMD - epsilon)^2 (plus the
/// optional norm penalty) until every target is met within tolerance.
/// Gradients are analytic for gaussian kernels and central differences otherwise
/// (or always, with GradientMode::central_difference).
LearnedPair learn_target_nammd(const Sample& z, const Sample& zp, const KernelSpec& spec, double epsilon,
                               const TargetConfig& config = {});

struct BlobConfig {
  int grid_side = 3;
  double cell_spacing = 5.0;
  Matrix null_covariance = Matrix::Identity(2, 2);
  Matrix alt_covariance = (Matrix(2, 2) << 1.0, 0.6, 0.6, 1.0).finished();
};

enum class MixtureMode { null, alternative };

/// X from the blob mixture with null_covariance; Y from the same mixture (null)
/// or with alt_covariance in every cell (alternative). Cells equally likely.
std::pair<Sample, Sample> blob_pair(const BlobConfig& cfg, MixtureMode mode, Index m, Rng& rng);

struct HdgmConfig {
  Index dimension = 10;
  int components = 2;
  double component_spacing = 1.0;  // component k has mean k * spacing * (1, ..., 1)
  Index shifted_coordinates = 2;
  double mean_shift = 0.5;  // added to the first shifted_coordinates entries of Y's means
};

std::pair<Sample, Sample> hdgm_pair(const HdgmConfig& cfg, MixtureMode mode, Index m, Rng& rng);

/// Mean gap g with gaussian_moment_oracle(var, var, g, bandwidth).mmd2 == target_mmd2.
/// Throws InfeasibleError when the target is not below the supremum over g.
double constant_mmd_gaussian_sweep(double variance, double target_mmd2, double bandwidth);

/// Paired i.i.d. samples of size m from a discrete pair, summarized against `support_gram`.
GramSummary sample_discrete_summary(const DiscretePair& pair, const Matrix& support_gram, double upper_bound,
                                    Index m, Rng& rng);

/// One row per point, columns x1..xd then a label column (0 for x, 1 for y).
void write_labeled_csv(const std::string& path, const Sample& x, const Sample& y);

}  // namespace nammd
