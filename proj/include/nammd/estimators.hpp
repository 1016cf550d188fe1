#pragma once

#include "nammd/kernels.hpp"
#include "nammd/types.hpp"

#include <span>

namespace nammd {

/// Sufficient statistics of a GramBlock for every estimator in this header.
///
/// With K~ denoting a within-sample matrix with its diagonal zeroed and 1 the
/// all-ones vector, the fields are the scalar contractions below. All of them
/// are obtainable in one pass over the kernel values with O(m) memory, which
/// is what lets the estimators run at m = 10^4 without materializing m x m
/// matrices.
template <class T>
struct BasicGramSummary {
  Index m = 0;
  double upper_bound = 1.0;
  T sum_xx{};      // 1' K~xx 1
  T sum_yy{};      // 1' K~yy 1
  T sum_xy{};      // 1' Kxy 1
  T trace_xy{};    // sum_i k(x_i, y_i)
  T row_sq_xx{};   // |K~xx 1|^2
  T row_sq_yy{};   // |K~yy 1|^2
  T frob_xx{};     // |K~xx|_F^2
  T frob_yy{};     // |K~yy|_F^2
  T frob_xy{};     // |Kxy|_F^2
  T row_sq_xy{};   // |Kxy 1|^2
  T col_sq_xy{};   // |Kxy' 1|^2
  T coupling_x{};  // 1' K~xx Kxy 1
  T coupling_y{};  // 1' K~yy Kxy' 1
};

using GramSummary = BasicGramSummary<double>;

GramSummary summarize(const GramBlock& g);

/// Streams kernel evaluations; never stores an m x m matrix.
GramSummary summarize(const KernelSpec& spec, const Sample& x, const Sample& y);

/// Samples given as indices into a finite support with Gram matrix `support_gram`;
/// x_idx[i] and y_idx[i] are the support points of x_i and y_i.
GramSummary summarize_indexed(const Matrix& support_gram, double upper_bound,
                              std::span<const Index> x_idx, std::span<const Index> y_idx);

/// Same as summarize_indexed but from occupation counts: x_counts[a] points of X sit on
/// support point a, and `trace_xy` is the paired sum sum_i k(x_i, y_i).
GramSummary summarize_counts(const Matrix& support_gram, double upper_bound,
                             std::span<const double> x_counts, std::span<const double> y_counts,
                             double trace_xy);

struct VarianceComponents {
  double zeta1 = 0.0;
  double zeta2 = 0.0;
};

struct EstimatorReport {
  double mmd2_hat = 0.0;
  double norm_hat = 0.0;
  double nammd_hat = 0.0;
  double zeta1 = 0.0;
  double zeta2 = 0.0;
  double sigma_hat = 0.0;
  Index m = 0;
};

/// Unbiased U-statistic (1/(m(m-1))) sum_{i != j} H_ij.
double mmd2_u_statistic(const GramBlock& g);
double mmd2_u_statistic(const GramSummary& s);

/// Unbiased U-statistic of 4K - |mu_P|^2 - |mu_Q|^2; always in [2K, 4K].
double norm_u_statistic(const GramBlock& g);
double norm_u_statistic(const GramSummary& s);

/// Ratio of the two sums above; in [-1, 1].
double nammd_u_statistic(const GramBlock& g);
double nammd_u_statistic(const GramSummary& s);

/// Unbiased estimators of the MMD variance components. Requires m >= 4.
VarianceComponents variance_components(const GramBlock& g);
VarianceComponents variance_components(const GramSummary& s);

/// ((4m-8) zeta1 + 2 zeta2) / (m-1): the asymptotic variance of sqrt(m) * mmd2_hat.
/// Not floored; may be slightly negative from finite-sample noise.
double mmd_asymptotic_variance(const VarianceComponents& z, Index m);

/// sqrt(max(0, mmd_asymptotic_variance)) / norm_hat, clamped to [0, 2].
double sigma_estimator(double zeta1, double zeta2, double norm_hat, Index m);

EstimatorReport estimator_report(const GramSummary& s);
EstimatorReport estimator_report(const GramBlock& g);

/// Two probability vectors over a shared finite support.
class DiscretePair {
 public:
  DiscretePair(Matrix support, Vector p, Vector q);

  const Matrix& support() const noexcept { return support_; }
  const Vector& p() const noexcept { return p_; }
  const Vector& q() const noexcept { return q_; }
  Index size() const noexcept { return p_.size(); }

 private:
  Matrix support_;
  Vector p_;
  Vector q_;
};

/// Throws InputError unless `p` is entrywise nonnegative and sums to 1 within 1e-12.
void check_probability_vector(const Vector& p, const char* name);

/// Population kernel moments of two discrete distributions.
struct DiscreteMoments {
  double norm_p = 0.0;  // |mu_P|^2
  double norm_q = 0.0;  // |mu_Q|^2
  double cross = 0.0;   // <mu_P, mu_Q>
};

/// `gram_zz` may hold any symmetric matrix (including unbounded kernels).
DiscreteMoments exact_discrete_moments(const Vector& p, const Vector& q, const Matrix& gram_zz);
double exact_discrete_mmd2(const DiscretePair& pair, const Matrix& gram_zz);
double exact_discrete_nammd(const DiscretePair& pair, const Matrix& gram_zz, double upper_bound);

double tv_distance(const Vector& p, const Vector& q);

/// Closed-form kernel moments of two 1-D Gaussians under exp(-z^2 / (2 bw^2)).
struct GaussianMoments {
  double norm_p = 0.0;
  double norm_q = 0.0;
  double cross = 0.0;
  double mmd2 = 0.0;
};

/// P = N(0, var_p), Q = N(mean_gap, var_q).
GaussianMoments gaussian_moment_oracle(double var_p, double var_q, double mean_gap, double bandwidth);

namespace detail {

template <class T>
T mmd2_from_summary(const BasicGramSummary<T>& s) {
  const double pairs = static_cast<double>(s.m) * static_cast<double>(s.m - 1);
  return (s.sum_xx + s.sum_yy - 2.0 * (s.sum_xy - s.trace_xy)) / pairs;
}

template <class T>
T norm_from_summary(const BasicGramSummary<T>& s) {
  const double pairs = static_cast<double>(s.m) * static_cast<double>(s.m - 1);
  return (4.0 * s.upper_bound * pairs - s.sum_xx - s.sum_yy) / pairs;
}

/// zeta1 and zeta2 from the inner-product decomposition, each RKHS term replaced by
/// its unbiased estimator written as contractions of the summary.
template <class T>
void zetas_from_summary(const BasicGramSummary<T>& s, T& zeta1, T& zeta2) {
  const double m = static_cast<double>(s.m);
  const double m2 = m * (m - 1.0);
  const double m3 = m2 * (m - 2.0);
  const double m4 = m3 * (m - 3.0);
  const double mm1 = m * m * (m - 1.0);

  // <mu_X, C_X mu_X> and <mu_X, mu_X>^2
  const T cx_xx = (s.row_sq_xx - s.frob_xx) / m3;
  const T sq_xx = (s.sum_xx * s.sum_xx - 4.0 * s.row_sq_xx + 2.0 * s.frob_xx) / m4;
  const T cy_yy = (s.row_sq_yy - s.frob_yy) / m3;
  const T sq_yy = (s.sum_yy * s.sum_yy - 4.0 * s.row_sq_yy + 2.0 * s.frob_yy) / m4;
  // <mu_Y, C_X mu_Y> and <mu_X, C_Y mu_X>
  const T cx_yy = (s.row_sq_xy - s.frob_xy) / mm1;
  const T cy_xx = (s.col_sq_xy - s.frob_xy) / mm1;
  // <mu_X, mu_Y>^2
  const T sq_xy = (s.sum_xy * s.sum_xy - s.col_sq_xy - s.row_sq_xy + s.frob_xy) / (mm1 * (m - 1.0));
  // <mu_X, C_X mu_Y>, <mu_X, mu_X><mu_X, mu_Y> and the Y-side counterparts
  const T cx_xy = s.coupling_x / mm1;
  const T xx_xy = (s.sum_xx * s.sum_xy - 2.0 * s.coupling_x) / (m * m3);
  const T cy_yx = s.coupling_y / mm1;
  const T yy_xy = (s.sum_yy * s.sum_xy - 2.0 * s.coupling_y) / (m * m3);
  // E k(x, x')^2, E k(y, y')^2, E k(x, y)^2
  const T e2_xx = s.frob_xx / m2;
  const T e2_yy = s.frob_yy / m2;
  const T e2_xy = s.frob_xy / (m * m);

  zeta1 = cx_xx - sq_xx + cy_yy - sq_yy + cx_yy + cy_xx - 2.0 * sq_xy - 2.0 * cx_xy + 2.0 * xx_xy -
          2.0 * cy_yx + 2.0 * yy_xy;
  zeta2 = e2_xx - sq_xx + e2_yy - sq_yy + 2.0 * e2_xy - 2.0 * sq_xy - 4.0 * cx_xy + 4.0 * xx_xy -
          4.0 * cy_yx + 4.0 * yy_xy;
}

}  // namespace detail

}  // namespace nammd
