#pragma once

#include "nammd/types.hpp"

#include <cmath>
#include <span>
#include <string_view>

namespace nammd {

enum class KernelFamily { gaussian, laplace, mahalanobis };

std::string_view to_string(KernelFamily family);
KernelFamily kernel_family_from_string(std::string_view name);

/// A bounded translation-invariant kernel.
///
///   gaussian     exp(-|x-y|^2 / (2 bw^2))
///   laplace      exp(-|x-y|_1 / bw)
///   mahalanobis  exp(-(x-y)^T M (x-y) / (2 bw^2))
///
/// Every family attains its supremum K = 1 on the diagonal. "Bandwidth" is
/// always the bw above; the kernel exp(-|x-y|^2) is gaussian(1/sqrt(2)).
class KernelSpec {
 public:
  static KernelSpec gaussian(double bandwidth);
  static KernelSpec laplace(double bandwidth);
  /// `metric` must be symmetric positive definite.
  static KernelSpec mahalanobis(Matrix metric, double bandwidth = 1.0);

  KernelFamily family() const noexcept { return family_; }
  double bandwidth() const noexcept { return bandwidth_; }
  /// Empty unless family() == mahalanobis.
  const Matrix& metric() const noexcept { return metric_; }
  double upper_bound() const noexcept { return upper_bound_; }

  KernelSpec with_bandwidth(double bandwidth) const;

 private:
  KernelSpec(KernelFamily family, double bandwidth, Matrix metric);

  KernelFamily family_;
  double bandwidth_;
  Matrix metric_;
  // Cholesky factor L of the metric (M = L L^T); points are mapped to L^T x.
  Matrix metric_factor_;
  double upper_bound_ = 1.0;

  friend class KernelEvaluator;
};

/// Evaluates a kernel on raw row pointers after mapping points into a space
/// where every family is exp(-scale * dist), dist being squared Euclidean or L1.
/// Used by the Gram builders; callers must pass rows of transform(...).
class KernelEvaluator {
 public:
  KernelEvaluator(const KernelSpec& spec, Index dimension);

  Matrix transform(const Matrix& points) const;

  double operator()(const double* a, const double* b) const noexcept {
    double dist = 0.0;
    if (l1_) {
      for (Index k = 0; k < dim_; ++k) dist += std::abs(a[k] - b[k]);
    } else {
      for (Index k = 0; k < dim_; ++k) {
        const double t = a[k] - b[k];
        dist += t * t;
      }
    }
    return std::exp(-scale_ * dist);
  }

  Index dimension() const noexcept { return dim_; }

 private:
  Matrix factor_;  // empty unless mahalanobis
  Index dim_;
  bool l1_;
  double scale_;
};

double eval_kernel(const KernelSpec& spec, std::span<const double> x, std::span<const double> y);

/// The three kernel matrices of a sample pair of equal size m.
struct GramBlock {
  Matrix kxx;
  Matrix kyy;
  Matrix kxy;  // kxy(i, j) = k(x_i, y_j)
  double upper_bound = 1.0;

  Index size() const noexcept { return kxx.rows(); }
};

GramBlock gram_blocks(const KernelSpec& spec, const Sample& x, const Sample& y);

/// Symmetric Gram matrix of a point set (rows of `points`).
Matrix gram_matrix(const KernelSpec& spec, const Matrix& points);

/// k(a_i, b_j) for all rows of `a` and `b`.
Matrix cross_gram(const KernelSpec& spec, const Matrix& a, const Matrix& b);

/// Median of the pairwise Euclidean distances of the pooled sample.
/// Throws DegenerateInputError when every point is identical.
double median_heuristic(const Sample& x, const Sample& y);
double median_heuristic(const Matrix& pooled);

}  // namespace nammd
