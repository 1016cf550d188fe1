#include "nammd/kernels.hpp"

#include "nammd/error.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

namespace nammd {

std::string_view to_string(KernelFamily family) {
  switch (family) {
    case KernelFamily::gaussian:
      return "gaussian";
    case KernelFamily::laplace:
      return "laplace";
    case KernelFamily::mahalanobis:
      return "mahalanobis";
  }
  return "unknown";
}

KernelFamily kernel_family_from_string(std::string_view name) {
  if (name == "gaussian") return KernelFamily::gaussian;
  if (name == "laplace") return KernelFamily::laplace;
  if (name == "mahalanobis") return KernelFamily::mahalanobis;
  throw ConfigError("unknown kernel family '" + std::string(name) + "'");
}

namespace {

void check_bandwidth(double bandwidth) {
  if (!(bandwidth > 0.0) || !std::isfinite(bandwidth)) {
    throw InputError("kernel bandwidth must be positive and finite, got " + std::to_string(bandwidth));
  }
}

}  // namespace

KernelSpec::KernelSpec(KernelFamily family, double bandwidth, Matrix metric)
    : family_(family), bandwidth_(bandwidth), metric_(std::move(metric)) {
  check_bandwidth(bandwidth_);
  if (family_ != KernelFamily::mahalanobis) return;

  if (metric_.rows() == 0 || metric_.rows() != metric_.cols()) {
    throw InputError("mahalanobis metric must be a non-empty square matrix");
  }
  if (!metric_.allFinite()) throw InputError("mahalanobis metric has non-finite entries");
  const double scale = std::max(1.0, metric_.cwiseAbs().maxCoeff());
  if ((metric_ - metric_.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale) {
    throw InputError("mahalanobis metric must be symmetric");
  }
  Eigen::LLT<Eigen::MatrixXd> llt(metric_);
  if (llt.info() != Eigen::Success) throw InputError("mahalanobis metric must be positive definite");
  metric_factor_ = llt.matrixL();
}

KernelSpec KernelSpec::gaussian(double bandwidth) { return {KernelFamily::gaussian, bandwidth, Matrix{}}; }

KernelSpec KernelSpec::laplace(double bandwidth) { return {KernelFamily::laplace, bandwidth, Matrix{}}; }

KernelSpec KernelSpec::mahalanobis(Matrix metric, double bandwidth) {
  return {KernelFamily::mahalanobis, bandwidth, std::move(metric)};
}

KernelSpec KernelSpec::with_bandwidth(double bandwidth) const {
  return {family_, bandwidth, metric_};
}

KernelEvaluator::KernelEvaluator(const KernelSpec& spec, Index dimension)
    : factor_(spec.metric_factor_), dim_(dimension), l1_(spec.family() == KernelFamily::laplace) {
  const double bw = spec.bandwidth();
  scale_ = l1_ ? 1.0 / bw : 0.5 / (bw * bw);
  if (spec.family() == KernelFamily::mahalanobis && factor_.rows() != dimension) {
    throw InputError("mahalanobis metric is " + std::to_string(factor_.rows()) + "x" +
                     std::to_string(factor_.rows()) + " but points have dimension " +
                     std::to_string(dimension));
  }
}

Matrix KernelEvaluator::transform(const Matrix& points) const {
  if (points.cols() != dim_) throw InputError("point dimension does not match kernel evaluator");
  if (factor_.size() == 0) return points;
  // Row x^T L equals (L^T x)^T, so squared norms of differences give the quadratic form.
  return points * factor_;
}

double eval_kernel(const KernelSpec& spec, std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) {
    throw InputError("kernel arguments differ in dimension: " + std::to_string(x.size()) + " vs " +
                     std::to_string(y.size()));
  }
  for (std::size_t k = 0; k < x.size(); ++k) {
    if (!std::isfinite(x[k]) || !std::isfinite(y[k])) throw InputError("kernel argument is not finite");
  }
  const auto d = static_cast<Index>(x.size());
  const double bw = spec.bandwidth();
  switch (spec.family()) {
    case KernelFamily::gaussian: {
      double sq = 0.0;
      for (Index k = 0; k < d; ++k) sq += (x[k] - y[k]) * (x[k] - y[k]);
      return std::exp(-sq / (2.0 * bw * bw));
    }
    case KernelFamily::laplace: {
      double l1 = 0.0;
      for (Index k = 0; k < d; ++k) l1 += std::abs(x[k] - y[k]);
      return std::exp(-l1 / bw);
    }
    case KernelFamily::mahalanobis: {
      const Matrix& metric = spec.metric();
      if (metric.rows() != d) throw InputError("mahalanobis metric does not match point dimension");
      Vector diff(d);
      for (Index k = 0; k < d; ++k) diff[k] = x[k] - y[k];
      const double quad = diff.dot(metric * diff);
      return std::exp(-std::max(0.0, quad) / (2.0 * bw * bw));
    }
  }
  return 0.0;
}

Matrix gram_matrix(const KernelSpec& spec, const Matrix& points) {
  KernelEvaluator kernel(spec, points.cols());
  const Matrix z = kernel.transform(points);
  const Index n = z.rows();
  const double K = spec.upper_bound();
  Matrix g(n, n);
  for (Index i = 0; i < n; ++i) {
    g(i, i) = K;
    for (Index j = i + 1; j < n; ++j) {
      const double k = kernel(z.row(i).data(), z.row(j).data());
      g(i, j) = k;
      g(j, i) = k;
    }
  }
  return g;
}

Matrix cross_gram(const KernelSpec& spec, const Matrix& a, const Matrix& b) {
  if (a.cols() != b.cols()) throw InputError("cross_gram: dimension mismatch");
  KernelEvaluator kernel(spec, a.cols());
  const Matrix ta = kernel.transform(a);
  const Matrix tb = kernel.transform(b);
  Matrix g(ta.rows(), tb.rows());
  for (Index i = 0; i < ta.rows(); ++i) {
    for (Index j = 0; j < tb.rows(); ++j) g(i, j) = kernel(ta.row(i).data(), tb.row(j).data());
  }
  return g;
}

GramBlock gram_blocks(const KernelSpec& spec, const Sample& x, const Sample& y) {
  if (x.dimension() != y.dimension()) {
    throw InputError("samples differ in dimension: " + std::to_string(x.dimension()) + " vs " +
                     std::to_string(y.dimension()));
  }
  if (x.size() != y.size()) {
    throw InputError("samples must have equal size, got " + std::to_string(x.size()) + " and " +
                     std::to_string(y.size()));
  }
  GramBlock g;
  g.kxx = gram_matrix(spec, x.rows());
  g.kyy = gram_matrix(spec, y.rows());
  g.kxy = cross_gram(spec, x.rows(), y.rows());
  g.upper_bound = spec.upper_bound();
  return g;
}

double median_heuristic(const Matrix& pooled) {
  const Index n = pooled.rows();
  if (n < 2) throw DegenerateInputError("median heuristic needs at least 2 points");
  std::vector<double> dists;
  dists.reserve(static_cast<std::size_t>(n * (n - 1) / 2));
  for (Index i = 0; i < n; ++i) {
    for (Index j = i + 1; j < n; ++j) dists.push_back((pooled.row(i) - pooled.row(j)).norm());
  }
  auto median_of = [](std::vector<double>& v) {
    const std::size_t mid = v.size() / 2;
    std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid), v.end());
    const double upper = v[mid];
    if (v.size() % 2 == 1) return upper;
    const double lower = *std::max_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid));
    return 0.5 * (lower + upper);
  };
  double med = median_of(dists);
  if (med > 0.0) return med;

  // More than half the pairs coincide; fall back to the median of the nonzero distances.
  std::erase_if(dists, [](double d) { return d <= 0.0; });
  if (dists.empty()) throw DegenerateInputError("median heuristic: all points are identical");
  return median_of(dists);
}

double median_heuristic(const Sample& x, const Sample& y) {
  return median_heuristic(Sample::concat(x, y).rows());
}

}  // namespace nammd
