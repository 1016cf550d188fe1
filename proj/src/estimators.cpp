#include "nammd/estimators.hpp"

#include "nammd/error.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

namespace nammd {

namespace {

void require_size(Index m, Index minimum, const char* what) {
  if (m < minimum) {
    throw InputError(std::string(what) + " needs m >= " + std::to_string(minimum) + ", got m = " +
                     std::to_string(m));
  }
}

}  // namespace

GramSummary summarize(const GramBlock& g) {
  const Index m = g.kxx.rows();
  if (g.kxx.cols() != m || g.kyy.rows() != m || g.kyy.cols() != m || g.kxy.rows() != m ||
      g.kxy.cols() != m) {
    throw InputError("gram block matrices must all be m x m");
  }
  require_size(m, 2, "gram summary");

  GramSummary s;
  s.m = m;
  s.upper_bound = g.upper_bound;

  Vector row_xx = Vector::Zero(m), col_xx = Vector::Zero(m);
  Vector row_yy = Vector::Zero(m), col_yy = Vector::Zero(m);
  for (Index i = 0; i < m; ++i) {
    for (Index j = 0; j < m; ++j) {
      if (i == j) continue;
      const double a = g.kxx(i, j);
      const double b = g.kyy(i, j);
      row_xx[i] += a;
      col_xx[j] += a;
      row_yy[i] += b;
      col_yy[j] += b;
      s.frob_xx += a * a;
      s.frob_yy += b * b;
    }
  }
  Vector row_xy = Vector::Zero(m), col_xy = Vector::Zero(m);
  for (Index i = 0; i < m; ++i) {
    for (Index j = 0; j < m; ++j) {
      const double c = g.kxy(i, j);
      row_xy[i] += c;
      col_xy[j] += c;
      s.frob_xy += c * c;
    }
    s.trace_xy += g.kxy(i, i);
  }
  s.sum_xx = row_xx.sum();
  s.sum_yy = row_yy.sum();
  s.sum_xy = row_xy.sum();
  s.row_sq_xx = row_xx.squaredNorm();
  s.row_sq_yy = row_yy.squaredNorm();
  s.row_sq_xy = row_xy.squaredNorm();
  s.col_sq_xy = col_xy.squaredNorm();
  s.coupling_x = col_xx.dot(row_xy);
  s.coupling_y = col_yy.dot(col_xy);
  return s;
}

GramSummary summarize(const KernelSpec& spec, const Sample& x, const Sample& y) {
  if (x.dimension() != y.dimension()) throw InputError("samples differ in dimension");
  if (x.size() != y.size()) {
    throw InputError("samples must have equal size, got " + std::to_string(x.size()) + " and " +
                     std::to_string(y.size()));
  }
  const Index m = x.size();
  KernelEvaluator kernel(spec, x.dimension());
  const Matrix tx = kernel.transform(x.rows());
  const Matrix ty = kernel.transform(y.rows());

  GramSummary s;
  s.m = m;
  s.upper_bound = spec.upper_bound();

  Vector row_xx = Vector::Zero(m), row_yy = Vector::Zero(m);
  double frob_xx = 0.0, frob_yy = 0.0;
  for (Index i = 0; i < m; ++i) {
    const double* xi = tx.row(i).data();
    const double* yi = ty.row(i).data();
    for (Index j = i + 1; j < m; ++j) {
      const double a = kernel(xi, tx.row(j).data());
      const double b = kernel(yi, ty.row(j).data());
      row_xx[i] += a;
      row_xx[j] += a;
      row_yy[i] += b;
      row_yy[j] += b;
      frob_xx += a * a;
      frob_yy += b * b;
    }
  }
  Vector row_xy = Vector::Zero(m), col_xy = Vector::Zero(m);
  double frob_xy = 0.0, trace = 0.0;
  for (Index i = 0; i < m; ++i) {
    const double* xi = tx.row(i).data();
    double acc = 0.0;
    for (Index j = 0; j < m; ++j) {
      const double c = kernel(xi, ty.row(j).data());
      acc += c;
      col_xy[j] += c;
      frob_xy += c * c;
      if (i == j) trace = trace + c;
    }
    row_xy[i] = acc;
  }
  s.frob_xx = 2.0 * frob_xx;
  s.frob_yy = 2.0 * frob_yy;
  s.frob_xy = frob_xy;
  s.trace_xy = trace;
  s.sum_xx = row_xx.sum();
  s.sum_yy = row_yy.sum();
  s.sum_xy = row_xy.sum();
  s.row_sq_xx = row_xx.squaredNorm();
  s.row_sq_yy = row_yy.squaredNorm();
  s.row_sq_xy = row_xy.squaredNorm();
  s.col_sq_xy = col_xy.squaredNorm();
  s.coupling_x = row_xx.dot(row_xy);
  s.coupling_y = row_yy.dot(col_xy);
  return s;
}

GramSummary summarize_counts(const Matrix& gram, double upper_bound, std::span<const double> x_counts,
                             std::span<const double> y_counts, double trace_xy) {
  const Index n = gram.rows();
  if (gram.cols() != n || static_cast<Index>(x_counts.size()) != n ||
      static_cast<Index>(y_counts.size()) != n) {
    throw InputError("support gram and count vectors disagree in size");
  }
  const Eigen::Map<const Vector> cx(x_counts.data(), n);
  const Eigen::Map<const Vector> cy(y_counts.data(), n);
  const double mx = cx.sum();
  const double my = cy.sum();
  if (mx != my) throw InputError("count vectors must describe samples of equal size");

  const Vector diag = gram.diagonal();
  const Vector gx = gram * cx;
  const Vector gy = gram * cy;
  const Matrix gram_sq = gram.cwiseProduct(gram);
  const Vector gsq_x = gram_sq * cx;

  GramSummary s;
  s.m = static_cast<Index>(std::llround(mx));
  require_size(s.m, 2, "gram summary");
  s.upper_bound = upper_bound;
  s.trace_xy = trace_xy;
  s.sum_xx = cx.dot(gx) - cx.dot(diag);
  s.sum_yy = cy.dot(gy) - cy.dot(diag);
  s.sum_xy = cx.dot(gy);
  s.frob_xx = cx.dot(gsq_x) - cx.dot(diag.cwiseProduct(diag));
  s.frob_yy = cy.dot(gram_sq * cy) - cy.dot(diag.cwiseProduct(diag));
  s.frob_xy = cy.dot(gsq_x);
  const Vector rx = gx - diag;  // row sum of K~xx for a point of X sitting at support a
  const Vector ry = gy - diag;
  s.row_sq_xx = cx.dot(rx.cwiseProduct(rx));
  s.row_sq_yy = cy.dot(ry.cwiseProduct(ry));
  s.row_sq_xy = cx.dot(gy.cwiseProduct(gy));
  s.col_sq_xy = cy.dot(gx.cwiseProduct(gx));
  s.coupling_x = cx.dot(rx.cwiseProduct(gy));
  s.coupling_y = cy.dot(ry.cwiseProduct(gx));
  return s;
}

GramSummary summarize_indexed(const Matrix& support_gram, double upper_bound,
                              std::span<const Index> x_idx, std::span<const Index> y_idx) {
  if (x_idx.size() != y_idx.size()) throw InputError("index samples must have equal size");
  const Index n = support_gram.rows();
  std::vector<double> cx(static_cast<std::size_t>(n), 0.0), cy(static_cast<std::size_t>(n), 0.0);
  double trace = 0.0;
  for (std::size_t i = 0; i < x_idx.size(); ++i) {
    const Index a = x_idx[i];
    const Index b = y_idx[i];
    if (a < 0 || a >= n || b < 0 || b >= n) throw InputError("support index out of range");
    cx[static_cast<std::size_t>(a)] += 1.0;
    cy[static_cast<std::size_t>(b)] += 1.0;
    trace += support_gram(a, b);
  }
  return summarize_counts(support_gram, upper_bound, cx, cy, trace);
}

double mmd2_u_statistic(const GramSummary& s) {
  require_size(s.m, 2, "mmd2_u_statistic");
  return detail::mmd2_from_summary(s);
}

double norm_u_statistic(const GramSummary& s) {
  require_size(s.m, 2, "norm_u_statistic");
  return detail::norm_from_summary(s);
}

double nammd_u_statistic(const GramSummary& s) { return mmd2_u_statistic(s) / norm_u_statistic(s); }

VarianceComponents variance_components(const GramSummary& s) {
  require_size(s.m, 4, "variance_components");
  VarianceComponents z;
  detail::zetas_from_summary(s, z.zeta1, z.zeta2);
  return z;
}

double mmd2_u_statistic(const GramBlock& g) { return mmd2_u_statistic(summarize(g)); }
double norm_u_statistic(const GramBlock& g) { return norm_u_statistic(summarize(g)); }
double nammd_u_statistic(const GramBlock& g) { return nammd_u_statistic(summarize(g)); }
VarianceComponents variance_components(const GramBlock& g) { return variance_components(summarize(g)); }

double mmd_asymptotic_variance(const VarianceComponents& z, Index m) {
  require_size(m, 4, "mmd_asymptotic_variance");
  const double md = static_cast<double>(m);
  return ((4.0 * md - 8.0) * z.zeta1 + 2.0 * z.zeta2) / (md - 1.0);
}

double sigma_estimator(double zeta1, double zeta2, double norm_hat, Index m) {
  if (!(norm_hat > 0.0)) throw InputError("sigma_estimator: norm_hat must be positive");
  const double v = mmd_asymptotic_variance({zeta1, zeta2}, m);
  const double sigma = std::sqrt(std::max(0.0, v)) / norm_hat;
  return std::clamp(sigma, 0.0, 2.0);
}

EstimatorReport estimator_report(const GramSummary& s) {
  EstimatorReport r;
  r.m = s.m;
  r.mmd2_hat = mmd2_u_statistic(s);
  r.norm_hat = norm_u_statistic(s);
  r.nammd_hat = r.mmd2_hat / r.norm_hat;
  if (s.m >= 4) {
    const VarianceComponents z = variance_components(s);
    r.zeta1 = z.zeta1;
    r.zeta2 = z.zeta2;
    r.sigma_hat = sigma_estimator(z.zeta1, z.zeta2, r.norm_hat, s.m);
  }
  return r;
}

EstimatorReport estimator_report(const GramBlock& g) { return estimator_report(summarize(g)); }

void check_probability_vector(const Vector& p, const char* name) {
  if (p.size() == 0) throw InputError(std::string(name) + " is empty");
  for (Index i = 0; i < p.size(); ++i) {
    if (!std::isfinite(p[i]) || p[i] < 0.0) {
      throw InputError(std::string(name) + " has a negative or non-finite entry at " + std::to_string(i));
    }
  }
  if (std::abs(p.sum() - 1.0) > 1e-12) {
    throw InputError(std::string(name) + " does not sum to 1 (sum = " + std::to_string(p.sum()) + ")");
  }
}

DiscretePair::DiscretePair(Matrix support, Vector p, Vector q)
    : support_(std::move(support)), p_(std::move(p)), q_(std::move(q)) {
  if (p_.size() != q_.size()) throw InputError("p and q differ in length");
  if (support_.rows() != p_.size()) {
    throw InputError("support has " + std::to_string(support_.rows()) + " points but p has " +
                     std::to_string(p_.size()) + " entries");
  }
  if (!support_.allFinite()) throw InputError("support contains non-finite entries");
  check_probability_vector(p_, "p");
  check_probability_vector(q_, "q");
}

DiscreteMoments exact_discrete_moments(const Vector& p, const Vector& q, const Matrix& gram_zz) {
  check_probability_vector(p, "p");
  check_probability_vector(q, "q");
  if (p.size() != q.size() || gram_zz.rows() != p.size() || gram_zz.cols() != p.size()) {
    throw InputError("probability vectors and gram matrix disagree in size");
  }
  DiscreteMoments mo;
  mo.norm_p = p.dot(gram_zz * p);
  mo.norm_q = q.dot(gram_zz * q);
  mo.cross = p.dot(gram_zz * q);
  return mo;
}

double exact_discrete_mmd2(const DiscretePair& pair, const Matrix& gram_zz) {
  const Vector diff = pair.p() - pair.q();
  if (gram_zz.rows() != diff.size() || gram_zz.cols() != diff.size()) {
    throw InputError("gram matrix does not match the support size");
  }
  return diff.dot(gram_zz * diff);
}

double exact_discrete_nammd(const DiscretePair& pair, const Matrix& gram_zz, double upper_bound) {
  const DiscreteMoments mo = exact_discrete_moments(pair.p(), pair.q(), gram_zz);
  const double mmd2 = mo.norm_p + mo.norm_q - 2.0 * mo.cross;
  return mmd2 / (4.0 * upper_bound - mo.norm_p - mo.norm_q);
}

double tv_distance(const Vector& p, const Vector& q) {
  if (p.size() != q.size()) throw InputError("tv_distance: length mismatch");
  check_probability_vector(p, "p");
  check_probability_vector(q, "q");
  return 0.5 * (p - q).cwiseAbs().sum();
}

GaussianMoments gaussian_moment_oracle(double var_p, double var_q, double mean_gap, double bandwidth) {
  if (!(var_p > 0.0) || !(var_q > 0.0)) throw InputError("gaussian_moment_oracle: variances must be positive");
  if (!(bandwidth > 0.0)) throw InputError("gaussian_moment_oracle: bandwidth must be positive");
  if (!std::isfinite(mean_gap)) throw InputError("gaussian_moment_oracle: mean gap must be finite");
  const double bw2 = bandwidth * bandwidth;
  // E exp(-Z^2 / (2 bw^2)) for Z ~ N(mu, v) is exp(-mu^2 / (2 (bw^2 + v))) / sqrt(1 + v / bw^2).
  auto expected = [bw2](double mu, double v) {
    return std::exp(-mu * mu / (2.0 * (bw2 + v))) / std::sqrt(1.0 + v / bw2);
  };
  GaussianMoments g;
  g.norm_p = expected(0.0, 2.0 * var_p);
  g.norm_q = expected(0.0, 2.0 * var_q);
  g.cross = expected(mean_gap, var_p + var_q);
  g.mmd2 = g.norm_p + g.norm_q - 2.0 * g.cross;
  return g;
}

}  // namespace nammd
