#include "nammd/kernelsel.hpp"

#include "nammd/error.hpp"
#include "nammd/estimators.hpp"

#include <unsupported/Eigen/AutoDiff>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>
#include <vector>

namespace nammd {

namespace {

constexpr int kFields = 13;
using FieldGrad = Eigen::Matrix<double, kFields, 1>;
using Ad = Eigen::AutoDiffScalar<FieldGrad>;

void check_pair(const Sample& x, const Sample& y) {
  if (x.dimension() != y.dimension()) throw InputError("samples differ in dimension");
  if (x.size() != y.size()) throw InputError("samples must have equal size");
  if (x.size() < 4) throw InputError("t-statistic needs m >= 4");
}

double t_from_moments(double mmd2, double v, bool& degenerate) {
  degenerate = !(v > 0.0) || !std::isfinite(v) || !std::isfinite(mmd2);
  if (degenerate) return 0.0;
  return mmd2 / std::sqrt(v + kVarianceRegularizer);
}

// t as a function of the summary fields, with d t / d field for every field.
struct FieldAdjoint {
  double t = 0.0;
  bool degenerate = false;
  FieldGrad grad = FieldGrad::Zero();
};

FieldAdjoint t_with_field_gradient(const GramSummary& s) {
  BasicGramSummary<Ad> a;
  a.m = s.m;
  a.upper_bound = s.upper_bound;
  const double values[kFields] = {s.sum_xx,  s.sum_yy,    s.sum_xy,    s.trace_xy,  s.row_sq_xx,
                                  s.row_sq_yy, s.frob_xx,  s.frob_yy,   s.frob_xy,   s.row_sq_xy,
                                  s.col_sq_xy, s.coupling_x, s.coupling_y};
  Ad* fields[kFields] = {&a.sum_xx,  &a.sum_yy,    &a.sum_xy,    &a.trace_xy,  &a.row_sq_xx,
                         &a.row_sq_yy, &a.frob_xx,  &a.frob_yy,   &a.frob_xy,   &a.row_sq_xy,
                         &a.col_sq_xy, &a.coupling_x, &a.coupling_y};
  for (int f = 0; f < kFields; ++f) *fields[f] = Ad(values[f], kFields, f);

  const Ad mmd2 = detail::mmd2_from_summary(a);
  Ad zeta1, zeta2;
  detail::zetas_from_summary(a, zeta1, zeta2);
  const double m = static_cast<double>(s.m);
  const Ad v = ((4.0 * m - 8.0) * zeta1 + 2.0 * zeta2) / (m - 1.0);

  FieldAdjoint out;
  out.t = t_from_moments(mmd2.value(), v.value(), out.degenerate);
  if (out.degenerate) return out;
  using std::sqrt;
  const Ad t = mmd2 / sqrt(v + kVarianceRegularizer);
  out.grad = t.derivatives();
  return out;
}

// Adjoint of t with respect to each Gram entry (diagonals of kxx, kyy excluded).
struct GramAdjoint {
  Matrix axx, ayy, axy;
};

GramAdjoint gram_adjoint(const GramBlock& g, const FieldGrad& d) {
  const Index m = g.size();
  Vector row_xx = Vector::Zero(m), row_yy = Vector::Zero(m);
  for (Index i = 0; i < m; ++i) {
    for (Index j = 0; j < m; ++j) {
      if (i == j) continue;
      row_xx[i] += g.kxx(i, j);
      row_yy[i] += g.kyy(i, j);
    }
  }
  // Within-sample blocks are symmetric, so column sums equal row sums.
  const Vector c = g.kxy.rowwise().sum();
  const Vector c_t = g.kxy.colwise().sum().transpose();

  GramAdjoint adj{Matrix::Zero(m, m), Matrix::Zero(m, m), Matrix::Zero(m, m)};
  for (Index i = 0; i < m; ++i) {
    for (Index j = 0; j < m; ++j) {
      if (i != j) {
        adj.axx(i, j) = d[0] + 2.0 * d[4] * row_xx[i] + 2.0 * d[6] * g.kxx(i, j) + d[11] * c[j];
        adj.ayy(i, j) = d[1] + 2.0 * d[5] * row_yy[i] + 2.0 * d[7] * g.kyy(i, j) + d[12] * c_t[j];
      }
      adj.axy(i, j) = d[2] + (i == j ? d[3] : 0.0) + 2.0 * d[8] * g.kxy(i, j) + 2.0 * d[9] * c[i] +
                      2.0 * d[10] * c_t[j] + d[11] * row_xx[i] + d[12] * row_yy[j];
    }
  }
  return adj;
}

bool diagonal_metric(const Matrix& metric) {
  for (Index i = 0; i < metric.rows(); ++i) {
    for (Index j = 0; j < metric.cols(); ++j) {
      if (i != j && metric(i, j) != 0.0) return false;
    }
  }
  return true;
}

// Accumulates sum_ij adj(i, j) * d k(a_i, b_j) / d theta over one block.
void accumulate_block(const KernelSpec& spec, const Matrix& a, const Matrix& b, const Matrix& kab,
                      const Matrix& adj, bool skip_diagonal, Vector& grad) {
  const double bw = spec.bandwidth();
  const Index d = a.cols();
  for (Index i = 0; i < a.rows(); ++i) {
    for (Index j = 0; j < b.rows(); ++j) {
      if (skip_diagonal && i == j) continue;
      const double w = adj(i, j) * kab(i, j);
      if (w == 0.0) continue;
      switch (spec.family()) {
        case KernelFamily::gaussian: {
          const double sq = (a.row(i) - b.row(j)).squaredNorm();
          grad[0] += w * sq / (bw * bw);
          break;
        }
        case KernelFamily::laplace: {
          const double l1 = (a.row(i) - b.row(j)).cwiseAbs().sum();
          grad[0] += w * l1 / bw;
          break;
        }
        case KernelFamily::mahalanobis: {
          for (Index k = 0; k < d; ++k) {
            const double diff = a(i, k) - b(j, k);
            grad[k] -= w * spec.metric()(k, k) * diff * diff / (2.0 * bw * bw);
          }
          break;
        }
      }
    }
  }
}

}  // namespace

TStatistic power_t_statistic(const Sample& x, const Sample& y, const KernelSpec& spec) {
  check_pair(x, y);
  const GramSummary s = summarize(spec, x, y);
  const double v = mmd_asymptotic_variance(variance_components(s), s.m);
  TStatistic t;
  t.value = t_from_moments(mmd2_u_statistic(s), v, t.degenerate);
  return t;
}

double power_t_statistic_nammd_form(const Sample& x, const Sample& y, const KernelSpec& spec) {
  check_pair(x, y);
  const GramSummary s = summarize(spec, x, y);
  const double v = mmd_asymptotic_variance(variance_components(s), s.m);
  if (!(v > 0.0)) return 0.0;
  const double sigma = std::sqrt(v + kVarianceRegularizer) / norm_u_statistic(s);
  return nammd_u_statistic(s) / sigma;
}

Vector log_parameters(const KernelSpec& spec) {
  if (spec.family() != KernelFamily::mahalanobis) return Vector::Constant(1, std::log(spec.bandwidth()));
  if (!diagonal_metric(spec.metric())) {
    throw ConfigError("kernel selection supports diagonal mahalanobis metrics only");
  }
  return spec.metric().diagonal().array().log().matrix();
}

KernelSpec with_log_parameters(const KernelSpec& spec, const Vector& theta) {
  if (spec.family() != KernelFamily::mahalanobis) {
    if (theta.size() != 1) throw InputError("expected a single log-bandwidth parameter");
    return spec.with_bandwidth(std::exp(theta[0]));
  }
  if (theta.size() != spec.metric().rows()) throw InputError("expected one log-weight per dimension");
  Matrix metric = Matrix::Zero(theta.size(), theta.size());
  metric.diagonal() = theta.array().exp().matrix();
  return KernelSpec::mahalanobis(std::move(metric), spec.bandwidth());
}

TStatisticGradient power_t_gradient(const Sample& x, const Sample& y, const KernelSpec& spec, GradientMode mode,
                                    double fd_step) {
  check_pair(x, y);
  const Vector theta = log_parameters(spec);
  TStatisticGradient out;
  out.gradient = Vector::Zero(theta.size());

  if (mode == GradientMode::central_difference) {
    out.t = power_t_statistic(x, y, spec);
    for (Index p = 0; p < theta.size(); ++p) {
      Vector up = theta, down = theta;
      up[p] += fd_step;
      down[p] -= fd_step;
      const double tu = power_t_statistic(x, y, with_log_parameters(spec, up)).value;
      const double td = power_t_statistic(x, y, with_log_parameters(spec, down)).value;
      out.gradient[p] = (tu - td) / (2.0 * fd_step);
    }
    return out;
  }

  const GramBlock g = gram_blocks(spec, x, y);
  const FieldAdjoint field = t_with_field_gradient(summarize(g));
  out.t = {field.t, field.degenerate};
  if (field.degenerate) return out;
  const GramAdjoint adj = gram_adjoint(g, field.grad);
  accumulate_block(spec, x.rows(), x.rows(), g.kxx, adj.axx, true, out.gradient);
  accumulate_block(spec, y.rows(), y.rows(), g.kyy, adj.ayy, true, out.gradient);
  accumulate_block(spec, x.rows(), y.rows(), g.kxy, adj.axy, false, out.gradient);
  return out;
}

KernelSelection select_kernel(const Sample& x, const Sample& y, const KernelSpec& init,
                              const OptimizerConfig& config) {
  if (config.iterations < 0) throw ConfigError("iterations must be nonnegative");
  if (!(config.step_size > 0.0)) throw ConfigError("step size must be positive");
  if (!(config.adam_beta1 > 0.0 && config.adam_beta1 < 1.0) ||
      !(config.adam_beta2 > 0.0 && config.adam_beta2 < 1.0)) {
    throw ConfigError("Adam betas must lie in (0, 1)");
  }
  check_pair(x, y);

  Vector theta = log_parameters(init);
  const double t0 = power_t_statistic(x, y, init).value;
  KernelSelection best{init, t0, t0, 0, false};

  Vector first = Vector::Zero(theta.size());
  Vector second = Vector::Zero(theta.size());
  for (int it = 1; it <= config.iterations; ++it) {
    const KernelSpec current = with_log_parameters(init, theta);
    const TStatisticGradient tg = power_t_gradient(x, y, current, config.gradient_mode, config.fd_step);
    if (!std::isfinite(tg.t.value) || !tg.gradient.allFinite()) {
      best.aborted = true;
      break;
    }
    if (tg.t.value > best.final_t) {
      best.spec = current;
      best.final_t = tg.t.value;
    }
    best.iterations_run = it;
    if (tg.t.degenerate || tg.gradient.isZero(0.0)) break;  // flat objective: nothing to climb

    first = config.adam_beta1 * first + (1.0 - config.adam_beta1) * tg.gradient;
    second = config.adam_beta2 * second + (1.0 - config.adam_beta2) * tg.gradient.cwiseAbs2();
    const Vector first_hat = first / (1.0 - std::pow(config.adam_beta1, it));
    const Vector second_hat = second / (1.0 - std::pow(config.adam_beta2, it));
    theta += (config.step_size * first_hat.array() /
              (second_hat.array().sqrt() + config.epsilon_stabilizer)).matrix();
    if (!theta.allFinite()) {
      best.aborted = true;
      break;
    }
  }
  if (!best.aborted && best.iterations_run == config.iterations && config.iterations > 0) {
    const KernelSpec last = with_log_parameters(init, theta);
    const double t_last = power_t_statistic(x, y, last).value;
    if (std::isfinite(t_last) && t_last > best.final_t) {
      best.spec = last;
      best.final_t = t_last;
    }
  }
  return best;
}

KernelSelection select_kernel(const Sample& x, const Sample& y, KernelFamily family,
                              const OptimizerConfig& config) {
  const double bw = median_heuristic(x, y);
  switch (family) {
    case KernelFamily::gaussian:
      return select_kernel(x, y, KernelSpec::gaussian(bw), config);
    case KernelFamily::laplace:
      return select_kernel(x, y, KernelSpec::laplace(bw), config);
    case KernelFamily::mahalanobis:
      return select_kernel(x, y, KernelSpec::mahalanobis(Matrix::Identity(x.dimension(), x.dimension()), bw),
                           config);
  }
  throw ConfigError("unknown kernel family");
}

TrainTestSplit split_train_test(const Sample& x, const Sample& y, double train_fraction, Rng& rng) {
  if (x.size() != y.size()) throw InputError("samples must have equal size");
  if (!(train_fraction > 0.0 && train_fraction < 1.0)) throw ConfigError("train fraction must lie in (0, 1)");
  const Index m = x.size();
  const auto n_train = static_cast<Index>(std::llround(train_fraction * static_cast<double>(m)));
  if (n_train < 2 || m - n_train < 2) throw InputError("split leaves fewer than 2 points on one side");

  auto shuffled = [&] {
    std::vector<Index> idx(static_cast<std::size_t>(m));
    std::iota(idx.begin(), idx.end(), Index{0});
    std::shuffle(idx.begin(), idx.end(), rng);
    return idx;
  };
  const auto ix = shuffled();
  const auto iy = shuffled();
  const auto head = static_cast<std::size_t>(n_train);
  const std::span<const Index> sx(ix), sy(iy);
  return {x.select(sx.first(head)), y.select(sy.first(head)), x.select(sx.subspan(head)),
          y.select(sy.subspan(head))};
}

}  // namespace nammd
