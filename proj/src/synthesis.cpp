#include "nammd/synthesis.hpp"

#include "nammd/error.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>
#include <vector>

namespace nammd {

Matrix integer_support(Index n) {
  if (n < 1) throw InputError("support size must be positive");
  Matrix s(n, 1);
  for (Index i = 0; i < n; ++i) s(i, 0) = static_cast<double>(i + 1);
  return s;
}

DiscretePair uniform_with_tv(const Matrix& support, double eps_prime, Rng& rng) {
  const Index n = support.rows();
  if (n < 2) throw InputError("uniform_with_tv needs at least 2 support points");
  if (!(eps_prime > 0.0 && eps_prime < 1.0)) throw InputError("eps_prime must lie in (0, 1)");
  const double nd = static_cast<double>(n);
  // The slack absorbs products like 0.7 * 50 landing a hair above an integer.
  const auto k = static_cast<Index>(std::ceil(eps_prime * nd - 1e-9));
  if (k >= n) {
    throw InfeasibleError("TV " + std::to_string(eps_prime) + " is not reachable from the uniform law on " +
                          std::to_string(n) + " points (maximum " + std::to_string((nd - 1.0) / nd) + ")");
  }

  std::vector<Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Index{0});
  std::shuffle(order.begin(), order.end(), rng);

  Vector p = Vector::Constant(n, 1.0 / nd);
  Vector q = p;
  const double take = eps_prime / static_cast<double>(k);
  const double give = eps_prime / static_cast<double>(n - k);
  for (Index r = 0; r < n; ++r) {
    const Index i = order[static_cast<std::size_t>(r)];
    q[i] = r < k ? std::max(0.0, q[i] - take) : q[i] + give;
  }
  return {support, std::move(p), std::move(q)};
}

DiscretePair uniform_pair(const Sample& z, const Sample& zp) {
  const Sample support = Sample::concat(z, zp);
  const Index m = z.size();
  const Index mp = zp.size();
  Vector p = Vector::Zero(m + mp), q = Vector::Zero(m + mp);
  p.head(m).setConstant(1.0 / static_cast<double>(m));
  q.tail(mp).setConstant(1.0 / static_cast<double>(mp));
  return {support.rows(), std::move(p), std::move(q)};
}

DiscretePair dirac_pair(std::span<const double> z0, std::span<const double> zi) {
  if (z0.size() != zi.size() || z0.empty()) throw InputError("dirac_pair: points must share a positive dimension");
  const auto d = static_cast<Index>(z0.size());
  Matrix support(2, d);
  for (Index c = 0; c < d; ++c) {
    support(0, c) = z0[static_cast<std::size_t>(c)];
    support(1, c) = zi[static_cast<std::size_t>(c)];
  }
  if (!support.allFinite()) throw InputError("dirac_pair: points must be finite");
  return {std::move(support), Vector::Unit(2, 0), Vector::Unit(2, 1)};
}

namespace {

// Block sums of the Gram matrix of W = [Z; Z'] split after row m.
struct BlockSums {
  double zz = 0.0;
  double pp = 0.0;
  double zp = 0.0;
};

BlockSums block_sums(const Matrix& g, Index m) {
  const Index n = g.rows();
  return {g.topLeftCorner(m, m).sum(), g.bottomRightCorner(n - m, n - m).sum(), g.topRightCorner(m, n - m).sum()};
}

PointSetMoments moments_from_sums(const BlockSums& s, Index m, Index mp, double upper_bound) {
  PointSetMoments r;
  const double md = static_cast<double>(m), mpd = static_cast<double>(mp);
  r.norm_p = s.zz / (md * md);
  r.norm_q = s.pp / (mpd * mpd);
  r.cross = s.zp / (md * mpd);
  r.mmd2 = r.norm_p + r.norm_q - 2.0 * r.cross;
  r.nammd = r.mmd2 / (4.0 * upper_bound - r.norm_p - r.norm_q);
  return r;
}

struct Objective {
  double epsilon;
  std::optional<double> norm_target;
  double norm_weight;

  double loss(const PointSetMoments& r) const {
    double l = (r.nammd - epsilon) * (r.nammd - epsilon);
    if (norm_target) {
      const double e = r.norm_p + r.norm_q - *norm_target;
      l += norm_weight * e * e;
    }
    return l;
  }

  // dL/d norm_p, dL/d norm_q, dL/d cross.
  void partials(const PointSetMoments& r, double upper_bound, double& da, double& db, double& dc) const {
    const double den = 4.0 * upper_bound - r.norm_p - r.norm_q;
    const double outer = 2.0 * (r.nammd - epsilon);
    da = db = outer * (den + r.mmd2) / (den * den);
    dc = outer * (-2.0 / den);
    if (norm_target) {
      const double e = 2.0 * norm_weight * (r.norm_p + r.norm_q - *norm_target);
      da += e;
      db += e;
    }
  }
};

Matrix analytic_gaussian_gradient(const Matrix& w, const Matrix& g, Index m, const Objective& obj,
                                  const PointSetMoments& r, const KernelSpec& spec) {
  const Index n = w.rows();
  const Index mp = n - m;
  double da = 0, db = 0, dc = 0;
  obj.partials(r, spec.upper_bound(), da, db, dc);
  const double md = static_cast<double>(m), mpd = static_cast<double>(mp);
  const double wa = 2.0 * da / (md * md);
  const double wb = 2.0 * db / (mpd * mpd);
  const double wc = dc / (md * mpd);
  const double scale = 1.0 / (spec.bandwidth() * spec.bandwidth());  // d k / d u = -k (u - v) / bw^2

  Matrix grad = Matrix::Zero(n, w.cols());
  for (Index a = 0; a < n; ++a) {
    for (Index b = 0; b < n; ++b) {
      if (a == b) continue;
      const bool za = a < m, zb = b < m;
      const double weight = za == zb ? (za ? wa : wb) : wc;
      grad.row(a) -= weight * g(a, b) * scale * (w.row(a) - w.row(b));
    }
  }
  return grad;
}

Matrix central_difference_gradient(const Matrix& w, const Matrix& g, Index m, const Objective& obj,
                                   const BlockSums& sums, const KernelSpec& spec, double h) {
  const Index n = w.rows();
  const KernelEvaluator k(spec, w.cols());
  const Matrix t = k.transform(w);
  Matrix grad = Matrix::Zero(n, w.cols());
  Matrix moved = t;

  auto loss_with_row = [&](Index a) {
    BlockSums s = sums;
    const double* pa = moved.row(a).data();
    for (Index b = 0; b < n; ++b) {
      const double kn = b == a ? k(pa, pa) : k(pa, t.row(b).data());
      const double delta = kn - g(a, b);
      const double weight = b == a ? 1.0 : 2.0;
      if ((a < m) != (b < m)) {
        s.zp += delta;
      } else if (a < m) {
        s.zz += weight * delta;
      } else {
        s.pp += weight * delta;
      }
    }
    return obj.loss(moments_from_sums(s, m, n - m, spec.upper_bound()));
  };

  for (Index a = 0; a < n; ++a) {
    for (Index c = 0; c < w.cols(); ++c) {
      Matrix step = Matrix::Zero(1, w.cols());
      step(0, c) = h;
      const Matrix ts = k.transform(step);
      moved.row(a) = t.row(a) + ts.row(0);
      const double up = loss_with_row(a);
      moved.row(a) = t.row(a) - ts.row(0);
      const double down = loss_with_row(a);
      moved.row(a) = t.row(a);
      grad(a, c) = (up - down) / (2.0 * h);
    }
  }
  return grad;
}

bool targets_met(const PointSetMoments& r, double epsilon, const TargetConfig& c) {
  if (std::abs(r.nammd - epsilon) > c.tolerance) return false;
  if (c.norm_sum_target && std::abs(r.norm_p + r.norm_q - *c.norm_sum_target) > c.norm_tolerance) return false;
  return true;
}

}  // namespace

PointSetMoments point_set_moments(const Sample& z, const Sample& zp, const KernelSpec& spec) {
  if (z.dimension() != zp.dimension()) throw InputError("point sets differ in dimension");
  const Sample w = Sample::concat(z, zp);
  return moments_from_sums(block_sums(gram_matrix(spec, w.rows()), z.size()), z.size(), zp.size(),
                           spec.upper_bound());
}

LearnedPair learn_target_nammd(const Sample& z, const Sample& zp, const KernelSpec& spec, double epsilon,
                               const TargetConfig& config) {
  if (!(epsilon > 0.0 && epsilon < 1.0)) throw InputError("target epsilon must lie in (0, 1)");
  if (z.dimension() != zp.dimension()) throw InputError("point sets differ in dimension");
  const OptimizerConfig& opt = config.optimizer;
  if (opt.iterations < 0 || !(opt.step_size > 0.0)) throw ConfigError("invalid optimizer settings");
  if (!(config.tolerance > 0.0)) throw ConfigError("tolerance must be positive");

  const Index m = z.size();
  const Objective obj{epsilon, config.norm_sum_target, config.norm_weight};
  const bool analytic = spec.family() == KernelFamily::gaussian && opt.gradient_mode == GradientMode::analytic;

  Matrix w = Sample::concat(z, zp).rows();
  Matrix best_w = w;
  double best_loss = std::numeric_limits<double>::infinity();
  PointSetMoments best_moments;
  Matrix first = Matrix::Zero(w.rows(), w.cols());
  Matrix second = first;

  LearnedPair out{z, zp, {}, 0, false, false};
  for (int it = 0;; ++it) {
    const Matrix g = gram_matrix(spec, w);
    const BlockSums sums = block_sums(g, m);
    const PointSetMoments r = moments_from_sums(sums, m, w.rows() - m, spec.upper_bound());
    const double loss = obj.loss(r);
    if (!std::isfinite(loss)) {
      out.aborted = true;
      break;
    }
    if (loss < best_loss) {
      best_loss = loss;
      best_w = w;
      best_moments = r;
    }
    out.iterations = it;
    if (targets_met(r, epsilon, config)) {
      best_w = w;
      best_moments = r;
      out.converged = true;
      break;
    }
    if (it == opt.iterations) break;

    const Matrix grad = analytic ? analytic_gaussian_gradient(w, g, m, obj, r, spec)
                                 : central_difference_gradient(w, g, m, obj, sums, spec, opt.fd_step);
    if (!grad.allFinite()) {
      out.aborted = true;
      break;
    }
    const int t = it + 1;
    first = opt.adam_beta1 * first + (1.0 - opt.adam_beta1) * grad;
    second = opt.adam_beta2 * second + (1.0 - opt.adam_beta2) * grad.cwiseAbs2();
    const double c1 = 1.0 - std::pow(opt.adam_beta1, t);
    const double c2 = 1.0 - std::pow(opt.adam_beta2, t);
    w.array() -= opt.step_size * (first.array() / c1) / ((second.array() / c2).sqrt() + opt.epsilon_stabilizer);
  }
  out.z = Sample(best_w.topRows(m));
  out.zp = Sample(best_w.bottomRows(best_w.rows() - m));
  out.moments = best_moments;
  return out;
}

namespace {

Matrix checked_factor(const Matrix& cov, Index d, const char* what) {
  if (cov.rows() != d || cov.cols() != d) throw ConfigError(std::string(what) + " has the wrong shape");
  if (!cov.isApprox(cov.transpose(), 1e-12)) throw ConfigError(std::string(what) + " is not symmetric");
  Eigen::LLT<Matrix> llt(cov);
  if (llt.info() != Eigen::Success) throw ConfigError(std::string(what) + " is not positive definite");
  return llt.matrixL();
}

Matrix gaussian_rows(Index m, Index d, Rng& rng) {
  std::normal_distribution<double> normal;
  Matrix out(m, d);
  for (Index i = 0; i < m; ++i) {
    for (Index c = 0; c < d; ++c) out(i, c) = normal(rng);
  }
  return out;
}

}  // namespace

std::pair<Sample, Sample> blob_pair(const BlobConfig& cfg, MixtureMode mode, Index m, Rng& rng) {
  if (cfg.grid_side < 1) throw ConfigError("blob grid_side must be at least 1");
  if (!std::isfinite(cfg.cell_spacing)) throw ConfigError("blob cell_spacing must be finite");
  if (m < 4) throw InputError("blob_pair needs m >= 4");
  const Matrix lx = checked_factor(cfg.null_covariance, 2, "blob null covariance");
  const Matrix ly = mode == MixtureMode::null ? lx : checked_factor(cfg.alt_covariance, 2, "blob alt covariance");
  std::uniform_int_distribution<int> cell(0, cfg.grid_side * cfg.grid_side - 1);

  auto draw = [&](const Matrix& factor) {
    Matrix pts = gaussian_rows(m, 2, rng) * factor.transpose();
    for (Index i = 0; i < m; ++i) {
      const int c = cell(rng);
      pts(i, 0) += cfg.cell_spacing * (c / cfg.grid_side);
      pts(i, 1) += cfg.cell_spacing * (c % cfg.grid_side);
    }
    return Sample(std::move(pts));
  };
  Sample x = draw(lx);
  Sample y = draw(ly);
  return {std::move(x), std::move(y)};
}

std::pair<Sample, Sample> hdgm_pair(const HdgmConfig& cfg, MixtureMode mode, Index m, Rng& rng) {
  if (cfg.dimension < 1 || cfg.components < 1) throw ConfigError("hdgm needs positive dimension and components");
  if (cfg.shifted_coordinates < 0 || cfg.shifted_coordinates > cfg.dimension) {
    throw ConfigError("hdgm shifted_coordinates out of range");
  }
  if (m < 4) throw InputError("hdgm_pair needs m >= 4");
  std::uniform_int_distribution<int> component(0, cfg.components - 1);
  const double shift = mode == MixtureMode::null ? 0.0 : cfg.mean_shift;

  auto draw = [&](double extra) {
    Matrix pts = gaussian_rows(m, cfg.dimension, rng);
    for (Index i = 0; i < m; ++i) {
      pts.row(i).array() += cfg.component_spacing * component(rng);
      pts.row(i).head(cfg.shifted_coordinates).array() += extra;
    }
    return Sample(std::move(pts));
  };
  Sample x = draw(0.0);
  Sample y = draw(shift);
  return {std::move(x), std::move(y)};
}

double constant_mmd_gaussian_sweep(double variance, double target_mmd2, double bandwidth) {
  if (!(target_mmd2 >= 0.0)) throw InputError("target MMD^2 must be nonnegative");
  const GaussianMoments at_zero = gaussian_moment_oracle(variance, variance, 0.0, bandwidth);
  const double supremum = 2.0 * at_zero.norm_p;  // cross term vanishes as the gap grows
  if (target_mmd2 >= supremum) {
    throw InfeasibleError("MMD^2 " + std::to_string(target_mmd2) + " unreachable at variance " +
                          std::to_string(variance) + " (supremum " + std::to_string(supremum) + ")");
  }
  if (target_mmd2 == 0.0) return 0.0;
  auto mmd2 = [&](double gap) { return gaussian_moment_oracle(variance, variance, gap, bandwidth).mmd2; };
  double lo = 0.0, hi = bandwidth;
  while (mmd2(hi) < target_mmd2) hi *= 2.0;
  for (int i = 0; i < 200 && hi - lo > 0.0; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    (mmd2(mid) < target_mmd2 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

GramSummary sample_discrete_summary(const DiscretePair& pair, const Matrix& support_gram, double upper_bound,
                                    Index m, Rng& rng) {
  if (support_gram.rows() != pair.size() || support_gram.cols() != pair.size()) {
    throw InputError("support Gram matrix does not match the pair's support");
  }
  const std::span<const double> p(pair.p().data(), static_cast<std::size_t>(pair.size()));
  const std::span<const double> q(pair.q().data(), static_cast<std::size_t>(pair.size()));
  const auto xi = categorical_draws(p, m, rng);
  const auto yi = categorical_draws(q, m, rng);
  return summarize_indexed(support_gram, upper_bound, xi, yi);
}

void write_labeled_csv(const std::string& path, const Sample& x, const Sample& y) {
  if (x.dimension() != y.dimension()) throw InputError("samples differ in dimension");
  std::ofstream out(path);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  out.precision(17);
  for (Index c = 0; c < x.dimension(); ++c) out << 'x' << (c + 1) << ',';
  out << "label\n";
  auto emit = [&](const Sample& s, int label) {
    for (Index i = 0; i < s.size(); ++i) {
      for (Index c = 0; c < s.dimension(); ++c) out << s.rows()(i, c) << ',';
      out << label << '\n';
    }
  };
  emit(x, 0);
  emit(y, 1);
  if (!out) throw IoError("write to '" + path + "' failed");
}

}  // namespace nammd
