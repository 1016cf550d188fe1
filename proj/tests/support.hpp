#pragma once

// Generators and brute-force reference implementations shared by the unit tests.
// The oracles deliberately use plain index loops over the definitions and never
// call into the summary code they are checking.

#include "nammd/estimators.hpp"
#include "nammd/kernels.hpp"
#include "nammd/stats.hpp"
#include "nammd/types.hpp"

#include <cmath>
#include <random>

namespace nammd::testing {

inline Sample gaussian_sample(Index m, Index d, Rng& rng, double mean = 0.0, double sd = 1.0) {
  std::normal_distribution<double> n(mean, sd);
  Matrix pts(m, d);
  for (Index i = 0; i < m; ++i)
    for (Index c = 0; c < d; ++c) pts(i, c) = n(rng);
  return Sample(std::move(pts));
}

inline Sample column(std::initializer_list<double> v) {
  Matrix pts(static_cast<Index>(v.size()), 1);
  Index i = 0;
  for (double x : v) pts(i++, 0) = x;
  return Sample(std::move(pts));
}

// Symmetric within-sample blocks with diagonal K and every entry in [0, K];
// not necessarily positive definite, which the algebra does not need.
inline GramBlock random_gram_block(Index m, Rng& rng, double K = 1.0) {
  std::uniform_real_distribution<double> u(0.0, K);
  GramBlock g{Matrix(m, m), Matrix(m, m), Matrix(m, m), K};
  for (Index i = 0; i < m; ++i) {
    g.kxx(i, i) = g.kyy(i, i) = K;
    for (Index j = 0; j < i; ++j) {
      g.kxx(i, j) = g.kxx(j, i) = u(rng);
      g.kyy(i, j) = g.kyy(j, i) = u(rng);
    }
    for (Index j = 0; j < m; ++j) g.kxy(i, j) = u(rng);
  }
  return g;
}

inline double loop_mmd2(const GramBlock& g) {
  const Index m = g.size();
  double s = 0.0;
  for (Index i = 0; i < m; ++i)
    for (Index j = 0; j < m; ++j)
      if (i != j) s += g.kxx(i, j) + g.kyy(i, j) - g.kxy(i, j) - g.kxy(j, i);
  return s / (static_cast<double>(m) * (m - 1));
}

inline double loop_norm(const GramBlock& g) {
  const Index m = g.size();
  double s = 0.0;
  for (Index i = 0; i < m; ++i)
    for (Index j = 0; j < m; ++j)
      if (i != j) s += 4.0 * g.upper_bound - g.kxx(i, j) - g.kyy(i, j);
  return s / (static_cast<double>(m) * (m - 1));
}

// Each inner product of the variance decomposition estimated by its own distinct-index
// U-statistic, written as nested loops.
inline VarianceComponents loop_zetas(const GramBlock& g) {
  const Index m = g.size();
  const double md = static_cast<double>(m);
  const double f2 = md * (md - 1), f3 = f2 * (md - 2), f4 = f3 * (md - 3);
  const auto& X = g.kxx;
  const auto& Y = g.kyy;
  const auto& C = g.kxy;

  double cx_xx = 0, cy_yy = 0, sq_xx = 0, sq_yy = 0, cx_yy = 0, cy_xx = 0, sq_xy = 0;
  double cx_xy = 0, xx_xy = 0, cy_yx = 0, yy_xy = 0, e2_xx = 0, e2_yy = 0, e2_xy = 0;
  for (Index i = 0; i < m; ++i)
    for (Index j = 0; j < m; ++j) {
      e2_xy += C(i, j) * C(i, j);
      if (i == j) continue;
      e2_xx += X(i, j) * X(i, j);
      e2_yy += Y(i, j) * Y(i, j);
      for (Index l = 0; l < m; ++l) {
        cx_xy += X(i, j) * C(j, l);
        cy_yx += Y(i, j) * C(l, j);
        if (l == i || l == j) continue;
        cx_xx += X(i, j) * X(i, l);
        cy_yy += Y(i, j) * Y(i, l);
        for (Index b = 0; b < m; ++b) {
          xx_xy += X(i, j) * C(l, b);
          yy_xy += Y(i, j) * C(b, l);
          if (b == i || b == j || b == l) continue;
          sq_xx += X(i, j) * X(l, b);
          sq_yy += Y(i, j) * Y(l, b);
        }
      }
    }
  for (Index i = 0; i < m; ++i)
    for (Index j = 0; j < m; ++j)
      for (Index l = 0; l < m; ++l) {
        if (j != l) cx_yy += C(i, j) * C(i, l);
        if (i != l) cy_xx += C(i, j) * C(l, j);
        if (i == l) continue;
        for (Index b = 0; b < m; ++b)
          if (j != b) sq_xy += C(i, j) * C(l, b);
      }
  cx_xx /= f3;
  cy_yy /= f3;
  sq_xx /= f4;
  sq_yy /= f4;
  cx_yy /= md * f2;
  cy_xx /= md * f2;
  sq_xy /= f2 * f2;
  cx_xy /= md * f2;
  cy_yx /= md * f2;
  xx_xy /= md * f3;
  yy_xy /= md * f3;
  e2_xx /= f2;
  e2_yy /= f2;
  e2_xy /= md * md;

  VarianceComponents z;
  z.zeta1 = cx_xx - sq_xx + cy_yy - sq_yy + cx_yy + cy_xx - 2 * sq_xy - 2 * cx_xy + 2 * xx_xy - 2 * cy_yx +
            2 * yy_xy;
  z.zeta2 = e2_xx - sq_xx + e2_yy - sq_yy + 2 * e2_xy - 2 * sq_xy - 4 * cx_xy + 4 * xx_xy - 4 * cy_yx +
            4 * yy_xy;
  return z;
}

}  // namespace nammd::testing
