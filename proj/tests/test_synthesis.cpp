#include "nammd/error.hpp"
#include "nammd/synthesis.hpp"
#include "support.hpp"

#include <catch_amalgamated.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

using namespace nammd;
using Catch::Approx;

TEST_CASE("uniform_with_tv hits the requested distance") {
  Rng rng(1);
  const Matrix s50 = integer_support(50);
  CHECK(s50.rows() == 50);
  CHECK(s50(49, 0) == 50.0);

  for (double eps : {0.02, 0.1, 0.3, 0.5, 0.9, 0.98}) {
    const auto pair = uniform_with_tv(s50, eps, rng);
    CHECK(tv_distance(pair.p(), pair.q()) == Approx(eps).epsilon(1e-12));
    CHECK(pair.p().isApproxToConstant(1.0 / 50));
  }
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::uniform_int_distribution<Index> sizes(2, 80);
  int tried = 0;
  for (int t = 0; t < 1000; ++t) {
    const Index n = sizes(rng);
    const double eps = u(rng);
    if (eps <= 0.0) continue;
    if (eps > static_cast<double>(n - 1) / static_cast<double>(n) + 1e-12) {
      CHECK_THROWS_AS(uniform_with_tv(integer_support(n), eps, rng), InfeasibleError);
      continue;
    }
    const auto pair = uniform_with_tv(integer_support(n), eps, rng);
    REQUIRE(pair.q().minCoeff() >= 0.0);
    REQUIRE(pair.q().sum() == Approx(1.0).epsilon(1e-12));
    REQUIRE(tv_distance(pair.p(), pair.q()) == Approx(eps).epsilon(1e-10));
    ++tried;
  }
  CHECK(tried > 900);
  CHECK_THROWS_AS(uniform_with_tv(s50, 0.0, rng), InputError);
  CHECK_THROWS_AS(uniform_with_tv(s50, 1.0, rng), InputError);
}

TEST_CASE("dirac and uniform pairs") {
  const std::vector<double> a{0.0, 0.0}, b{1.0, 1.0};
  const auto d = dirac_pair(a, b);
  CHECK(d.p() == Vector{{1.0, 0.0}});
  CHECK(d.q() == Vector{{0.0, 1.0}});
  const auto spec = KernelSpec::gaussian(1.0);
  const Matrix G = gram_matrix(spec, d.support());
  // Dirac masses: MMD^2 = 2 - 2 k(a, b), norms = 1 each.
  CHECK(exact_discrete_mmd2(d, G) == Approx(2 - 2 * std::exp(-1.0)));
  CHECK(exact_discrete_nammd(d, G, 1.0) == Approx((2 - 2 * std::exp(-1.0)) / 2));

  Rng rng(2);
  const Sample z = testing::gaussian_sample(5, 2, rng), zp = testing::gaussian_sample(5, 2, rng, 1.0);
  const auto u = uniform_pair(z, zp);
  CHECK(u.size() == 10);
  const auto pm = point_set_moments(z, zp, spec);
  const Matrix Gu = gram_matrix(spec, u.support());
  CHECK(pm.mmd2 == Approx(exact_discrete_mmd2(u, Gu)).epsilon(1e-12));
  CHECK(pm.nammd == Approx(exact_discrete_nammd(u, Gu, 1.0)).epsilon(1e-12));
  CHECK(pm.norm_p == Approx(gram_matrix(spec, z.rows()).mean()).epsilon(1e-12));
  CHECK(pm.cross == Approx(cross_gram(spec, z.rows(), zp.rows()).mean()).epsilon(1e-12));
}

TEST_CASE("learn_target_nammd reaches the target") {
  const auto spec = KernelSpec::gaussian(1.0);
  Rng rng(3);
  const Sample z = testing::gaussian_sample(50, 2, rng);
  const Sample zp = testing::gaussian_sample(50, 2, rng, 0.1);
  for (double eps : {0.1, 0.3}) {
    const auto r = learn_target_nammd(z, zp, spec, eps);
    CHECK(r.converged);
    CHECK_FALSE(r.aborted);
    CHECK(std::abs(r.moments.nammd - eps) <= 1e-3);
    CHECK(point_set_moments(r.z, r.zp, spec).nammd == Approx(r.moments.nammd).epsilon(1e-12));
  }
}

TEST_CASE("learn_target_nammd stops at once when the start already meets the target") {
  const auto spec = KernelSpec::gaussian(1.0);
  Rng rng(4);
  const Sample z = testing::gaussian_sample(10, 1, rng);
  const Sample zp = testing::gaussian_sample(10, 1, rng, 1.0);
  const double start = point_set_moments(z, zp, spec).nammd;
  const auto r = learn_target_nammd(z, zp, spec, start);
  CHECK(r.converged);
  CHECK(r.iterations == 0);
  CHECK(r.z.rows() == z.rows());
}

TEST_CASE("learn_target_nammd with a norm target and finite differences") {
  Rng rng(5);
  const Sample z = testing::gaussian_sample(12, 2, rng);
  const Sample zp = testing::gaussian_sample(12, 2, rng, 0.5);
  const auto spec = KernelSpec::laplace(1.5);
  TargetConfig cfg;
  cfg.optimizer = OptimizerConfig{0.01, 5000};
  const auto start = point_set_moments(z, zp, spec);
  cfg.norm_sum_target = start.norm_p + start.norm_q + 0.05;
  const auto r = learn_target_nammd(z, zp, spec, 0.2, cfg);
  CHECK(r.converged);
  CHECK(std::abs(r.moments.nammd - 0.2) <= 1e-3);
  CHECK(std::abs(r.moments.norm_p + r.moments.norm_q - *cfg.norm_sum_target) <= 1e-3);
}

TEST_CASE("constant MMD gaussian sweep") {
  const double bw = 1.0 / std::sqrt(2.0);
  for (double var : {0.1, 0.5, 1.0, 2.0}) {
    const double a = bw / std::sqrt(bw * bw + 2 * var);
    for (double target : {0.01, 0.05, 0.15}) {
      if (target >= 2 * a) {
        CHECK_THROWS_AS(constant_mmd_gaussian_sweep(var, target, bw), InfeasibleError);
        continue;
      }
      const double g = constant_mmd_gaussian_sweep(var, target, bw);
      const double closed = std::sqrt(-2 * (bw * bw + 2 * var) * std::log(1 - target / (2 * a)));
      CHECK(g == Approx(closed).epsilon(1e-10));
      CHECK(gaussian_moment_oracle(var, var, g, bw).mmd2 == Approx(target).epsilon(1e-10));
    }
  }
  CHECK(constant_mmd_gaussian_sweep(1.0, 0.0, bw) == 0.0);
  CHECK_THROWS_AS(constant_mmd_gaussian_sweep(1.0, 5.0, bw), InfeasibleError);

  // At fixed MMD^2, NAMMD falls as the common variance grows (smaller mean-embedding norms).
  double prev = 2.0;
  for (double var : {0.1, 0.25, 0.5, 1.0, 1.5, 2.0}) {
    const double g = constant_mmd_gaussian_sweep(var, 0.15, bw);
    const auto mom = gaussian_moment_oracle(var, var, g, bw);
    const double nammd = mom.mmd2 / (4 - mom.norm_p - mom.norm_q);
    CHECK(nammd < prev);
    prev = nammd;
  }
}

TEST_CASE("blob and hdgm generators") {
  SECTION("reproducible and shaped") {
    Rng a(7), b(7);
    const auto [x1, y1] = blob_pair(BlobConfig{}, MixtureMode::alternative, 40, a);
    const auto [x2, y2] = blob_pair(BlobConfig{}, MixtureMode::alternative, 40, b);
    CHECK(x1.rows() == x2.rows());
    CHECK(y1.rows() == y2.rows());
    CHECK(x1.dimension() == 2);
    Rng c(8);
    const auto [hx, hy] = hdgm_pair(HdgmConfig{}, MixtureMode::null, 30, c);
    CHECK(hx.dimension() == 10);
    CHECK(hy.size() == 30);
  }
  SECTION("alternative blobs are correlated within cells") {
    Rng rng(9);
    const auto [x, y] = blob_pair(BlobConfig{}, MixtureMode::alternative, 20000, rng);
    auto within_corr = [](const Sample& s) {
      // Offsets from the nearest cell centre.
      Matrix r = s.rows();
      for (Index i = 0; i < r.rows(); ++i)
        for (Index k = 0; k < 2; ++k) r(i, k) -= 5.0 * std::round(r(i, k) / 5.0);
      const Eigen::RowVector2d mu = r.colwise().mean();
      const Matrix c = r.rowwise() - mu;
      const Matrix cov = c.transpose() * c / static_cast<double>(r.rows() - 1);
      return cov(0, 1) / std::sqrt(cov(0, 0) * cov(1, 1));
    };
    CHECK(std::abs(within_corr(x)) < 0.05);
    CHECK(within_corr(y) > 0.45);
  }
  SECTION("hdgm mean shift") {
    Rng rng(10);
    const auto [x, y] = hdgm_pair(HdgmConfig{}, MixtureMode::alternative, 20000, rng);
    const Vector diff = (y.rows().colwise().mean() - x.rows().colwise().mean()).transpose();
    CHECK(diff[0] == Approx(0.5).margin(0.05));
    CHECK(diff[1] == Approx(0.5).margin(0.05));
    CHECK(std::abs(diff[5]) < 0.05);
  }
  SECTION("validation") {
    Rng rng(1);
    CHECK_THROWS_AS(blob_pair(BlobConfig{0}, MixtureMode::null, 10, rng), ConfigError);
    HdgmConfig h;
    h.shifted_coordinates = 11;
    CHECK_THROWS_AS(hdgm_pair(h, MixtureMode::null, 10, rng), ConfigError);
  }
}

TEST_CASE("sample_discrete_summary matches an explicit sample") {
  Rng rng(11);
  const Matrix support = integer_support(6);
  const auto pair = uniform_with_tv(support, 0.5, rng);
  const Matrix G = gram_matrix(KernelSpec::gaussian(1.0), support);
  Rng a(12), b(12);
  const GramSummary s = sample_discrete_summary(pair, G, 1.0, 30, a);
  const auto xi = categorical_draws(std::span<const double>(pair.p().data(), 6), 30, b);
  const auto yi = categorical_draws(std::span<const double>(pair.q().data(), 6), 30, b);
  const GramSummary t = summarize_indexed(G, 1.0, xi, yi);
  CHECK(mmd2_u_statistic(s) == Approx(mmd2_u_statistic(t)).epsilon(1e-12));
  CHECK_THROWS_AS(sample_discrete_summary(pair, Matrix::Identity(3, 3), 1.0, 30, a), InputError);
}

TEST_CASE("labeled csv round trip") {
  Rng rng(13);
  const Sample x = testing::gaussian_sample(4, 3, rng), y = testing::gaussian_sample(4, 3, rng, 2.0);
  const auto path = (std::filesystem::temp_directory_path() / "nammd_synth_roundtrip.csv").string();
  write_labeled_csv(path, x, y);
  std::ifstream in(path);
  std::string line;
  std::getline(in, line);
  CHECK(line == "x1,x2,x3,label");
  Matrix back(8, 4);
  for (Index i = 0; i < 8; ++i) {
    std::getline(in, line);
    std::stringstream ss(line);
    std::string cell;
    for (Index k = 0; k < 4; ++k) {
      std::getline(ss, cell, ',');
      back(i, k) = std::stod(cell);
    }
  }
  CHECK(back.topLeftCorner(4, 3) == x.rows());
  CHECK(back.bottomLeftCorner(4, 3) == y.rows());
  CHECK(back.col(3).head(4).isZero());
  CHECK(back.col(3).tail(4).isOnes());
  std::remove(path.c_str());
  CHECK_THROWS_AS(write_labeled_csv("/nonexistent-dir/x.csv", x, y), IoError);
}
