#include "nammd/error.hpp"
#include "nammd/tst.hpp"
#include "support.hpp"

#include <catch_amalgamated.hpp>

#include <algorithm>
#include <numeric>
#include <vector>

using namespace nammd;
using Catch::Approx;

namespace {

std::vector<Index> iota_perm(Index n) {
  std::vector<Index> p(static_cast<std::size_t>(n));
  std::iota(p.begin(), p.end(), Index{0});
  return p;
}

std::pair<Sample, Sample> split(const Sample& pooled, const std::vector<Index>& perm) {
  const auto m = perm.size() / 2;
  std::vector<Index> a(perm.begin(), perm.begin() + static_cast<std::ptrdiff_t>(m));
  std::vector<Index> b(perm.begin() + static_cast<std::ptrdiff_t>(m), perm.end());
  return {pooled.select(a), pooled.select(b)};
}

}  // namespace

TEST_CASE("is_permutation") {
  CHECK(is_permutation(std::vector<Index>{2, 0, 1}, 3));
  CHECK_FALSE(is_permutation(std::vector<Index>{0, 0, 1}, 3));
  CHECK_FALSE(is_permutation(std::vector<Index>{0, 1, 3}, 3));
  CHECK_FALSE(is_permutation(std::vector<Index>{0, 1}, 3));
}

TEST_CASE("permuted statistic equals recomputation on the split") {
  Rng rng(1);
  const auto spec = KernelSpec::gaussian(0.9);
  for (Index m : {3, 5, 8}) {
    const Sample x = testing::gaussian_sample(m, 2, rng);
    const Sample y = testing::gaussian_sample(m, 2, rng, 0.5);
    const Sample pooled = Sample::concat(x, y);

    auto perm = iota_perm(2 * m);
    const auto g0 = gram_blocks(spec, x, y);
    CHECK(permuted_statistic(pooled, perm, spec, StatisticKind::nammd) ==
          Approx(testing::loop_mmd2(g0) / testing::loop_norm(g0)).margin(1e-12));

    // Swapping the halves leaves MMD^2 unchanged.
    std::vector<Index> swapped(perm.begin() + m, perm.end());
    swapped.insert(swapped.end(), perm.begin(), perm.begin() + m);
    CHECK(permuted_statistic(pooled, swapped, spec, StatisticKind::mmd2) ==
          Approx(testing::loop_mmd2(g0)).margin(1e-12));

    for (int t = 0; t < 20; ++t) {
      std::shuffle(perm.begin(), perm.end(), rng);
      const auto [a, b] = split(pooled, perm);
      const auto g = gram_blocks(spec, a, b);
      REQUIRE(permuted_statistic(pooled, perm, spec, StatisticKind::mmd2) ==
              Approx(testing::loop_mmd2(g)).margin(1e-12));
      REQUIRE(permuted_statistic(pooled, perm, spec, StatisticKind::nammd) ==
              Approx(testing::loop_mmd2(g) / testing::loop_norm(g)).margin(1e-12));
    }
  }
  const Sample odd = testing::column({0, 1, 2});
  CHECK_THROWS_AS(permuted_statistic(odd, iota_perm(3), spec, StatisticKind::mmd2), InputError);
  const Sample four = testing::column({0, 1, 2, 3});
  CHECK_THROWS_AS(permuted_statistic(four, std::vector<Index>{0, 1, 1, 2}, spec, StatisticKind::mmd2), InputError);
}

TEST_CASE("point mass pair is never rejected") {
  const Sample x(Matrix::Constant(10, 2, 0.5));
  const auto out = permutation_test(x, x, KernelSpec::gaussian(1.0), StatisticKind::nammd, 0.05, {100, 3});
  CHECK(out.statistic == 0.0);
  CHECK(*out.p_value == 1.0);
  CHECK_FALSE(out.reject);
}

TEST_CASE("well separated samples reject with the smallest p-value") {
  Rng rng(2);
  const Sample x = testing::gaussian_sample(30, 1, rng, 0.0, 0.1);
  const Sample y = testing::gaussian_sample(30, 1, rng, 5.0, 0.1);
  const auto both = paired_permutation_test(x, y, KernelSpec::gaussian(1.0), 0.05, {99, 11});
  CHECK(both.nammd.reject);
  CHECK(both.mmd2.reject);
  CHECK(*both.nammd.p_value == Approx(0.01));
  CHECK(both.nammd.method == "nammd_tst");
  CHECK(both.mmd2.method == "mmd_tst");
  CHECK(both.nammd.seed == std::optional<std::uint64_t>(11));
}

TEST_CASE("permutation tests are deterministic in the seed") {
  Rng rng(3);
  const Sample x = testing::gaussian_sample(20, 2, rng);
  const Sample y = testing::gaussian_sample(20, 2, rng, 0.3);
  const auto spec = KernelSpec::laplace(1.0);
  const auto a = permutation_test(x, y, spec, StatisticKind::mmd2, 0.05, {150, 5});
  const auto b = permutation_test(x, y, spec, StatisticKind::mmd2, 0.05, {150, 5});
  CHECK(*a.p_value == *b.p_value);
  CHECK(a.threshold == b.threshold);
  const auto both = paired_permutation_test(x, y, spec, 0.05, {150, 5});
  CHECK(*both.mmd2.p_value == *a.p_value);
  CHECK(permutation_test(x, y, spec, StatisticKind::nammd, 0.05, {150, 5}).threshold == both.nammd.threshold);
}

TEST_CASE("nammd statistic is mmd2 over the norm estimate") {
  Rng rng(4);
  const Sample x = testing::gaussian_sample(15, 3, rng);
  const Sample y = testing::gaussian_sample(15, 3, rng, 0.2);
  const auto spec = KernelSpec::gaussian(1.5);
  const auto both = paired_permutation_test(x, y, spec, 0.05, {10, 1});
  CHECK(both.nammd.statistic == Approx(both.mmd2.statistic / norm_u_statistic(gram_blocks(spec, x, y))));
}

TEST_CASE("fuse statistic") {
  Rng rng(5);
  const Sample x = testing::gaussian_sample(12, 2, rng);
  const Sample y = testing::gaussian_sample(12, 2, rng, 0.4);
  const auto k1 = KernelSpec::gaussian(0.7), k2 = KernelSpec::gaussian(2.0);
  auto term = [&](const KernelSpec& k) {
    const auto g = gram_blocks(k, x, y);
    double sq = 0;
    for (Index i = 0; i < 12; ++i)
      for (Index j = 0; j < 12; ++j)
        if (i != j) sq += g.kxx(i, j) * g.kxx(i, j) + g.kyy(i, j) * g.kyy(i, j);
    return testing::loop_mmd2(g) / testing::loop_norm(g) / std::sqrt(sq / (12.0 * 11.0));
  };

  SECTION("normalizer") {
    const auto g = gram_blocks(k1, x, y);
    const double sq = (g.kxx.squaredNorm() - 12 + g.kyy.squaredNorm() - 12) / (12.0 * 11.0);
    CHECK(fuse_normalizer(k1, x, y) == Approx(sq).epsilon(1e-12));
  }
  SECTION("single kernel reduces to the normalized ratio") {
    for (double lambda : {0.5, 1.0, 30.0})
      CHECK(fuse_statistic(x, y, KernelBank::uniform({k1}, lambda)) == Approx(term(k1)).epsilon(1e-12));
  }
  SECTION("two kernels by hand") {
    const double a = term(k1), b = term(k2);
    for (double lambda : {0.3, 1.0, 4.0}) {
      const double expected = std::log(0.25 * std::exp(lambda * a) + 0.75 * std::exp(lambda * b)) / lambda;
      CHECK(fuse_statistic(x, y, KernelBank({k1, k2}, Vector{{0.25, 0.75}}, lambda)) ==
            Approx(expected).epsilon(1e-12));
    }
    CHECK(fuse_statistic(x, y, KernelBank::uniform({k1, k2}, 1e6)) == Approx(std::max(a, b)).epsilon(1e-5));
  }
  SECTION("bank validation") {
    CHECK_THROWS_AS(KernelBank({k1}, Vector{{0.5}}, 1.0), ConfigError);
    CHECK_THROWS_AS(KernelBank({k1}, Vector{{1.0}}, 0.0), ConfigError);
    CHECK_THROWS_AS(KernelBank::uniform({}), ConfigError);
    CHECK(gaussian_bank(x, y, 2).kernels().size() == 5);
    CHECK(gaussian_bank(x, y, 1).kernels()[2].bandwidth() == Approx(2 * median_heuristic(x, y)));
  }
  SECTION("fuse permutation test uses the identity split for the observed value") {
    const auto bank = KernelBank::uniform({k1, k2});
    const auto out = permutation_test(x, y, bank, 0.05, {50, 2});
    CHECK(out.statistic == Approx(fuse_statistic(x, y, bank)).epsilon(1e-12));
    CHECK(out.method == "nammd_fuse_tst");
    CHECK(permuted_statistic(Sample::concat(x, y), iota_perm(24), bank) == Approx(out.statistic).epsilon(1e-12));
  }
}

// The within-sample normalizer depends on how the pooled points are split, so it has
// to be recomputed for every permutation.
TEST_CASE("fuse normalizer is not permutation invariant") {
  Rng rng(6);
  const Sample x = testing::gaussian_sample(10, 1, rng, 0.0, 0.2);
  const Sample y = testing::gaussian_sample(10, 1, rng, 0.0, 3.0);
  const auto spec = KernelSpec::gaussian(1.0);
  const Sample pooled = Sample::concat(x, y);
  auto perm = iota_perm(20);
  std::shuffle(perm.begin(), perm.end(), rng);
  const auto [a, b] = split(pooled, perm);
  CHECK(std::abs(fuse_normalizer(spec, x, y) - fuse_normalizer(spec, a, b)) > 1e-3);
}

TEST_CASE("permutation test argument checks") {
  Rng rng(7);
  const Sample x = testing::gaussian_sample(10, 1, rng);
  const Sample y = testing::gaussian_sample(11, 1, rng);
  const auto spec = KernelSpec::gaussian(1.0);
  CHECK_THROWS_AS(permutation_test(x, y, spec, StatisticKind::mmd2, 0.05, {}), InputError);
  CHECK_THROWS_AS(permutation_test(x, x, spec, StatisticKind::mmd2, 0.05, {0, 1}), ConfigError);
  CHECK_THROWS_AS(permutation_test(x, x, spec, StatisticKind::fuse, 0.05, {}), ConfigError);
  CHECK(statistic_kind_from_string("mmd") == StatisticKind::mmd2);
  CHECK_THROWS_AS(statistic_kind_from_string("energy"), ConfigError);
}
