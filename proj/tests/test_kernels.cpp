#include "nammd/error.hpp"
#include "nammd/kernels.hpp"
#include "support.hpp"

#include <catch_amalgamated.hpp>

#include <algorithm>
#include <vector>

using namespace nammd;
using Catch::Approx;

namespace {
const double kUnitGamma = 1.0 / std::sqrt(2.0);  // exp(-|x - y|^2)

double pt(std::initializer_list<double> v, const KernelSpec& s, std::initializer_list<double> w) {
  std::vector<double> a(v), b(w);
  return eval_kernel(s, a, b);
}
}  // namespace

TEST_CASE("eval_kernel closed-form values") {
  CHECK(pt({0.0}, KernelSpec::gaussian(kUnitGamma), {0.0}) == 1.0);
  CHECK(pt({1.0}, KernelSpec::laplace(1.0), {0.0}) == Approx(std::exp(-1.0)).epsilon(1e-14));
  CHECK(pt({1.0, 0.0}, KernelSpec::gaussian(kUnitGamma), {0.0, 0.0}) == Approx(std::exp(-1.0)).epsilon(1e-14));
  // L1, not L2, for laplace
  CHECK(pt({1.0, 1.0}, KernelSpec::laplace(2.0), {0.0, 0.0}) == Approx(std::exp(-1.0)).epsilon(1e-14));
}

TEST_CASE("eval_kernel rejects bad input") {
  const auto g = KernelSpec::gaussian(1.0);
  std::vector<double> a{0.0, 1.0}, b{0.0};
  CHECK_THROWS_AS(eval_kernel(g, a, b), InputError);
  std::vector<double> c{0.0, std::nan("")};
  CHECK_THROWS_AS(eval_kernel(g, a, c), InputError);
  CHECK_THROWS_AS(KernelSpec::gaussian(0.0), InputError);
  CHECK_THROWS_AS(KernelSpec::laplace(-1.0), InputError);
}

TEST_CASE("mahalanobis metric validation") {
  Matrix asym(2, 2);
  asym << 1.0, 0.5, 0.0, 1.0;
  CHECK_THROWS_AS(KernelSpec::mahalanobis(asym, 1.0), InputError);
  Matrix indefinite(2, 2);
  indefinite << 1.0, 2.0, 2.0, 1.0;
  CHECK_THROWS_AS(KernelSpec::mahalanobis(indefinite, 1.0), InputError);
}

TEST_CASE("kernel families are symmetric, bounded and equal K on the diagonal") {
  Rng rng(11);
  std::normal_distribution<double> n(0.0, 3.0);
  Matrix metric(3, 3);
  metric << 2.0, 0.3, 0.0, 0.3, 1.0, 0.1, 0.0, 0.1, 0.5;
  const std::vector<KernelSpec> specs = {KernelSpec::gaussian(0.7), KernelSpec::laplace(1.3),
                                         KernelSpec::mahalanobis(metric, 0.9)};
  for (const auto& s : specs) {
    for (int t = 0; t < 20000; ++t) {
      std::vector<double> x{n(rng), n(rng), n(rng)}, y{n(rng), n(rng), n(rng)};
      const double kxy = eval_kernel(s, x, y);
      REQUIRE(kxy >= 0.0);
      REQUIRE(kxy <= s.upper_bound());
      REQUIRE(kxy == eval_kernel(s, y, x));
      REQUIRE(eval_kernel(s, x, x) == s.upper_bound());
    }
  }
}

TEST_CASE("mahalanobis with identity metric reduces to gaussian") {
  Rng rng(3);
  const Sample x = testing::gaussian_sample(20, 4, rng);
  const Sample y = testing::gaussian_sample(20, 4, rng, 0.5);
  const auto g = gram_blocks(KernelSpec::gaussian(1.7), x, y);
  const auto h = gram_blocks(KernelSpec::mahalanobis(Matrix::Identity(4, 4), 1.7), x, y);
  CHECK((g.kxx - h.kxx).cwiseAbs().maxCoeff() < 1e-12);
  CHECK((g.kxy - h.kxy).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("mahalanobis matches the quadratic form") {
  Matrix metric(2, 2);
  metric << 2.0, 0.5, 0.5, 1.0;
  const auto s = KernelSpec::mahalanobis(metric, 1.5);
  std::vector<double> x{0.3, -1.0}, y{1.1, 0.4};
  const double d0 = x[0] - y[0], d1 = x[1] - y[1];
  const double q = metric(0, 0) * d0 * d0 + 2 * metric(0, 1) * d0 * d1 + metric(1, 1) * d1 * d1;
  CHECK(eval_kernel(s, x, y) == Approx(std::exp(-q / (2 * 1.5 * 1.5))).epsilon(1e-13));
}

TEST_CASE("gram_blocks") {
  SECTION("two points") {
    const auto x = testing::column({0.0, 1.0});
    const auto g = gram_blocks(KernelSpec::gaussian(kUnitGamma), x, x);
    CHECK(g.kxx(0, 1) == Approx(std::exp(-1.0)).epsilon(1e-14));
    CHECK(g.kxx == g.kyy);
    CHECK(g.kxx == g.kxy);
    CHECK(g.upper_bound == 1.0);
  }
  SECTION("entrywise against eval_kernel") {
    Rng rng(5);
    const Sample x = testing::gaussian_sample(3, 2, rng);
    const Sample y = testing::gaussian_sample(3, 2, rng);
    const auto s = KernelSpec::laplace(0.8);
    const auto g = gram_blocks(s, x, y);
    for (Index i = 0; i < 3; ++i)
      for (Index j = 0; j < 3; ++j) {
        CHECK(g.kxx(i, j) == Approx(eval_kernel(s, x.point(i), x.point(j))).epsilon(1e-15));
        CHECK(g.kyy(i, j) == Approx(eval_kernel(s, y.point(i), y.point(j))).epsilon(1e-15));
        CHECK(g.kxy(i, j) == Approx(eval_kernel(s, x.point(i), y.point(j))).epsilon(1e-15));
      }
  }
  SECTION("size and dimension mismatch") {
    Rng rng(1);
    const auto s = KernelSpec::gaussian(1.0);
    CHECK_THROWS_AS(gram_blocks(s, testing::gaussian_sample(3, 2, rng), testing::gaussian_sample(4, 2, rng)),
                    InputError);
    CHECK_THROWS_AS(gram_blocks(s, testing::gaussian_sample(3, 2, rng), testing::gaussian_sample(3, 1, rng)),
                    InputError);
  }
}

TEST_CASE("median heuristic") {
  CHECK(median_heuristic(testing::column({0.0, 2.0}).rows()) == 2.0);
  CHECK(median_heuristic(testing::column({0.0, 1.0, 3.0}).rows()) == 2.0);
  CHECK_THROWS_AS(median_heuristic(testing::column({1.0, 1.0, 1.0}).rows()), DegenerateInputError);

  Rng rng(9);
  const Sample x = testing::gaussian_sample(50, 3, rng);
  const Sample y = testing::gaussian_sample(50, 3, rng, 1.0);
  const Sample pooled = Sample::concat(x, y);
  std::vector<double> d;
  for (Index i = 0; i < pooled.size(); ++i)
    for (Index j = i + 1; j < pooled.size(); ++j) d.push_back((pooled.rows().row(i) - pooled.rows().row(j)).norm());
  std::sort(d.begin(), d.end());
  const double expected = 0.5 * (d[d.size() / 2 - 1] + d[d.size() / 2]);  // even count
  CHECK(median_heuristic(x, y) == Approx(expected).epsilon(1e-14));
}

TEST_CASE("Sample invariants") {
  CHECK_THROWS_AS(Sample(Matrix::Zero(1, 2)), InputError);
  Matrix bad = Matrix::Zero(3, 1);
  bad(1, 0) = std::numeric_limits<double>::infinity();
  CHECK_THROWS_AS(Sample(bad), InputError);
}
