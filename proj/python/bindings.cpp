#include "nammd/dct.hpp"
#include "nammd/error.hpp"
#include "nammd/estimators.hpp"
#include "nammd/harness.hpp"
#include "nammd/kernels.hpp"
#include "nammd/kernelsel.hpp"
#include "nammd/synthesis.hpp"
#include "nammd/tst.hpp"

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

namespace py = pybind11;
using namespace nammd;

namespace {

Sample as_sample(const Matrix& a) { return Sample(a); }

py::dict outcome_dict(const TestOutcome& t) {
  py::dict d;
  d["method"] = t.method;
  d["statistic"] = t.statistic;
  d["threshold"] = t.threshold;
  d["p_value"] = t.p_value ? py::cast(*t.p_value) : py::none();
  d["reject"] = t.reject;
  d["alpha"] = t.alpha;
  d["epsilon"] = t.epsilon;
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, mod) {
  mod.doc() = "NAMMD closeness and two-sample tests";

  auto base = py::register_exception<Error>(mod, "NammdError", PyExc_RuntimeError);
  py::register_exception<InputError>(mod, "InputError", base.ptr());
  py::register_exception<ConfigError>(mod, "ConfigError", base.ptr());
  py::register_exception<InfeasibleError>(mod, "InfeasibleError", base.ptr());
  py::register_exception<IoError>(mod, "IoError", base.ptr());

  py::class_<KernelSpec>(mod, "Kernel")
      .def_static("gaussian", &KernelSpec::gaussian, py::arg("bandwidth"))
      .def_static("laplace", &KernelSpec::laplace, py::arg("bandwidth"))
      .def_static("mahalanobis", &KernelSpec::mahalanobis, py::arg("metric"), py::arg("bandwidth") = 1.0)
      .def_property_readonly("family", [](const KernelSpec& k) { return std::string(to_string(k.family())); })
      .def_property_readonly("bandwidth", &KernelSpec::bandwidth)
      .def("__repr__", [](const KernelSpec& k) {
        return "Kernel(" + std::string(to_string(k.family())) + ", bandwidth=" + std::to_string(k.bandwidth()) + ")";
      });

  mod.def("median_heuristic", [](const Matrix& x, const Matrix& y) { return median_heuristic(as_sample(x), as_sample(y)); },
          py::arg("x"), py::arg("y"));
  mod.def("gram_matrix", &gram_matrix, py::arg("kernel"), py::arg("points"));
  mod.def("cross_gram", &cross_gram, py::arg("kernel"), py::arg("a"), py::arg("b"));

  mod.def(
      "estimate",
      [](const Matrix& x, const Matrix& y, const KernelSpec& k) {
        const auto r = estimator_report(gram_blocks(k, as_sample(x), as_sample(y)));
        py::dict d;
        d["mmd2"] = r.mmd2_hat;
        d["norm"] = r.norm_hat;
        d["nammd"] = r.nammd_hat;
        d["zeta1"] = r.zeta1;
        d["zeta2"] = r.zeta2;
        d["sigma"] = r.sigma_hat;
        return d;
      },
      py::arg("x"), py::arg("y"), py::arg("kernel"));

  mod.def(
      "nammd_dct",
      [](const Matrix& x, const Matrix& y, const KernelSpec& k, double epsilon, double alpha) {
        return outcome_dict(nammd_dct(as_sample(x), as_sample(y), k, epsilon, alpha));
      },
      py::arg("x"), py::arg("y"), py::arg("kernel"), py::arg("epsilon"), py::arg("alpha") = 0.05);
  mod.def(
      "mmd_dct",
      [](const Matrix& x, const Matrix& y, const KernelSpec& k, double epsilon, double alpha) {
        return outcome_dict(mmd_dct(as_sample(x), as_sample(y), k, epsilon, alpha));
      },
      py::arg("x"), py::arg("y"), py::arg("kernel"), py::arg("epsilon"), py::arg("alpha") = 0.05);

  mod.def(
      "permutation_test",
      [](const Matrix& x, const Matrix& y, const KernelSpec& k, const std::string& statistic, double alpha,
         int permutations, std::uint64_t seed) {
        const PermutationPlan plan{permutations, seed};
        const Sample sx = as_sample(x), sy = as_sample(y);
        const auto kind = statistic_kind_from_string(statistic);
        if (kind == StatisticKind::fuse) throw ConfigError("use fuse_test for the fuse statistic");
        return outcome_dict(permutation_test(sx, sy, k, kind, alpha, plan));
      },
      py::arg("x"), py::arg("y"), py::arg("kernel"), py::arg("statistic") = "nammd", py::arg("alpha") = 0.05,
      py::arg("permutations") = 200, py::arg("seed") = 0);
  mod.def(
      "fuse_test",
      [](const Matrix& x, const Matrix& y, int half_width, double lambda, double alpha, int permutations,
         std::uint64_t seed) {
        const Sample sx = as_sample(x), sy = as_sample(y);
        const auto bank = gaussian_bank(sx, sy, half_width, lambda);
        return outcome_dict(permutation_test(sx, sy, bank, alpha, PermutationPlan{permutations, seed}));
      },
      py::arg("x"), py::arg("y"), py::arg("half_width") = 2, py::arg("lambda_") = 1.0, py::arg("alpha") = 0.05,
      py::arg("permutations") = 200, py::arg("seed") = 0);

  mod.def(
      "select_kernel",
      [](const Matrix& x, const Matrix& y, const KernelSpec& init, double learning_rate, int iterations) {
        const auto s = select_kernel(as_sample(x), as_sample(y), init, OptimizerConfig{learning_rate, iterations});
        return py::make_tuple(s.spec, s.final_t);
      },
      py::arg("x"), py::arg("y"), py::arg("init"), py::arg("learning_rate") = 0.05, py::arg("iterations") = 100);

  mod.def(
      "uniform_with_tv",
      [](Index n, double eps, std::uint64_t seed) {
        Rng rng(seed);
        const auto pair = uniform_with_tv(integer_support(n), eps, rng);
        return py::make_tuple(pair.support(), pair.p(), pair.q());
      },
      py::arg("n"), py::arg("epsilon"), py::arg("seed") = 0);
  mod.def("tv_distance", &tv_distance, py::arg("p"), py::arg("q"));
  mod.def(
      "exact_nammd",
      [](const Matrix& support, const Vector& p, const Vector& q, const KernelSpec& k) {
        const DiscretePair pair(support, p, q);
        return exact_discrete_nammd(pair, gram_matrix(k, support), 1.0);
      },
      py::arg("support"), py::arg("p"), py::arg("q"), py::arg("kernel"));

  mod.def(
      "run_experiment",
      [](const std::string& config_json) {
        const auto cfg = parse_config(config_json);
        validate(cfg);
        std::vector<ResultRow> rows;
        {
          py::gil_scoped_release release;
          rows = run_experiment(cfg);
        }
        return format_results(rows, OutputFormat::json);
      },
      py::arg("config_json"));
}
