#include "nammd/error.hpp"
#include "nammd/harness.hpp"
#include "support.hpp"

#include <catch_amalgamated.hpp>
#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <sstream>

using namespace nammd;
using Catch::Approx;

namespace {

std::string temp_file(const std::string& name, const std::string& content) {
  const auto path = (std::filesystem::temp_directory_path() / ("nammd_harness_" + name)).string();
  std::ofstream(path) << content;
  return path;
}

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("parse_config") {
  SECTION("defaults and overrides") {
    const auto cfg = parse_config(R"({"experiment": "power_tst", "sample_size": 64, "alpha": 0.1,
      "kernel": {"family": "laplace", "bandwidth": "median", "select": true},
      "dataset": {"name": "hdgm", "dimension": 4, "shifted_coordinates": 1}, "methods": ["nammd"],
      "seed": 9, "format": "json"})");
    CHECK(cfg.kind == ExperimentKind::power_tst);
    CHECK(cfg.sample_sizes == std::vector<Index>{64});
    CHECK(cfg.alpha == 0.1);
    CHECK(cfg.kernel.family == KernelFamily::laplace);
    CHECK_FALSE(cfg.kernel.bandwidth.has_value());
    CHECK(cfg.kernel.select);
    CHECK(cfg.dataset.hdgm.dimension == 4);
    CHECK(cfg.seed == 9);
    CHECK(cfg.format == OutputFormat::json);
    CHECK(cfg.repetitions == 100);
    CHECK_NOTHROW(validate(cfg));
  }
  SECTION("errors") {
    CHECK_THROWS_AS(parse_config("{"), ConfigError);
    CHECK_THROWS_AS(parse_config(R"({"repetitons": 3})"), ConfigError);
    CHECK_THROWS_AS(parse_config(R"({"kernel": {"width": 1}})"), ConfigError);
    CHECK_THROWS_AS(parse_config(R"({"alpha": "small"})"), ConfigError);
    CHECK_THROWS_AS(parse_config(R"({"experiment": "bogus"})"), ConfigError);
    CHECK_THROWS_AS(parse_config(R"({"format": "xml"})"), ConfigError);
    CHECK_THROWS_AS(parse_config(R"({"kernel": {"bandwidth": "wide"}})"), ConfigError);
    CHECK_THROWS_AS(load_config("/nonexistent/config.json"), ConfigError);
  }
  SECTION("validation") {
    auto bad = [](const char* text) { return [=] { validate(parse_config(text)); }; };
    CHECK_THROWS_AS(bad(R"({"repetitions": 0})")(), ConfigError);
    CHECK_THROWS_AS(bad(R"({"sample_size": 3})")(), ConfigError);
    CHECK_THROWS_AS(bad(R"({"alpha": 1.5})")(), ConfigError);
    CHECK_THROWS_AS(bad(R"({"canonne_resamples": 50})")(), ConfigError);
    CHECK_THROWS_AS(bad(R"({"methods": ["canonne"]})")(), ConfigError);
    CHECK_THROWS_AS(bad(R"({"experiment": "type1_dct"})")(), ConfigError);  // blob is not a DCT dataset
    CHECK_THROWS_AS(bad(R"({"experiment": "type1_dct", "dataset": {"name": "learned"}, "epsilons": [0]})")(),
                    ConfigError);
    CHECK_THROWS_AS(bad(R"({"dataset": {"name": "csv"}})")(), ConfigError);
    CHECK_THROWS_AS(bad(R"({"kernel": {"bandwidth": -1}})")(), ConfigError);
    CHECK_THROWS_AS(bad(R"({"threads": 0})")(), ConfigError);
  }
}

TEST_CASE("load_csv") {
  SECTION("header and numbers") {
    const auto p = temp_file("a.csv", "a,b\n1,2\n 3.5 , -4e-1\n\n5,6\n");
    const Sample s = load_csv(p);
    CHECK(s.size() == 3);
    CHECK(s.dimension() == 2);
    CHECK(s.rows()(1, 1) == -0.4);
  }
  SECTION("no header") { CHECK(load_csv(temp_file("b.csv", "1\n2\n3\n")).size() == 3); }
  SECTION("ragged rows name the line") {
    const auto p = temp_file("c.csv", "1,2\n3,4\n5\n");
    CHECK_THROWS_WITH(load_csv(p), Catch::Matchers::ContainsSubstring(":3:"));
  }
  SECTION("bad cells") {
    CHECK_THROWS_AS(load_csv(temp_file("d.csv", "1,2\n3,x\n")), InputError);
    CHECK_THROWS_AS(load_csv(temp_file("e.csv", "1,2\n3,nan\n")), InputError);
    CHECK_THROWS_AS(load_csv(temp_file("f.csv", "x,y\n")), InputError);
    CHECK_THROWS_AS(load_csv(temp_file("g.csv", "1,2\n")), InputError);  // a Sample needs 2 rows
    CHECK_THROWS_AS(load_csv("/nonexistent/file.csv"), IoError);
  }
  SECTION("labeled") {
    const auto [x, y] = load_labeled_csv(temp_file("h.csv", "x1,label\n1,0\n2,1\n3,0\n4,1\n"));
    CHECK(x.rows()(1, 0) == 3.0);
    CHECK(y.rows()(0, 0) == 2.0);
    CHECK_THROWS_AS(load_labeled_csv(temp_file("i.csv", "1,0\n2,2\n3,0\n4,1\n")), InputError);
  }
}

TEST_CASE("format and emit results") {
  ResultRow r;
  r.experiment = "type1_tst";
  r.method = "nammd";
  r.dataset = "blob";
  r.setting = "null, \"quoted\"";
  r.sample_size = 50;
  r.alpha = 0.05;
  r.repetitions = 10;
  r.rejection_rate = 0.1;
  const std::vector<ResultRow> rows{r};

  const std::string csv = format_results(rows, OutputFormat::csv);
  std::istringstream in(csv);
  std::string header, line;
  std::getline(in, header);
  std::getline(in, line);
  CHECK(header.rfind("experiment,method,dataset,setting,sample_size", 0) == 0);
  CHECK(line.find("\"null, \"\"quoted\"\"\"") != std::string::npos);
  CHECK(line.find(",0.1,") != std::string::npos);
  CHECK(header.find("wall_seconds") == std::string::npos);
  CHECK(format_results(rows, OutputFormat::csv, true).find("wall_seconds") != std::string::npos);

  const auto doc = nlohmann::json::parse(format_results(rows, OutputFormat::json));
  REQUIRE(doc.is_array());
  CHECK(doc[0]["method"] == "nammd");
  CHECK(doc[0]["rejection_rate"] == 0.1);
  CHECK(doc[0]["epsilon"].is_null());

  const auto path = (std::filesystem::temp_directory_path() / "nammd_harness_out.json").string();
  emit_results(rows, OutputFormat::json, path);
  CHECK(slurp(path) == format_results(rows, OutputFormat::json));
  CHECK_THROWS_AS(emit_results(rows, OutputFormat::csv, "/nonexistent/dir/out.csv"), IoError);
}

TEST_CASE("experiments are deterministic across thread counts") {
  auto run = [](int threads) {
    ExperimentConfig cfg;
    cfg.kind = ExperimentKind::power_tst;
    cfg.repetitions = 6;
    cfg.sample_sizes = {20};
    cfg.permutations = 50;
    cfg.fuse_half_width = 1;
    cfg.seed = 77;
    cfg.threads = threads;
    return format_results(run_experiment(cfg), OutputFormat::csv);
  };
  const std::string one = run(1);
  CHECK(one == run(3));
  CHECK(one == run(1));
  CHECK(one.find(",error,") == std::string::npos);
}

TEST_CASE("every experiment kind runs at toy size") {
  ExperimentConfig cfg;
  cfg.repetitions = 3;
  cfg.sample_sizes = {16};
  cfg.permutations = 20;
  cfg.canonne_resamples = 100;
  cfg.seed = 5;

  SECTION("type1_dct") {
    cfg.kind = ExperimentKind::type1_dct;
    cfg.dataset.name = "learned";
    cfg.dataset.support_points = 8;
    cfg.epsilons = {0.3};
    const auto rows = run_experiment(cfg);
    REQUIRE(rows.size() == 2);
    for (const auto& r : rows) {
      CHECK(r.status == "ok");
      CHECK(r.epsilon.has_value());
      CHECK(r.rejection_rate.has_value());
    }
  }
  SECTION("power_dct") {
    cfg.kind = ExperimentKind::power_dct;
    cfg.dataset.name = "learned";
    cfg.dataset.support_points = 8;
    cfg.epsilons = {0.3};
    const auto rows = run_experiment(cfg);
    REQUIRE(rows.size() == 3);
    CHECK(rows[2].method == "mmd_only");
  }
  SECTION("closeness_sweep") {
    cfg.kind = ExperimentKind::closeness_sweep;
    cfg.dataset.name = "uniform_tv";
    cfg.dataset.support_size = 10;
    const auto rows = run_experiment(cfg);
    CHECK(rows.size() == 9);
    CHECK(rows[0].setting == "gap=0");
  }
  SECTION("oracle_check") {
    cfg.kind = ExperimentKind::oracle_check;
    cfg.sample_sizes = {200};
    const auto rows = run_experiment(cfg);
    REQUIRE(rows.size() == 15);
    CHECK(rows[0].setting == "var_0.01_1");
    CHECK(*rows[0].exact == Approx(0.980581).margin(1e-6));
    CHECK(!rows[4].exact.has_value());  // sigma2_m has no closed form here
  }
  SECTION("figure1_sweep") {
    cfg.kind = ExperimentKind::figure1_sweep;
    cfg.dataset.variances = {0.5, 1.0};
    const auto rows = run_experiment(cfg);
    REQUIRE(rows.size() == 4);
    CHECK(*rows[1].exact == Approx(0.15).epsilon(1e-9));
  }
  SECTION("csv dataset with a too small pool gives error rows") {
    cfg.kind = ExperimentKind::type1_tst;
    cfg.dataset.name = "csv";
    cfg.dataset.x_path = temp_file("pool.csv", "x1,label\n1,0\n2,1\n3,0\n4,1\n5,0\n6,1\n");
    const auto rows = run_experiment(cfg);
    REQUIRE(rows.size() == 3);
    for (const auto& r : rows) {
      CHECK(r.status == "error");
      CHECK(r.message.find("csv pool") != std::string::npos);
    }
  }
  SECTION("missing csv file is a runtime error") {
    cfg.dataset.name = "csv";
    cfg.dataset.x_path = "/nonexistent/pool.csv";
    CHECK_THROWS_AS(run_experiment(cfg), IoError);
  }
}
