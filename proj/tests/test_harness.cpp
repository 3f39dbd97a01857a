// mdeopt - multipopulation differential evolution for multimodal problems
// SPDX-License-Identifier: Apache-2.0

#include "mdeopt/harness.hpp"

#include <doctest.h>
#include <json.hpp>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

using namespace mdeopt;
namespace fs = std::filesystem;

namespace {

std::vector<std::string> lines_of(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream is(text);
  for (std::string line; std::getline(is, line);)
    out.push_back(line);
  return out;
}

/// Per-run CSV with the elapsed_seconds column removed.
std::string without_elapsed(const std::string& csv) {
  std::string out;
  for (const auto& line : lines_of(csv)) {
    std::size_t pos = 0;
    for (int field = 0; field < 3; ++field)
      pos = line.find(',', pos) + 1;
    const std::size_t end = line.find(',', pos);
    out += line.substr(0, pos) + line.substr(end + 1) + "\n";
  }
  return out;
}

/// Report JSON with every timing field removed.
nlohmann::json without_timing(nlohmann::json j) {
  for (auto& cell : j["cells"]) {
    for (auto& run : cell["runs"])
      run.erase("elapsed_seconds");
    if (cell["aggregates"].is_object())
      cell["aggregates"].erase("ET");
  }
  return j;
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

ExperimentConfig small_config(std::size_t runs = 6) {
  ExperimentConfig c;
  c.problems = {"B1"};
  c.run_count = runs;
  c.master_seed = 3;
  return c;
}

fs::path scratch_dir(const std::string& name) {
  const auto dir = fs::temp_directory_path() / ("mdeopt-test-" + name);
  fs::remove_all(dir);
  return dir;
}

} // namespace

TEST_CASE("parameter keys") {
  CHECK(canonical_param_key("NP") == "np");
  CHECK(canonical_param_key("Epsilon") == "eps");
  CHECK(canonical_param_key(" rho ") == "rho");
  CHECK_THROWS_AS(canonical_param_key("sigma"), ConfigError);
}

TEST_CASE("resolve_params") {
  const auto& b5 = get_problem("B5");
  const auto de = resolve_params(b5, {}, Algorithm::DE);
  CHECK(de.de.population_size == 30);
  CHECK(de.de.amplification == 0.8);
  CHECK_FALSE(de.dewi_tol.has_value());
  CHECK(resolve_params(b5, {}, Algorithm::DEwI).dewi_tol == 5e-4);

  const auto over = resolve_params(b5, {{"np", 12}, {"rho", 1.5}, {"tol", 1e-3}}, Algorithm::DEwI);
  CHECK(over.de.population_size == 12);
  CHECK(over.penalty.radius == 1.5);
  CHECK(*over.dewi_tol == 1e-3);
  CHECK_FALSE(resolve_params(b5, {{"tol", 1e-3}}, Algorithm::MdeItmf).dewi_tol.has_value());

  CHECK_THROWS_AS(resolve_params(b5, {{"np", 12.5}}, Algorithm::DE), ConfigError);
  CHECK_THROWS_AS(resolve_params(b5, {{"gmax", -1}}, Algorithm::DE), ConfigError);
}

TEST_CASE("config fields and validation") {
  ExperimentConfig c;
  CHECK(c.run_count == 100);
  CHECK_NOTHROW(c.validate());

  c.set("problem", "b4, Himmelblau");
  CHECK(c.problems == std::vector<std::string>{"B4", "B1"});
  c.set("problems", "all");
  CHECK(c.problems.size() == 10);
  c.set("algo", "dewi");
  CHECK(c.algorithms == std::vector<Algorithm>{Algorithm::DEwI});
  c.set("algo", "all");
  CHECK(c.algorithms.size() == 3);
  c.set("runs", "30");
  CHECK(c.run_count == 30);
  c.set("seed", "7");
  CHECK(c.master_seed == 7);
  c.set("parallel", "true");
  CHECK(c.parallel);
  c.set("F", "0.5");
  CHECK(c.overrides.at("f") == 0.5);

  CHECK_THROWS_AS(c.set("problem", "B42"), UnknownProblemError);
  CHECK_THROWS_AS(c.set("algo", "pso"), ConfigError);
  CHECK_THROWS_AS(c.set("runs", "-3"), ConfigError);
  CHECK_THROWS_AS(c.set("rho", "wide"), ConfigError);
  CHECK_THROWS_AS(c.set("bogus", "1"), ConfigError);

  ExperimentConfig bad = small_config();
  bad.run_count = 0;
  CHECK_THROWS_AS(bad.validate(), ConfigError);
  bad = small_config();
  bad.overrides["rho"] = -1.0;
  CHECK_THROWS_AS(bad.validate(), ConfigError);
  CHECK_THROWS_AS(run_experiment(bad), ConfigError);
  bad = small_config();
  bad.overrides["tol"] = 1e-6;
  CHECK_THROWS_AS(bad.validate(), ConfigError);
  bad = small_config();
  bad.subpop_threads = 2;
  CHECK_THROWS_AS(bad.validate(), ConfigError);
  bad.anchor_mode = AnchorMode::Synchronous;
  CHECK_NOTHROW(bad.validate());
}

TEST_CASE("config JSON round trip") {
  ExperimentConfig c = small_config();
  c.problems = {"B2", "B7"};
  c.algorithms = {Algorithm::MdeItmf, Algorithm::DE};
  c.overrides = {{"rho", 0.9}, {"np", 18}};
  c.anchor_mode = AnchorMode::Synchronous;
  c.subpop_threads = 2;
  c.trace = true;
  const std::string text = c.to_json();
  const ExperimentConfig back = ExperimentConfig::from_json(text);
  CHECK(back.to_json() == text);
  CHECK(back.problems == c.problems);
  CHECK(back.algorithms == c.algorithms);
  CHECK(back.overrides == c.overrides);
  CHECK(back.anchor_mode == AnchorMode::Synchronous);

  CHECK_THROWS_AS(ExperimentConfig::from_json("{"), ConfigError);
  CHECK_THROWS_AS(ExperimentConfig::from_json("[]"), ConfigError);
  CHECK_THROWS_AS(ExperimentConfig::from_json(R"({"params": {"np": "ten"}})"), ConfigError);
  CHECK_THROWS_AS(ExperimentConfig::from_json(R"({"colour": "red"})"), ConfigError);
  const auto single = ExperimentConfig::from_json(R"({"problem": "B3", "runs": 4})");
  CHECK(single.problems == std::vector<std::string>{"B3"});
  CHECK(single.run_count == 4);
}

TEST_CASE("run_experiment on Himmelblau with all three algorithms") {
  const auto report = run_experiment(small_config());
  REQUIRE(report.cells.size() == 3);
  CHECK(report.failed_runs() == 0);

  const auto& de = report.cells[0];
  CHECK(de.algorithm == Algorithm::DE);
  REQUIRE(de.runs.size() == 6);
  for (std::size_t r = 0; r < de.runs.size(); ++r) {
    CHECK(de.runs[r].seed == 3 + r);
    CHECK(de.runs[r].final_bests.size() == 4);
    CHECK(de.runs[r].generations_used.size() == 4);
  }

  for (const auto& cell : report.cells) {
    REQUIRE(cell.stats.has_value());
    CHECK((*cell.stats)[1].mean > 0.0);
  }
  CHECK((*report.cells[1].stats)[2].mean == 4.0);

  CHECK(lines_of(aggregates_csv(report)).size() == 1 + 3 * 3);
  const auto runs = lines_of(runs_csv(report));
  CHECK(runs.front() == "algorithm,problem,seed,elapsed_seconds,nfe,ngp,generations,best_points");
  CHECK(runs.size() == 1 + 18);
}

TEST_CASE("DE groups draw member m from stream m of the group seed") {
  ExperimentConfig c = small_config(2);
  c.algorithms = {Algorithm::DE};
  const auto report = run_experiment(c);
  const auto& b1 = get_problem("B1");
  for (std::size_t r = 0; r < 2; ++r) {
    for (std::size_t m = 0; m < 4; ++m) {
      Rng rng(derive_stream_seed(3 + r, m));
      const auto single = run_de(b1.objective, b1.bounds, b1.default_params.de, rng);
      CHECK(report.cells[0].runs[r].final_bests[m].coords == single.final_bests[0].coords);
    }
  }
}

TEST_CASE("a single run carries the raw record only") {
  const auto report = run_experiment(small_config(1));
  for (const auto& cell : report.cells) {
    CHECK_FALSE(cell.stats.has_value());
    CHECK(cell.runs.size() == 1);
  }
  CHECK(lines_of(aggregates_csv(report)).size() == 1);
  const auto j = nlohmann::json::parse(report_json(report));
  CHECK(j["cells"][0]["aggregates"].is_null());
}

TEST_CASE("determinism") {
  const ExperimentConfig c = small_config();
  const auto a = run_experiment(c);
  const auto b = run_experiment(c);
  CHECK(without_elapsed(runs_csv(a)) == without_elapsed(runs_csv(b)));
  CHECK(without_timing(nlohmann::json::parse(report_json(a))) ==
        without_timing(nlohmann::json::parse(report_json(b))));

  ExperimentConfig par = c;
  par.parallel = true;
  CHECK(without_elapsed(runs_csv(run_experiment(par))) == without_elapsed(runs_csv(a)));

  ExperimentConfig threaded = c;
  threaded.anchor_mode = AnchorMode::Synchronous;
  const auto sync1 = run_experiment(threaded);
  threaded.subpop_threads = 4;
  threaded.parallel = true;
  CHECK(without_elapsed(runs_csv(run_experiment(threaded))) == without_elapsed(runs_csv(sync1)));
}

TEST_CASE("the embedded config reproduces the runs") {
  ExperimentConfig c = small_config(4);
  c.problems = {"B6"};
  c.overrides["cr"] = 0.7;
  const auto first = run_experiment(c);
  const auto j = nlohmann::json::parse(report_json(first));
  const auto again = run_experiment(ExperimentConfig::from_json(j["config"].dump()));
  CHECK(without_elapsed(runs_csv(again)) == without_elapsed(runs_csv(first)));
}

TEST_CASE("report JSON content") {
  ExperimentConfig c = small_config(3);
  c.algorithms = {Algorithm::MdeItmf};
  const auto j = nlohmann::json::parse(report_json(run_experiment(c)));
  const auto& cell = j["cells"][0];
  CHECK(cell["problem"] == "B1");
  CHECK(cell["formula"] == get_problem("B1").formula);
  CHECK(cell["params"]["np"] == 30);
  CHECK(cell["params"]["tol"].is_null());
  CHECK(cell["runs"].size() == 3);
  CHECK(cell["runs"][0]["ngp"] == 4);
  CHECK(cell["runs"][0]["best_points"].size() == 4);
  CHECK(cell["runs"][0]["uncached_evaluations"] > cell["runs"][0]["nfe"]);
  CHECK(cell["aggregates"]["NGP"]["mean"] == 4.0);
  CHECK(j["config"]["runs"] == 3);
}

TEST_CASE("best points are written with round-trip precision") {
  ExperimentConfig c = small_config(2);
  c.algorithms = {Algorithm::MdeItmf};
  const auto report = run_experiment(c);
  const auto rows = lines_of(runs_csv(report));
  const std::string row = rows[1];
  const auto quote = row.find('"');
  const std::string points = row.substr(quote + 1, row.rfind('"') - quote - 1);
  std::vector<double> values;
  std::istringstream is(points);
  for (std::string item; std::getline(is, item, ';');) {
    std::istringstream triple(item);
    for (std::string v; std::getline(triple, v, ',');)
      values.push_back(std::strtod(v.c_str(), nullptr));
  }
  const auto& b = report.cells[0].runs[0].final_bests;
  REQUIRE(values.size() == 3 * b.size());
  for (std::size_t i = 0; i < b.size(); ++i) {
    CHECK(values[3 * i] == b[i].coords[0]);
    CHECK(values[3 * i + 1] == b[i].coords[1]);
    CHECK(values[3 * i + 2] == b[i].fitness);
  }
}

TEST_CASE("emit_outputs") {
  const auto dir = scratch_dir("emit");
  ExperimentConfig c = small_config(3);
  c.trace = true;
  const auto report = run_experiment(c);
  emit_outputs(report, OutputPaths::in_directory(dir, true));

  CHECK(lines_of(slurp(dir / "runs.csv")).front() ==
        "algorithm,problem,seed,elapsed_seconds,nfe,ngp,generations,best_points");
  CHECK(lines_of(slurp(dir / "aggregates.csv")).front() ==
        "algorithm,problem,metric,mean,stddev,cv_percent");
  CHECK(lines_of(slurp(dir / "aggregates.csv")).size() == 10);
  CHECK(nlohmann::json::parse(slurp(dir / "report.json"))["cells"].size() == 3);

  for (const char* algo : {"de", "mde-itmf", "dewi"}) {
    const auto trace = lines_of(slurp(dir / ("trace-" + std::string(algo) + "-B1.csv")));
    REQUIRE(trace.size() > 1);
    CHECK(trace.front() == "generation,subpop,best_x,best_y,best_f,spreading");
  }

  // On a converging run the last spreading value of each subpopulation is
  // below epsilon.
  std::map<std::string, double> last;
  for (const auto& line : lines_of(trace_csv(report.cells[1].trace))) {
    if (line.rfind("generation", 0) == 0)
      continue;
    const auto first = line.find(',');
    const auto second = line.find(',', first + 1);
    last[line.substr(first + 1, second - first - 1)] =
        std::strtod(line.substr(line.rfind(',') + 1).c_str(), nullptr);
  }
  CHECK(last.size() == 4);
  for (const auto& [subpop, d] : last)
    CHECK(d < 5e-5);

  ExperimentConfig one = small_config(2);
  one.algorithms = {Algorithm::DEwI};
  one.trace = true;
  const auto dir1 = scratch_dir("emit-single");
  emit_outputs(run_experiment(one), OutputPaths::in_directory(dir1, true));
  CHECK(fs::exists(dir1 / "trace.csv"));

  const auto blocker = scratch_dir("blocker");
  std::ofstream(blocker) << "not a directory";
  CHECK_THROWS_AS(emit_outputs(report, OutputPaths::in_directory(blocker / "sub", false)),
                  IoError);
  try {
    emit_outputs(report, OutputPaths::in_directory(blocker / "sub", false));
  } catch (const IoError& e) {
    CHECK(std::string(e.what()).find("runs.csv") != std::string::npos);
  }
  fs::remove_all(dir);
  fs::remove_all(dir1);
  fs::remove(blocker);
}

TEST_CASE("sweeps") {
  ExperimentConfig base = small_config();
  base.algorithms = {Algorithm::MdeItmf};

  SUBCASE("validation") {
    SweepConfig s{base, "gmax", {10, 20}, 5};
    CHECK_THROWS_AS(s.validate(), ConfigError);
    s.parameter = "np";
    s.values = {};
    CHECK_THROWS_AS(s.validate(), ConfigError);
    s.values = {3};
    CHECK_THROWS_AS(s.validate(), ConfigError);
    s.values = {10};
    s.runs_per_value = 0;
    CHECK_THROWS_AS(s.validate(), ConfigError);
  }

  SUBCASE("a single-value sweep equals the experiment") {
    const SweepConfig s{base, "rho", {1.5}, 6};
    const auto sweep = run_sweep(s);
    ExperimentConfig same = base;
    same.overrides["rho"] = 1.5;
    CHECK(without_elapsed(runs_csv(sweep.points[0])) ==
          without_elapsed(runs_csv(run_experiment(same))));
  }

  SUBCASE("population size sweep on Himmelblau") {
    const SweepConfig s{base, "np", {8, 10, 12, 15, 20, 25, 30, 35, 40}, 30};
    const auto sweep = run_sweep(s);
    REQUIRE(sweep.points.size() == 9);
    const auto rows = lines_of(sweep_csv(sweep));
    CHECK(rows.size() == 10);
    CHECK(rows.front() ==
          "parameter,value,algorithm,problem,mean_et,mean_nfe,mean_ngp,stddev_et,stddev_nfe,"
          "stddev_ngp,cv_et,cv_nfe,cv_ngp");
    const double ngp8 = (*sweep.points[0].cells[0].stats)[2].mean;
    const double ngp30 = (*sweep.points[6].cells[0].stats)[2].mean;
    CHECK(ngp30 >= ngp8);
  }

  SUBCASE("tolerance sweep for DEwI runs cleanly") {
    ExperimentConfig dewi = base;
    dewi.algorithms = {Algorithm::DEwI};
    const SweepConfig s{dewi, "tol", {5e-1, 4e-1, 3e-1, 2e-1, 1e-1, 1e-2, 1e-3, 5e-4, 2.5e-4, 1e-4},
                        5};
    const auto sweep = run_sweep(s);
    CHECK(sweep.points.size() == 10);
    for (const auto& p : sweep.points)
      CHECK(p.failed_runs() == 0);

    const auto dir = scratch_dir("sweep");
    emit_sweep(sweep, dir);
    CHECK(lines_of(slurp(dir / "sweep.csv")).size() == 11);
    CHECK(nlohmann::json::parse(slurp(dir / "sweep.json"))["points"].size() == 10);
    fs::remove_all(dir);
  }
}
