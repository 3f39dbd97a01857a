// mdeopt - multipopulation differential evolution for multimodal problems
// SPDX-License-Identifier: Apache-2.0

#include "mdeopt/harness.hpp"

#include <json.hpp>

#include <algorithm>
#include <atomic>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <sstream>
#include <thread>

namespace mdeopt {

using nlohmann::json;

namespace {

std::string lower(std::string_view s) {
  std::string out(s);
  for (auto& c : out)
    c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

std::string trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front())))
    s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back())))
    s.remove_suffix(1);
  return std::string(s);
}

std::vector<std::string> split_list(std::string_view s) {
  std::vector<std::string> out;
  std::size_t pos = 0;
  while (pos <= s.size()) {
    const auto next = s.find(',', pos);
    const auto item = trim(s.substr(pos, next == std::string_view::npos ? s.npos : next - pos));
    if (!item.empty())
      out.push_back(item);
    if (next == std::string_view::npos)
      break;
    pos = next + 1;
  }
  return out;
}

double parse_double(std::string_view key, std::string_view text) {
  const std::string t = trim(text);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (ec != std::errc() || ptr != t.data() + t.size() || t.empty())
    throw ConfigError("'" + std::string(key) + "' expects a number, got '" + t + "'");
  return v;
}

std::uint64_t parse_uint(std::string_view key, std::string_view text) {
  const std::string t = trim(text);
  std::uint64_t v = 0;
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (ec != std::errc() || ptr != t.data() + t.size() || t.empty())
    throw ConfigError("'" + std::string(key) + "' expects a non-negative integer, got '" + t + "'");
  return v;
}

bool parse_bool(std::string_view key, std::string_view text) {
  const std::string t = lower(trim(text));
  if (t == "1" || t == "true" || t == "yes" || t == "on")
    return true;
  if (t == "0" || t == "false" || t == "no" || t == "off")
    return false;
  throw ConfigError("'" + std::string(key) + "' expects a boolean, got '" + t + "'");
}

std::size_t as_count(const std::string& key, double v) {
  if (!(v >= 0.0) || v != std::floor(v) || v > 1e9)
    throw ConfigError("parameter '" + key + "' must be a non-negative integer");
  return static_cast<std::size_t>(v);
}

void apply_param(MultiParams& p, const std::string& key, double v) {
  if (key == "np")
    p.de.population_size = as_count(key, v);
  else if (key == "f")
    p.de.amplification = v;
  else if (key == "cr")
    p.de.crossover = v;
  else if (key == "gmax")
    p.de.max_generations = as_count(key, v);
  else if (key == "eps")
    p.de.spread_tolerance = v;
  else if (key == "nsp")
    p.subpop_count = as_count(key, v);
  else if (key == "beta")
    p.penalty.magnitude = v;
  else if (key == "rho")
    p.penalty.radius = v;
  else if (key == "tol")
    p.dewi_tol = v;
  else
    throw ConfigError("unknown parameter '" + key + "'");
}

std::string anchor_mode_name(AnchorMode m) {
  return m == AnchorMode::Synchronous ? "synchronous" : "sequential";
}

std::string fmt_g17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string fmt_seconds(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}

/// Runs fn(0..n-1), concurrently when `parallel` is set. Each index writes
/// only its own slot, so results do not depend on scheduling.
void for_each_index(std::size_t n, bool parallel, const std::function<void(std::size_t)>& fn) {
  if (!parallel || n < 2) {
    for (std::size_t i = 0; i < n; ++i)
      fn(i);
    return;
  }
  const std::size_t workers =
      std::min<std::size_t>(n, std::max(2u, std::thread::hardware_concurrency()));
  std::atomic<std::size_t> next{0};
  std::vector<std::jthread> pool;
  for (std::size_t t = 0; t < workers; ++t) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < n; i = next++)
        fn(i);
    });
  }
}

struct TaskResult {
  RunRecord record;
  std::vector<TraceRow> trace;
};

RunRecord failed_record(Algorithm alg, std::uint64_t seed, const std::string& what) {
  RunRecord r;
  r.algorithm = alg;
  r.seed = seed;
  r.completed = false;
  r.error = what;
  return r;
}

template <typename Fn>
TaskResult guarded_run(Algorithm alg, std::uint64_t seed, bool want_trace, Fn&& fn) {
  TaskResult out;
  TraceSink sink;
  if (want_trace)
    sink = [&out](const TraceRow& row) { out.trace.push_back(row); };
  try {
    out.record = fn(sink);
  } catch (const EvaluationError& e) {
    out.record = e.partial ? *e.partial : failed_record(alg, seed, e.what());
    out.record.completed = false;
    out.record.error = e.what();
  } catch (const std::exception& e) {
    out.record = failed_record(alg, seed, e.what());
  }
  return out;
}

CellReport run_cell(const ExperimentConfig& config, const BenchmarkProblem& problem,
                    Algorithm alg) {
  CellReport cell;
  cell.algorithm = alg;
  cell.problem = problem.id;
  cell.params = resolve_params(problem, config.overrides, alg);
  cell.params.anchor_mode = config.anchor_mode;
  cell.params.threads = config.subpop_threads;

  const std::size_t runs = config.run_count;
  const std::size_t nsp = cell.params.subpop_count;

  if (alg == Algorithm::DE) {
    std::vector<TaskResult> members(runs * nsp);
    for_each_index(members.size(), config.parallel, [&](std::size_t t) {
      const std::uint64_t group_seed = config.master_seed + t / nsp;
      const std::size_t m = t % nsp;
      members[t] = guarded_run(alg, group_seed, config.trace && t < nsp, [&](const TraceSink& sink) {
        Rng rng(derive_stream_seed(group_seed, m));
        TraceSink relabel;
        if (sink)
          relabel = [&](const TraceRow& row) {
            TraceRow r = row;
            r.subpop = m;
            sink(r);
          };
        return run_de(problem.objective, problem.bounds, cell.params.de, rng, relabel);
      });
    });
    std::vector<RunRecord> flat;
    flat.reserve(members.size());
    for (std::size_t t = 0; t < members.size(); ++t) {
      flat.push_back(std::move(members[t].record));
      cell.trace.insert(cell.trace.end(), members[t].trace.begin(), members[t].trace.end());
    }
    cell.runs = group_de_runs(flat, nsp);
    for (std::size_t r = 0; r < cell.runs.size(); ++r)
      cell.runs[r].seed = config.master_seed + r;
  } else {
    std::vector<TaskResult> results(runs);
    for_each_index(runs, config.parallel, [&](std::size_t r) {
      const std::uint64_t seed = config.master_seed + r;
      results[r] = guarded_run(alg, seed, config.trace && r == 0, [&](const TraceSink& sink) {
        return alg == Algorithm::DEwI
                   ? run_dewi(problem.objective, problem.bounds, cell.params, seed, sink)
                   : run_mde_itmf(problem.objective, problem.bounds, cell.params, seed, sink);
      });
    });
    for (auto& res : results) {
      cell.runs.push_back(std::move(res.record));
      if (!res.trace.empty())
        cell.trace = std::move(res.trace);
    }
  }

  std::vector<double> et, nfe, ngp;
  for (auto& rec : cell.runs) {
    rec.algorithm = alg;
    rec.problem_id = problem.id;
    rec.matched_minimizers =
        match_minimizers(rec.final_bests, problem.known_minimizers, problem.match_tolerance);
    if (!rec.completed)
      continue;
    et.push_back(rec.elapsed_seconds);
    nfe.push_back(static_cast<double>(rec.evaluations));
    ngp.push_back(static_cast<double>(rec.matched_minimizers.size()));
  }
  if (et.size() >= 2)
    cell.stats = std::array<AggregateStats, 3>{aggregate(et), aggregate(nfe), aggregate(ngp)};
  return cell;
}

json stats_json(const AggregateStats& s) {
  json j;
  j["mean"] = s.mean;
  j["stddev"] = s.stddev;
  j["sample_stddev"] = s.sample_stddev;
  j["cv_percent"] = s.cv_percent ? json(*s.cv_percent) : json(nullptr);
  return j;
}

json params_json(const MultiParams& p) {
  json j;
  j["np"] = p.de.population_size;
  j["f"] = p.de.amplification;
  j["cr"] = p.de.crossover;
  j["gmax"] = p.de.max_generations;
  j["eps"] = p.de.spread_tolerance;
  j["nsp"] = p.subpop_count;
  j["beta"] = p.penalty.magnitude;
  j["rho"] = p.penalty.radius;
  j["tol"] = p.dewi_tol ? json(*p.dewi_tol) : json(nullptr);
  return j;
}

json report_to_json(const ExperimentReport& report) {
  json out;
  out["format"] = "mdeopt-report/1";
  out["config"] = json::parse(report.config.to_json());
  out["failed_runs"] = report.failed_runs();
  json cells = json::array();
  for (const auto& cell : report.cells) {
    const auto& problem = get_problem(cell.problem);
    json c;
    c["algorithm"] = std::string(to_string(cell.algorithm));
    c["problem"] = cell.problem;
    c["problem_name"] = problem.name;
    c["formula"] = problem.formula;
    c["params"] = params_json(cell.params);
    json runs = json::array();
    for (const auto& r : cell.runs) {
      json jr;
      jr["seed"] = r.seed;
      jr["elapsed_seconds"] = r.elapsed_seconds;
      jr["nfe"] = r.evaluations;
      jr["uncached_evaluations"] = r.uncached_evaluations;
      jr["ngp"] = r.matched_minimizers.size();
      jr["matched_minimizers"] = r.matched_minimizers;
      jr["generations"] = r.generations_used;
      json bests = json::array();
      for (const auto& b : r.final_bests) {
        json pt = b.coords;
        pt.push_back(b.fitness);
        bests.push_back(pt);
      }
      jr["best_points"] = bests;
      jr["completed"] = r.completed;
      if (!r.completed)
        jr["error"] = r.error;
      runs.push_back(jr);
    }
    c["runs"] = runs;
    if (cell.stats) {
      c["aggregates"]["ET"] = stats_json((*cell.stats)[0]);
      c["aggregates"]["NFE"] = stats_json((*cell.stats)[1]);
      c["aggregates"]["NGP"] = stats_json((*cell.stats)[2]);
    } else {
      c["aggregates"] = nullptr;
    }
    cells.push_back(c);
  }
  out["cells"] = cells;
  return out;
}

void write_file(const std::filesystem::path& path, const std::string& content) {
  std::error_code ec;
  if (path.has_parent_path())
    std::filesystem::create_directories(path.parent_path(), ec);
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f)
    throw IoError("cannot open '" + path.string() + "' for writing");
  f << content;
  f.close();
  if (!f)
    throw IoError("failed writing '" + path.string() + "'");
}

} // namespace

std::string canonical_param_key(std::string_view key) {
  std::string k = lower(trim(key));
  if (k == "epsilon")
    k = "eps";
  static const char* known[] = {"np", "f", "cr", "gmax", "eps", "nsp", "beta", "rho", "tol"};
  for (const char* name : known) {
    if (k == name)
      return k;
  }
  throw ConfigError("unknown parameter '" + std::string(key) +
                    "' (expected np, f, cr, gmax, eps, nsp, beta, rho, tol)");
}

MultiParams resolve_params(const BenchmarkProblem& problem,
                           const std::map<std::string, double>& overrides, Algorithm algorithm) {
  return resolve_params(problem.default_params, overrides, algorithm);
}

MultiParams resolve_params(const MultiParams& base, const std::map<std::string, double>& overrides,
                           Algorithm algorithm) {
  MultiParams p = base;
  for (const auto& [key, value] : overrides)
    apply_param(p, canonical_param_key(key), value);
  if (algorithm != Algorithm::DEwI)
    p.dewi_tol.reset();
  else if (!p.dewi_tol)
    p.dewi_tol = 5e-4;
  return p;
}

void ExperimentConfig::validate() const {
  if (run_count < 1)
    throw ConfigError("runs must be at least 1");
  if (problems.empty())
    throw ConfigError("at least one problem is required");
  if (algorithms.empty())
    throw ConfigError("at least one algorithm is required");
  if (subpop_threads < 1)
    throw ConfigError("subpop_threads must be at least 1");
  for (const auto& id : problems) {
    const auto& problem = get_problem(id);
    for (auto alg : algorithms) {
      MultiParams p = resolve_params(problem, overrides, alg);
      p.anchor_mode = anchor_mode;
      p.threads = subpop_threads;
      try {
        p.validate();
      } catch (const ConfigError& e) {
        throw ConfigError(problem.id + "/" + std::string(to_string(alg)) + ": " + e.what());
      }
    }
  }
}

void ExperimentConfig::set(std::string_view raw_key, std::string_view value) {
  const std::string key = lower(trim(raw_key));
  if (key == "problem" || key == "problems") {
    std::vector<std::string> ids;
    for (const auto& item : split_list(value)) {
      if (lower(item) == "all") {
        for (const auto& p : list_problems())
          ids.push_back(p.id);
      } else {
        ids.push_back(get_problem(item).id);
      }
    }
    problems = std::move(ids);
  } else if (key == "algo" || key == "algorithm" || key == "algorithms") {
    std::vector<Algorithm> algos;
    for (const auto& item : split_list(value)) {
      if (lower(item) == "all")
        algos = {Algorithm::DE, Algorithm::MdeItmf, Algorithm::DEwI};
      else
        algos.push_back(parse_algorithm(item));
    }
    algorithms = std::move(algos);
  } else if (key == "runs" || key == "run_count") {
    run_count = parse_uint(key, value);
  } else if (key == "seed" || key == "master_seed") {
    master_seed = parse_uint(key, value);
  } else if (key == "anchor_mode") {
    const std::string m = lower(trim(value));
    if (m == "sequential")
      anchor_mode = AnchorMode::Sequential;
    else if (m == "synchronous")
      anchor_mode = AnchorMode::Synchronous;
    else
      throw ConfigError("anchor_mode must be 'sequential' or 'synchronous'");
  } else if (key == "subpop_threads") {
    subpop_threads = parse_uint(key, value);
  } else if (key == "parallel") {
    parallel = parse_bool(key, value);
  } else if (key == "trace") {
    trace = parse_bool(key, value);
  } else if (key == "out" || key == "out_dir") {
    out_dir = trim(value);
  } else {
    const std::string param = canonical_param_key(key);
    overrides[param] = parse_double(param, value);
  }
}

std::string ExperimentConfig::to_json() const {
  json j;
  j["problems"] = problems;
  json algs = json::array();
  for (auto a : algorithms)
    algs.push_back(std::string(to_string(a)));
  j["algorithms"] = algs;
  j["runs"] = run_count;
  j["seed"] = master_seed;
  j["params"] = json::object();
  for (const auto& [k, v] : overrides)
    j["params"][k] = v;
  j["anchor_mode"] = anchor_mode_name(anchor_mode);
  j["subpop_threads"] = subpop_threads;
  j["parallel"] = parallel;
  j["trace"] = trace;
  return j.dump(2);
}

ExperimentConfig ExperimentConfig::from_json(std::string_view text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  if (!j.is_object())
    throw ConfigError("config must be a JSON object");

  ExperimentConfig cfg;
  for (const auto& [key, value] : j.items()) {
    if (key == "params") {
      if (!value.is_object())
        throw ConfigError("'params' must be an object");
      for (const auto& [pk, pv] : value.items()) {
        if (!pv.is_number())
          throw ConfigError("parameter '" + pk + "' must be a number");
        cfg.overrides[canonical_param_key(pk)] = pv.get<double>();
      }
      continue;
    }
    std::string text_value;
    if (value.is_array()) {
      for (const auto& item : value) {
        if (!text_value.empty())
          text_value += ",";
        text_value += item.is_string() ? item.get<std::string>() : item.dump();
      }
    } else if (value.is_string()) {
      text_value = value.get<std::string>();
    } else {
      text_value = value.dump();
    }
    cfg.set(key, text_value);
  }
  return cfg;
}

std::size_t ExperimentReport::failed_runs() const {
  std::size_t n = 0;
  for (const auto& c : cells) {
    for (const auto& r : c.runs)
      n += r.completed ? 0 : 1;
  }
  return n;
}

ExperimentReport run_experiment(const ExperimentConfig& config) {
  config.validate();
  ExperimentReport report;
  report.config = config;
  for (const auto& id : config.problems) {
    const auto& problem = get_problem(id);
    for (auto alg : config.algorithms)
      report.cells.push_back(run_cell(config, problem, alg));
  }
  return report;
}

void SweepConfig::validate() const {
  const std::string key = canonical_param_key(parameter);
  static const char* sweepable[] = {"np", "f", "cr", "rho", "beta", "eps", "tol", "nsp"};
  if (std::none_of(std::begin(sweepable), std::end(sweepable),
                   [&](const char* s) { return key == s; }))
    throw ConfigError("parameter '" + parameter + "' cannot be swept");
  if (values.empty())
    throw ConfigError("a sweep needs at least one value");
  if (runs_per_value < 1)
    throw ConfigError("runs per value must be at least 1");
  for (double v : values) {
    ExperimentConfig c = base;
    c.run_count = runs_per_value;
    c.overrides[key] = v;
    c.validate();
  }
}

SweepReport run_sweep(const SweepConfig& config) {
  config.validate();
  SweepReport report;
  report.config = config;
  const std::string key = canonical_param_key(config.parameter);
  for (double v : config.values) {
    ExperimentConfig c = config.base;
    c.run_count = config.runs_per_value;
    c.overrides[key] = v;
    report.points.push_back(run_experiment(c));
  }
  return report;
}

std::string runs_csv(const ExperimentReport& report) {
  std::ostringstream os;
  os << "algorithm,problem,seed,elapsed_seconds,nfe,ngp,generations,best_points\n";
  for (const auto& cell : report.cells) {
    for (const auto& r : cell.runs) {
      os << to_string(cell.algorithm) << ',' << cell.problem << ',' << r.seed << ','
         << fmt_seconds(r.elapsed_seconds) << ',' << r.evaluations << ','
         << r.matched_minimizers.size() << ',';
      for (std::size_t g = 0; g < r.generations_used.size(); ++g)
        os << (g ? ";" : "") << r.generations_used[g];
      os << ",\"";
      for (std::size_t b = 0; b < r.final_bests.size(); ++b) {
        const auto& p = r.final_bests[b];
        os << (b ? ";" : "");
        for (double c : p.coords)
          os << fmt_g17(c) << ',';
        os << fmt_g17(p.fitness);
      }
      os << "\"\n";
    }
  }
  return os.str();
}

std::string aggregates_csv(const ExperimentReport& report) {
  static const char* metric_names[] = {"ET", "NFE", "NGP"};
  std::ostringstream os;
  os << "algorithm,problem,metric,mean,stddev,cv_percent\n";
  for (const auto& cell : report.cells) {
    if (!cell.stats)
      continue;
    for (std::size_t m = 0; m < 3; ++m) {
      const auto& s = (*cell.stats)[m];
      os << to_string(cell.algorithm) << ',' << cell.problem << ',' << metric_names[m] << ','
         << fmt_g17(s.mean) << ',' << fmt_g17(s.stddev) << ','
         << (s.cv_percent ? fmt_g17(*s.cv_percent) : std::string()) << '\n';
    }
  }
  return os.str();
}

std::string trace_csv(std::span<const TraceRow> rows) {
  std::ostringstream os;
  os << "generation,subpop,best_x,best_y,best_f,spreading\n";
  for (const auto& r : rows) {
    const auto& c = r.best.coords;
    os << r.generation << ',' << r.subpop << ',' << (c.size() > 0 ? fmt_g17(c[0]) : "") << ','
       << (c.size() > 1 ? fmt_g17(c[1]) : "") << ',' << fmt_g17(r.best.fitness) << ','
       << fmt_g17(r.spreading) << '\n';
  }
  return os.str();
}

std::string report_json(const ExperimentReport& report) {
  return report_to_json(report).dump(2) + "\n";
}

std::string sweep_csv(const SweepReport& report) {
  std::ostringstream os;
  os << "parameter,value,algorithm,problem,mean_et,mean_nfe,mean_ngp,stddev_et,stddev_nfe,"
        "stddev_ngp,cv_et,cv_nfe,cv_ngp\n";
  const std::string key = canonical_param_key(report.config.parameter);
  for (std::size_t i = 0; i < report.points.size(); ++i) {
    for (const auto& cell : report.points[i].cells) {
      os << key << ',' << fmt_g17(report.config.values[i]) << ',' << to_string(cell.algorithm)
         << ',' << cell.problem;
      if (cell.stats) {
        const auto& s = *cell.stats;
        for (const auto& a : s)
          os << ',' << fmt_g17(a.mean);
        for (const auto& a : s)
          os << ',' << fmt_g17(a.stddev);
        for (const auto& a : s)
          os << ',' << (a.cv_percent ? fmt_g17(*a.cv_percent) : std::string());
      } else {
        os << ",,,,,,,,,";
      }
      os << '\n';
    }
  }
  return os.str();
}

OutputPaths OutputPaths::in_directory(const std::filesystem::path& dir, bool with_trace) {
  OutputPaths p;
  p.runs_csv = dir / "runs.csv";
  p.aggregates_csv = dir / "aggregates.csv";
  p.report_json = dir / "report.json";
  if (with_trace)
    p.trace_dir = dir;
  return p;
}

void emit_outputs(const ExperimentReport& report, const OutputPaths& paths) {
  if (!paths.runs_csv.empty())
    write_file(paths.runs_csv, runs_csv(report));
  if (!paths.aggregates_csv.empty())
    write_file(paths.aggregates_csv, aggregates_csv(report));
  if (!paths.report_json.empty())
    write_file(paths.report_json, report_json(report));
  if (!paths.trace_dir.empty()) {
    for (const auto& cell : report.cells) {
      const std::string name =
          report.cells.size() == 1
              ? "trace.csv"
              : "trace-" + std::string(to_string(cell.algorithm)) + "-" + cell.problem + ".csv";
      write_file(paths.trace_dir / name, trace_csv(cell.trace));
    }
  }
}

void emit_sweep(const SweepReport& report, const std::filesystem::path& dir) {
  write_file(dir / "sweep.csv", sweep_csv(report));
  json j;
  j["format"] = "mdeopt-sweep/1";
  j["parameter"] = canonical_param_key(report.config.parameter);
  j["values"] = report.config.values;
  j["runs_per_value"] = report.config.runs_per_value;
  json points = json::array();
  for (const auto& p : report.points)
    points.push_back(report_to_json(p));
  j["points"] = points;
  write_file(dir / "sweep.json", j.dump(2) + "\n");
}

} // namespace mdeopt
