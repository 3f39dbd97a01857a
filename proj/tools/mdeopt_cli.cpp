// mdeopt - multipopulation differential evolution for multimodal problems
// SPDX-License-Identifier: Apache-2.0
//
// Command-line front end. Talks to the library only through the C API.

#include "mdeopt/mdeopt.h"

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

namespace {

enum ExitCode { kOk = 0, kRunFailed = 1, kUsage = 2, kIo = 3, kInternal = 4 };

struct CliError {
  int code;
  std::string message;
};

struct ConfigDeleter {
  void operator()(mdeopt_config* c) const { mdeopt_config_free(c); }
};
struct ReportDeleter {
  void operator()(mdeopt_report* r) const { mdeopt_report_free(r); }
};
using ConfigPtr = std::unique_ptr<mdeopt_config, ConfigDeleter>;
using ReportPtr = std::unique_ptr<mdeopt_report, ReportDeleter>;

int exit_code_for(mdeopt_status s) {
  switch (s) {
  case MDEOPT_OK:
    return kOk;
  case MDEOPT_ERR_RUN_FAILED:
  case MDEOPT_ERR_EVALUATION:
    return kRunFailed;
  case MDEOPT_ERR_IO:
    return kIo;
  case MDEOPT_ERR_INTERNAL:
    return kInternal;
  default:
    return kUsage;
  }
}

void check(mdeopt_status s) {
  if (s != MDEOPT_OK)
    throw CliError{exit_code_for(s), mdeopt_last_error()};
}

std::string take_string(char* s) {
  std::string out(s ? s : "");
  mdeopt_string_free(s);
  return out;
}

std::string report_text(const mdeopt_report* report, mdeopt_output kind) {
  char* text = nullptr;
  check(mdeopt_report_text(report, kind, &text));
  return take_string(text);
}

std::string join(const std::vector<std::string>& items) {
  std::string out;
  for (const auto& s : items)
    out += (out.empty() ? "" : ",") + s;
  return out;
}

/// Options shared by run, sweep and trace.
struct CommonOptions {
  std::string config_file;
  std::vector<std::string> problems;
  std::vector<std::string> algorithms;
  std::string runs;
  std::string seed;
  std::vector<std::string> params;
  std::string out;
  std::string anchor_mode;
  std::string subpop_threads;
  bool parallel = false;
  bool trace = false;

  void attach(CLI::App* app, bool experiment) {
    app->add_option("--config", config_file, "JSON configuration file; flags override it")
        ->check(CLI::ExistingFile);
    app->add_option("--problem", problems, "problem id or name (B1..B10, repeatable, or 'all')")
        ->delimiter(',');
    app->add_option("--algo", algorithms, "de, mde-itmf, dewi or all (repeatable)")
        ->delimiter(',');
    if (experiment)
      app->add_option("--runs", runs, "runs per problem and algorithm");
    app->add_option("--seed", seed, "master seed; run r uses seed + r");
    app->add_option("--param", params, "parameter override key=value (repeatable)");
    app->add_option("--out", out, "output directory");
    app->add_option("--anchor-mode", anchor_mode, "sequential or synchronous");
    app->add_option("--subpop-threads", subpop_threads,
                    "threads per run across subpopulations (synchronous mode)");
    if (experiment) {
      app->add_flag("--parallel", parallel, "execute independent runs concurrently");
      app->add_flag("--trace", trace, "write a per-generation trace of the first run");
    }
  }

  ConfigPtr build() const {
    mdeopt_config* raw = nullptr;
    if (!config_file.empty()) {
      std::ifstream f(config_file);
      if (!f)
        throw CliError{kIo, "cannot read '" + config_file + "'"};
      std::stringstream buf;
      buf << f.rdbuf();
      check(mdeopt_config_from_json(buf.str().c_str(), &raw));
    } else {
      check(mdeopt_config_new(&raw));
    }
    ConfigPtr cfg(raw);
    auto set = [&](const char* key, const std::string& value) {
      check(mdeopt_config_set(cfg.get(), key, value.c_str()));
    };
    if (!problems.empty())
      set("problem", join(problems));
    if (!algorithms.empty())
      set("algo", join(algorithms));
    if (!runs.empty())
      set("runs", runs);
    if (!seed.empty())
      set("seed", seed);
    for (const auto& kv : params) {
      const auto eq = kv.find('=');
      if (eq == std::string::npos || eq == 0)
        throw CliError{kUsage, "--param expects key=value, got '" + kv + "'"};
      set(kv.substr(0, eq).c_str(), kv.substr(eq + 1));
    }
    if (!anchor_mode.empty())
      set("anchor_mode", anchor_mode);
    if (!subpop_threads.empty())
      set("subpop_threads", subpop_threads);
    if (parallel)
      set("parallel", "true");
    if (trace)
      set("trace", "true");
    if (!out.empty())
      set("out", out);
    return cfg;
  }
};

/// Runs the config and writes outputs. Failed runs still get their outputs
/// written before the nonzero status is reported.
int execute_experiment(const mdeopt_config* cfg, const std::string& out, bool print_trace) {
  mdeopt_report* raw = nullptr;
  const mdeopt_status status = mdeopt_run_experiment(cfg, &raw);
  if (!raw)
    check(status);
  ReportPtr report(raw);
  const std::string run_error = status == MDEOPT_OK ? "" : mdeopt_last_error();

  if (!out.empty())
    check(mdeopt_report_write(report.get(), out.c_str()));

  if (print_trace) {
    std::cout << report_text(report.get(), MDEOPT_OUT_TRACE_CSV);
  } else {
    const std::string aggregates = report_text(report.get(), MDEOPT_OUT_AGGREGATES_CSV);
    if (aggregates.find('\n') + 1 < aggregates.size())
      std::cout << aggregates;
    else
      std::cout << report_text(report.get(), MDEOPT_OUT_RUNS_CSV);
  }

  if (status != MDEOPT_OK) {
    std::cerr << "mdeopt: " << run_error << "\n";
    return exit_code_for(status);
  }
  return kOk;
}

std::vector<double> parse_values(const std::string& text) {
  std::vector<double> values;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty())
      continue;
    try {
      std::size_t used = 0;
      values.push_back(std::stod(item, &used));
      if (used != item.size())
        throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw CliError{kUsage, "--values: '" + item + "' is not a number"};
    }
  }
  return values;
}

void print_problem_table() {
  char* text = nullptr;
  check(mdeopt_problems_json(&text));
  const auto problems = nlohmann::json::parse(take_string(text));
  std::printf("%-4s %-22s %3s %4s %5s %5s %4s %6s  %s\n", "id", "name", "ngp", "Np", "F",
              "CR", "Nsp", "rho", "domain");
  for (const auto& p : problems) {
    const auto& par = p["params"];
    std::ostringstream domain;
    for (std::size_t k = 0; k < p["lower"].size(); ++k)
      domain << (k ? " x " : "") << "[" << p["lower"][k].get<double>() << ", "
             << p["upper"][k].get<double>() << "]";
    std::printf("%-4s %-22s %3zu %4d %5.2f %5.2f %4d %6.2f  %s\n",
                p["id"].get<std::string>().c_str(), p["name"].get<std::string>().c_str(),
                p["minimizers"].size(), par["np"].get<int>(), par["f"].get<double>(),
                par["cr"].get<double>(), par["nsp"].get<int>(), par["rho"].get<double>(),
                domain.str().c_str());
  }
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"Multipopulation differential evolution for problems with several global minima"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(mdeopt_version()));

  CommonOptions run_opts;
  auto* run = app.add_subcommand("run", "run an experiment and write per-run and aggregate results");
  run_opts.attach(run, true);

  CommonOptions sweep_opts;
  std::string sweep_param;
  std::string sweep_values;
  std::size_t runs_per_value = 30;
  auto* sweep = app.add_subcommand("sweep", "vary one parameter and tabulate ET, NFE and NGP");
  sweep_opts.attach(sweep, false);
  sweep->add_flag("--parallel", sweep_opts.parallel, "execute independent runs concurrently");
  sweep->add_option("--sweep-param", sweep_param, "np, f, cr, rho, beta, eps, tol or nsp")
      ->required();
  sweep->add_option("--values", sweep_values, "comma-separated values")->required();
  sweep->add_option("--runs-per-value", runs_per_value, "runs for each value");

  bool list_json = false;
  auto* list = app.add_subcommand("list", "list benchmark problems and default parameters");
  list->add_flag("--json", list_json, "print the full registry as JSON");

  CommonOptions trace_opts;
  auto* trace = app.add_subcommand("trace", "single seeded run with a per-generation trace");
  trace_opts.attach(trace, false);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kOk : kUsage;
  }

  try {
    if (*list) {
      if (list_json) {
        char* text = nullptr;
        check(mdeopt_problems_json(&text));
        std::cout << take_string(text) << "\n";
      } else {
        print_problem_table();
      }
      return kOk;
    }

    if (*run) {
      const ConfigPtr cfg = run_opts.build();
      check(mdeopt_config_validate(cfg.get()));
      return execute_experiment(cfg.get(), run_opts.out, false);
    }

    if (*trace) {
      const ConfigPtr cfg = trace_opts.build();
      check(mdeopt_config_set(cfg.get(), "runs", "1"));
      check(mdeopt_config_set(cfg.get(), "trace", "true"));
      if (trace_opts.algorithms.empty())
        check(mdeopt_config_set(cfg.get(), "algo", "mde-itmf"));
      check(mdeopt_config_validate(cfg.get()));
      return execute_experiment(cfg.get(), trace_opts.out, true);
    }

    if (*sweep) {
      const ConfigPtr cfg = sweep_opts.build();
      const auto values = parse_values(sweep_values);
      mdeopt_report* raw = nullptr;
      const mdeopt_status status = mdeopt_run_sweep(cfg.get(), sweep_param.c_str(), values.data(),
                                                    values.size(), runs_per_value, &raw);
      if (!raw)
        check(status);
      ReportPtr report(raw);
      const std::string run_error = status == MDEOPT_OK ? "" : mdeopt_last_error();
      if (!sweep_opts.out.empty())
        check(mdeopt_report_write(report.get(), sweep_opts.out.c_str()));
      std::cout << report_text(report.get(), MDEOPT_OUT_SWEEP_CSV);
      if (status != MDEOPT_OK) {
        std::cerr << "mdeopt: " << run_error << "\n";
        return exit_code_for(status);
      }
      return kOk;
    }
  } catch (const CliError& e) {
    std::cerr << "mdeopt: " << e.message << "\n";
    return e.code;
  } catch (const std::exception& e) {
    std::cerr << "mdeopt: " << e.what() << "\n";
    return kInternal;
  }
  return kOk;
}
