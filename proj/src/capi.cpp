// mdeopt - multipopulation differential evolution for multimodal problems
// SPDX-License-Identifier: Apache-2.0

#include "mdeopt/mdeopt.h"

#include "mdeopt/harness.hpp"

#include <json.hpp>

#include <cstdlib>
#include <cstring>
#include <new>
#include <string>
#include <variant>

struct mdeopt_config {
  mdeopt::ExperimentConfig value;
};

struct mdeopt_report {
  std::variant<mdeopt::ExperimentReport, mdeopt::SweepReport> value;
};

struct mdeopt_result {
  mdeopt::RunRecord record;
};

namespace {

thread_local std::string last_error;

mdeopt_status fail(mdeopt_status status, const std::string& message) {
  last_error = message;
  return status;
}

template <typename Fn>
mdeopt_status guarded(Fn&& fn) {
  try {
    last_error.clear();
    return fn();
  } catch (const mdeopt::UnknownProblemError& e) {
    return fail(MDEOPT_ERR_UNKNOWN_PROBLEM, e.what());
  } catch (const mdeopt::ConfigError& e) {
    return fail(MDEOPT_ERR_CONFIG, e.what());
  } catch (const mdeopt::EvaluationError& e) {
    return fail(MDEOPT_ERR_EVALUATION, e.what());
  } catch (const mdeopt::IoError& e) {
    return fail(MDEOPT_ERR_IO, e.what());
  } catch (const std::bad_alloc&) {
    return fail(MDEOPT_ERR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return fail(MDEOPT_ERR_INTERNAL, e.what());
  } catch (...) {
    return fail(MDEOPT_ERR_INTERNAL, "unknown error");
  }
}

char* duplicate(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (!out)
    throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

mdeopt_status missing(const char* what) {
  return fail(MDEOPT_ERR_INVALID_ARGUMENT, std::string(what) + " must not be null");
}

nlohmann::json params_json(const mdeopt::MultiParams& p) {
  nlohmann::json j;
  j["np"] = p.de.population_size;
  j["f"] = p.de.amplification;
  j["cr"] = p.de.crossover;
  j["gmax"] = p.de.max_generations;
  j["eps"] = p.de.spread_tolerance;
  j["nsp"] = p.subpop_count;
  j["beta"] = p.penalty.magnitude;
  j["rho"] = p.penalty.radius;
  j["tol"] = p.dewi_tol ? nlohmann::json(*p.dewi_tol) : nlohmann::json(nullptr);
  return j;
}

} // namespace

extern "C" {

const char* mdeopt_version(void) { return "0.1.0"; }

const char* mdeopt_last_error(void) { return last_error.c_str(); }

void mdeopt_string_free(char* s) { std::free(s); }

mdeopt_status mdeopt_problems_json(char** out) {
  if (!out)
    return missing("out");
  return guarded([&] {
    nlohmann::json list = nlohmann::json::array();
    for (const auto& p : mdeopt::list_problems()) {
      nlohmann::json j;
      j["id"] = p.id;
      j["name"] = p.name;
      j["formula"] = p.formula;
      j["lower"] = p.bounds.lower();
      j["upper"] = p.bounds.upper();
      j["minimizers"] = p.known_minimizers;
      j["global_value"] = p.global_value;
      j["match_tolerance"] = p.match_tolerance;
      j["params"] = params_json(p.default_params);
      list.push_back(j);
    }
    *out = duplicate(list.dump(2));
    return MDEOPT_OK;
  });
}

mdeopt_status mdeopt_problem_evaluate(const char* problem, const double* x, size_t dim,
                                      double* value) {
  if (!problem || !x || !value)
    return missing("problem, x and value");
  return guarded([&] {
    const auto& p = mdeopt::get_problem(problem);
    if (dim != p.bounds.dim())
      return fail(MDEOPT_ERR_INVALID_ARGUMENT,
                  p.id + " expects " + std::to_string(p.bounds.dim()) + " coordinates");
    *value = p.objective(std::span<const double>(x, dim));
    return MDEOPT_OK;
  });
}

mdeopt_status mdeopt_config_new(mdeopt_config** out) {
  if (!out)
    return missing("out");
  return guarded([&] {
    *out = new mdeopt_config{};
    return MDEOPT_OK;
  });
}

mdeopt_status mdeopt_config_from_json(const char* json, mdeopt_config** out) {
  if (!json || !out)
    return missing("json and out");
  return guarded([&] {
    auto cfg = mdeopt::ExperimentConfig::from_json(json);
    *out = new mdeopt_config{std::move(cfg)};
    return MDEOPT_OK;
  });
}

mdeopt_status mdeopt_config_set(mdeopt_config* config, const char* key, const char* value) {
  if (!config || !key || !value)
    return missing("config, key and value");
  return guarded([&] {
    config->value.set(key, value);
    return MDEOPT_OK;
  });
}

mdeopt_status mdeopt_config_validate(const mdeopt_config* config) {
  if (!config)
    return missing("config");
  return guarded([&] {
    config->value.validate();
    return MDEOPT_OK;
  });
}

mdeopt_status mdeopt_config_to_json(const mdeopt_config* config, char** out) {
  if (!config || !out)
    return missing("config and out");
  return guarded([&] {
    *out = duplicate(config->value.to_json());
    return MDEOPT_OK;
  });
}

void mdeopt_config_free(mdeopt_config* config) { delete config; }

mdeopt_status mdeopt_run_experiment(const mdeopt_config* config, mdeopt_report** out) {
  if (!config || !out)
    return missing("config and out");
  *out = nullptr;
  return guarded([&] {
    auto report = mdeopt::run_experiment(config->value);
    const auto failed = report.failed_runs();
    *out = new mdeopt_report{std::move(report)};
    if (failed)
      return fail(MDEOPT_ERR_RUN_FAILED, std::to_string(failed) + " run(s) failed");
    return MDEOPT_OK;
  });
}

mdeopt_status mdeopt_run_sweep(const mdeopt_config* base, const char* parameter,
                               const double* values, size_t count, size_t runs_per_value,
                               mdeopt_report** out) {
  if (!base || !parameter || !out || (count && !values))
    return missing("base, parameter, values and out");
  *out = nullptr;
  return guarded([&] {
    mdeopt::SweepConfig sweep;
    sweep.base = base->value;
    sweep.parameter = parameter;
    sweep.values.assign(values, values + count);
    sweep.runs_per_value = runs_per_value;
    auto report = mdeopt::run_sweep(sweep);
    std::size_t failed = 0;
    for (const auto& p : report.points)
      failed += p.failed_runs();
    *out = new mdeopt_report{std::move(report)};
    if (failed)
      return fail(MDEOPT_ERR_RUN_FAILED, std::to_string(failed) + " run(s) failed");
    return MDEOPT_OK;
  });
}

mdeopt_status mdeopt_report_text(const mdeopt_report* report, mdeopt_output kind, char** out) {
  if (!report || !out)
    return missing("report and out");
  return guarded([&] {
    std::string text;
    if (const auto* exp = std::get_if<mdeopt::ExperimentReport>(&report->value)) {
      switch (kind) {
      case MDEOPT_OUT_RUNS_CSV:
        text = mdeopt::runs_csv(*exp);
        break;
      case MDEOPT_OUT_AGGREGATES_CSV:
        text = mdeopt::aggregates_csv(*exp);
        break;
      case MDEOPT_OUT_REPORT_JSON:
        text = mdeopt::report_json(*exp);
        break;
      case MDEOPT_OUT_TRACE_CSV:
        if (exp->cells.empty())
          return fail(MDEOPT_ERR_INVALID_ARGUMENT, "report has no cells");
        text = mdeopt::trace_csv(exp->cells.front().trace);
        break;
      default:
        return fail(MDEOPT_ERR_INVALID_ARGUMENT, "output kind not available for an experiment");
      }
    } else {
      const auto& sweep = std::get<mdeopt::SweepReport>(report->value);
      if (kind == MDEOPT_OUT_SWEEP_CSV)
        text = mdeopt::sweep_csv(sweep);
      else
        return fail(MDEOPT_ERR_INVALID_ARGUMENT, "output kind not available for a sweep");
    }
    *out = duplicate(text);
    return MDEOPT_OK;
  });
}

mdeopt_status mdeopt_report_write(const mdeopt_report* report, const char* dir) {
  if (!report || !dir)
    return missing("report and dir");
  return guarded([&] {
    if (const auto* exp = std::get_if<mdeopt::ExperimentReport>(&report->value))
      mdeopt::emit_outputs(*exp, mdeopt::OutputPaths::in_directory(dir, exp->config.trace));
    else
      mdeopt::emit_sweep(std::get<mdeopt::SweepReport>(report->value), dir);
    return MDEOPT_OK;
  });
}

mdeopt_status mdeopt_report_counts(const mdeopt_report* report, size_t* runs, size_t* failed) {
  if (!report)
    return missing("report");
  std::size_t total = 0, bad = 0;
  auto count = [&](const mdeopt::ExperimentReport& r) {
    for (const auto& c : r.cells)
      total += c.runs.size();
    bad += r.failed_runs();
  };
  if (const auto* exp = std::get_if<mdeopt::ExperimentReport>(&report->value)) {
    count(*exp);
  } else {
    for (const auto& p : std::get<mdeopt::SweepReport>(report->value).points)
      count(p);
  }
  if (runs)
    *runs = total;
  if (failed)
    *failed = bad;
  return MDEOPT_OK;
}

void mdeopt_report_free(mdeopt_report* report) { delete report; }

mdeopt_status mdeopt_minimize(const char* algorithm, mdeopt_objective f, void* user_data,
                              size_t dim, const double* lower, const double* upper,
                              const mdeopt_config* config, uint64_t seed, mdeopt_result** out) {
  if (!algorithm || !f || !lower || !upper || !out)
    return missing("algorithm, f, lower, upper and out");
  *out = nullptr;
  if (dim == 0)
    return fail(MDEOPT_ERR_INVALID_ARGUMENT, "dim must be positive");
  return guarded([&] {
    const auto alg = mdeopt::parse_algorithm(algorithm);
    mdeopt::Bounds bounds(std::vector<double>(lower, lower + dim),
                          std::vector<double>(upper, upper + dim));
    static const std::map<std::string, double> no_overrides;
    mdeopt::MultiParams params =
        mdeopt::resolve_params(mdeopt::MultiParams{}, config ? config->value.overrides : no_overrides, alg);
    if (config) {
      params.anchor_mode = config->value.anchor_mode;
      params.threads = config->value.subpop_threads;
    }
    mdeopt::Objective objective = [f, user_data](std::span<const double> x) {
      return f(x.data(), x.size(), user_data);
    };

    mdeopt::RunRecord rec;
    if (alg == mdeopt::Algorithm::DE) {
      mdeopt::Rng rng(mdeopt::derive_stream_seed(seed, 0));
      rec = mdeopt::run_de(objective, bounds, params.de, rng);
      rec.seed = seed;
    } else if (alg == mdeopt::Algorithm::DEwI) {
      rec = mdeopt::run_dewi(objective, bounds, params, seed);
    } else {
      rec = mdeopt::run_mde_itmf(objective, bounds, params, seed);
    }
    *out = new mdeopt_result{std::move(rec)};
    return MDEOPT_OK;
  });
}

size_t mdeopt_result_count(const mdeopt_result* result) {
  return result ? result->record.final_bests.size() : 0;
}

uint64_t mdeopt_result_evaluations(const mdeopt_result* result) {
  return result ? result->record.evaluations : 0;
}

mdeopt_status mdeopt_result_point(const mdeopt_result* result, size_t index, double* coords,
                                  size_t dim, double* value) {
  if (!result)
    return missing("result");
  const auto& bests = result->record.final_bests;
  if (index >= bests.size())
    return fail(MDEOPT_ERR_INVALID_ARGUMENT, "point index out of range");
  const auto& p = bests[index];
  if (coords) {
    if (dim != p.coords.size())
      return fail(MDEOPT_ERR_INVALID_ARGUMENT, "dimension mismatch");
    std::memcpy(coords, p.coords.data(), dim * sizeof(double));
  }
  if (value)
    *value = p.fitness;
  return MDEOPT_OK;
}

void mdeopt_result_free(mdeopt_result* result) { delete result; }

} // extern "C"
