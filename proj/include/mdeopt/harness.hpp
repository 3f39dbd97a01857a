// mdeopt - multipopulation differential evolution for multimodal problems
// SPDX-License-Identifier: Apache-2.0

#ifndef MDEOPT_HARNESS_HPP
#define MDEOPT_HARNESS_HPP

#include "mdeopt/benchmarks.hpp"
#include "mdeopt/metrics.hpp"
#include "mdeopt/multipop.hpp"
#include "mdeopt/types.hpp"

#include <array>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace mdeopt {

/// Parameter keys accepted in overrides and sweeps:
///   np, f, cr, gmax, eps, nsp, beta, rho, tol
/// Lookup is case-insensitive; "epsilon" is accepted for eps.
std::string canonical_param_key(std::string_view key);

/// Problem defaults with overrides applied, shaped for `algorithm`
/// (the DEwI tolerance is dropped for the other engines).
MultiParams resolve_params(const BenchmarkProblem& problem,
                           const std::map<std::string, double>& overrides, Algorithm algorithm);
MultiParams resolve_params(const MultiParams& base, const std::map<std::string, double>& overrides,
                           Algorithm algorithm);

struct ExperimentConfig {
  std::vector<std::string> problems{"B1"};
  std::vector<Algorithm> algorithms{Algorithm::DE, Algorithm::MdeItmf, Algorithm::DEwI};
  std::size_t run_count = 100;
  std::uint64_t master_seed = 1;
  std::map<std::string, double> overrides;
  AnchorMode anchor_mode = AnchorMode::Sequential;
  std::size_t subpop_threads = 1;
  bool parallel = false; // runs execute concurrently; results are unaffected
  bool trace = false;    // record a per-generation trace of run 0 of each cell
  std::string out_dir;

  /// Checks every field, including that overrides produce valid parameters
  /// for every requested problem and algorithm.
  void validate() const;

  /// Sets one field from text: problem(s), algo/algorithm(s), runs, seed,
  /// anchor_mode, subpop_threads, parallel, trace, out, or a parameter key.
  void set(std::string_view key, std::string_view value);

  std::string to_json() const;
  static ExperimentConfig from_json(std::string_view text);
};

struct CellReport {
  Algorithm algorithm = Algorithm::MdeItmf;
  std::string problem;
  MultiParams params;
  std::vector<RunRecord> runs;
  std::optional<std::array<AggregateStats, 3>> stats; // ET, NFE, NGP
  std::vector<TraceRow> trace;
};

struct ExperimentReport {
  ExperimentConfig config;
  std::vector<CellReport> cells;

  std::size_t failed_runs() const;
};

/// Runs every (problem, algorithm) cell. Run r uses seed master_seed + r.
/// DE cells perform run_count x Nsp single runs; member m of group r draws
/// from derive_stream_seed(master_seed + r, m) and the groups are merged with
/// group_de_runs. Failed runs are recorded and the experiment continues.
ExperimentReport run_experiment(const ExperimentConfig& config);

struct SweepConfig {
  ExperimentConfig base;
  std::string parameter;
  std::vector<double> values;
  std::size_t runs_per_value = 30;

  void validate() const;
};

struct SweepReport {
  SweepConfig config;
  std::vector<ExperimentReport> points; // one per value
};

SweepReport run_sweep(const SweepConfig& config);

std::string runs_csv(const ExperimentReport& report);
std::string aggregates_csv(const ExperimentReport& report);
std::string trace_csv(std::span<const TraceRow> rows);
std::string report_json(const ExperimentReport& report);
std::string sweep_csv(const SweepReport& report);

struct OutputPaths {
  std::filesystem::path runs_csv;
  std::filesystem::path aggregates_csv;
  std::filesystem::path report_json;
  std::filesystem::path trace_dir; // empty: no trace files

  static OutputPaths in_directory(const std::filesystem::path& dir, bool with_trace);
};

/// Writes the files named in `paths`. Trace files go to trace.csv for a
/// single-cell report and trace-<algorithm>-<problem>.csv otherwise.
void emit_outputs(const ExperimentReport& report, const OutputPaths& paths);

/// Writes sweep.csv and sweep.json into `dir`.
void emit_sweep(const SweepReport& report, const std::filesystem::path& dir);

} // namespace mdeopt

#endif
