// mdeopt - multipopulation differential evolution for multimodal problems
// SPDX-License-Identifier: Apache-2.0

#ifndef MDEOPT_METRICS_HPP
#define MDEOPT_METRICS_HPP

#include "mdeopt/benchmarks.hpp"
#include "mdeopt/types.hpp"

#include <optional>
#include <span>
#include <vector>

namespace mdeopt {

/// Indices of the known minimizers within `tolerance` (Euclidean) of at
/// least one best point, ascending.
std::vector<std::size_t> match_minimizers(std::span<const Point> bests,
                                          std::span<const std::vector<double>> minimizers,
                                          double tolerance);

/// Number of distinct global minimizers hit by the final bests.
std::size_t count_ngp(std::span<const Point> bests, const BenchmarkProblem& problem);

/// Merges consecutive groups of `group_size` single-population records:
/// times and evaluation counts are summed, bests and generations concatenated.
std::vector<RunRecord> group_de_runs(std::span<const RunRecord> records, std::size_t group_size);

struct AggregateStats {
  double mean = 0.0;
  double stddev = 0.0;        // population convention (divide by n)
  double sample_stddev = 0.0; // divide by n - 1
  std::optional<double> cv_percent; // absent when mean == 0
};

/// Needs at least two values.
AggregateStats aggregate(std::span<const double> values);

} // namespace mdeopt

#endif
