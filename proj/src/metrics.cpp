// mdeopt - multipopulation differential evolution for multimodal problems
// SPDX-License-Identifier: Apache-2.0

#include "mdeopt/metrics.hpp"

#include <cmath>
#include <string>

namespace mdeopt {

std::vector<std::size_t> match_minimizers(std::span<const Point> bests,
                                          std::span<const std::vector<double>> minimizers,
                                          double tolerance) {
  std::vector<std::size_t> matched;
  for (std::size_t m = 0; m < minimizers.size(); ++m) {
    const auto& target = minimizers[m];
    for (const auto& b : bests) {
      if (b.coords.size() != target.size())
        continue;
      double acc = 0.0;
      for (std::size_t k = 0; k < target.size(); ++k)
        acc += (b.coords[k] - target[k]) * (b.coords[k] - target[k]);
      if (std::sqrt(acc) <= tolerance) {
        matched.push_back(m);
        break;
      }
    }
  }
  return matched;
}

std::size_t count_ngp(std::span<const Point> bests, const BenchmarkProblem& problem) {
  return match_minimizers(bests, problem.known_minimizers, problem.match_tolerance).size();
}

std::vector<RunRecord> group_de_runs(std::span<const RunRecord> records, std::size_t group_size) {
  if (group_size == 0 || records.size() % group_size != 0)
    throw ConfigError("group_de_runs: " + std::to_string(records.size()) +
                      " records cannot be split into groups of " + std::to_string(group_size));
  std::vector<RunRecord> groups;
  for (std::size_t start = 0; start < records.size(); start += group_size) {
    RunRecord g = records[start];
    g.final_bests.clear();
    g.generations_used.clear();
    g.matched_minimizers.clear();
    g.elapsed_seconds = 0.0;
    g.evaluations = 0;
    g.uncached_evaluations = 0;
    for (std::size_t m = start; m < start + group_size; ++m) {
      const auto& r = records[m];
      g.elapsed_seconds += r.elapsed_seconds;
      g.evaluations += r.evaluations;
      g.uncached_evaluations += r.uncached_evaluations;
      g.final_bests.insert(g.final_bests.end(), r.final_bests.begin(), r.final_bests.end());
      g.generations_used.insert(g.generations_used.end(), r.generations_used.begin(),
                                r.generations_used.end());
      if (!r.completed) {
        g.completed = false;
        if (g.error.empty())
          g.error = r.error;
      }
    }
    groups.push_back(std::move(g));
  }
  return groups;
}

AggregateStats aggregate(std::span<const double> values) {
  if (values.size() < 2)
    throw ConfigError("aggregate: at least two values are required");
  const double n = static_cast<double>(values.size());
  double sum = 0.0;
  for (double v : values)
    sum += v;
  AggregateStats s;
  s.mean = sum / n;
  double ss = 0.0;
  for (double v : values)
    ss += (v - s.mean) * (v - s.mean);
  s.stddev = std::sqrt(ss / n);
  s.sample_stddev = std::sqrt(ss / (n - 1.0));
  if (s.mean != 0.0)
    s.cv_percent = 100.0 * s.stddev / s.mean;
  return s;
}

} // namespace mdeopt
