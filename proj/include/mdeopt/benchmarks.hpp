// mdeopt - multipopulation differential evolution for multimodal problems
// SPDX-License-Identifier: Apache-2.0

#ifndef MDEOPT_BENCHMARKS_HPP
#define MDEOPT_BENCHMARKS_HPP

#include "mdeopt/deflation.hpp"
#include "mdeopt/multipop.hpp"
#include "mdeopt/types.hpp"

#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace mdeopt {

/// A two-dimensional multimodal test problem with its known global
/// minimizers and tuned default parameters.
struct BenchmarkProblem {
  std::string id;      // "B1".."B10"
  std::string name;
  std::string formula; // exact expression evaluated, for provenance
  Objective objective;
  Bounds bounds;
  std::vector<std::vector<double>> known_minimizers;
  double global_value = 0.0;
  MultiParams default_params;
  double match_tolerance = 0.05;
};

/// Lookup by id ("B4", case-insensitive) or by name ("Cross-in-tray",
/// case- and punctuation-insensitive). Throws ConfigError when unknown.
const BenchmarkProblem& get_problem(std::string_view id_or_name);

/// All ten problems ordered B1..B10.
std::span<const BenchmarkProblem> list_problems();

/// The system behind B7: x^2 + y^2 - 0.5 = 0, x y - 0.1 = 0.
NonlinearSystem default_b7_system();

/// Copy of B7 solving `system` instead of the default one. `roots` become the
/// known minimizers (global value 0).
BenchmarkProblem b7_with_system(NonlinearSystem system, std::vector<std::vector<double>> roots);

} // namespace mdeopt

#endif
