// mdeopt - multipopulation differential evolution for multimodal problems
// SPDX-License-Identifier: Apache-2.0

#ifndef MDEOPT_DEFLATION_HPP
#define MDEOPT_DEFLATION_HPP

#include "mdeopt/types.hpp"

#include <functional>
#include <span>
#include <vector>

namespace mdeopt {

/// Repulsion strength (objective units) and radius (search-space units).
/// The magnitude should dominate the objective's range near the minima;
/// this is guidance only and is not checked.
struct PenaltyParams {
  double magnitude = 2e3; // beta
  double radius = 2.0;    // rho

  void validate() const;
};

/// Best point of every subpopulation, one anchor per subpopulation index.
struct AnchorSet {
  std::vector<std::vector<double>> anchors;

  std::size_t size() const { return anchors.size(); }
};

/// 1 when delta <= radius, else 0. The boundary belongs to the penalty region.
int indicator(double delta, double radius);

/// beta * sum over foreign anchors of exp(-|x - s|) * indicator(|x - s|).
/// The anchor at index `own` is skipped by index, never by value.
double penalty_term(std::span<const double> x, std::size_t own, const AnchorSet& anchors,
                    const PenaltyParams& params);

/// Base objective plus penalty_term. The base value is taken from the point's
/// cache when fresh; otherwise it is evaluated once and cached.
double penalized_objective(Evaluator& base, Point& x, std::size_t own, const AnchorSet& anchors,
                           const PenaltyParams& params);

using Residual = std::function<double(std::span<const double>)>;

struct NonlinearSystem {
  std::vector<Residual> residuals;
};

/// Sum of squared residuals. Zero exactly at roots of the system.
Objective residual_objective(NonlinearSystem system);

} // namespace mdeopt

#endif
