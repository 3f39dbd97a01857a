// mdeopt - multipopulation differential evolution for multimodal problems
// SPDX-License-Identifier: Apache-2.0

#include "mdeopt/deflation.hpp"

#include <cmath>

namespace mdeopt {

void PenaltyParams::validate() const {
  if (!(magnitude > 0.0) || !std::isfinite(magnitude))
    throw ConfigError("penalty: magnitude beta must be positive");
  if (!(radius > 0.0) || !std::isfinite(radius))
    throw ConfigError("penalty: radius rho must be positive");
}

int indicator(double delta, double radius) { return delta <= radius ? 1 : 0; }

double penalty_term(std::span<const double> x, std::size_t own, const AnchorSet& anchors,
                    const PenaltyParams& params) {
  double sum = 0.0;
  for (std::size_t kappa = 0; kappa < anchors.size(); ++kappa) {
    if (kappa == own)
      continue;
    const auto& s = anchors.anchors[kappa];
    if (s.size() != x.size())
      throw ConfigError("penalty: anchor dimension does not match the point");
    double acc = 0.0;
    for (std::size_t k = 0; k < x.size(); ++k)
      acc += (x[k] - s[k]) * (x[k] - s[k]);
    const double delta = std::sqrt(acc);
    if (indicator(delta, params.radius))
      sum += std::exp(-delta);
  }
  return params.magnitude * sum;
}

double penalized_objective(Evaluator& base, Point& x, std::size_t own, const AnchorSet& anchors,
                           const PenaltyParams& params) {
  const double penalty = penalty_term(x.coords, own, anchors, params);
  if (!x.fresh) {
    x.fitness = base(x.coords);
    x.fresh = true;
  }
  return x.fitness + penalty;
}

Objective residual_objective(NonlinearSystem system) {
  if (system.residuals.empty())
    throw ConfigError("nonlinear system needs at least one residual");
  return [sys = std::move(system)](std::span<const double> x) {
    double s = 0.0;
    for (const auto& f : sys.residuals) {
      const double r = f(x);
      s += r * r;
    }
    return s;
  };
}

} // namespace mdeopt
