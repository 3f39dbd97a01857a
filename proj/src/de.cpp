// mdeopt - multipopulation differential evolution for multimodal problems
// SPDX-License-Identifier: Apache-2.0

#include "mdeopt/de.hpp"

#include <chrono>
#include <cmath>
#include <memory>

namespace mdeopt {

void DEParams::validate() const {
  if (population_size < 4)
    throw ConfigError("DE: population size must be at least 4");
  if (!(amplification >= 0.0 && amplification <= 1.0))
    throw ConfigError("DE: amplification F must lie in [0, 1]");
  if (!(crossover >= 0.0 && crossover <= 1.0))
    throw ConfigError("DE: crossover CR must lie in [0, 1]");
  if (max_generations < 1)
    throw ConfigError("DE: max generations must be at least 1");
  if (!(spread_tolerance > 0.0) || !std::isfinite(spread_tolerance))
    throw ConfigError("DE: spread tolerance must be positive");
}

Point select_greedy(const Point& target, std::vector<double> trial, Evaluator& objective,
                    const Bounds& bounds) {
  Point parent = target;
  if (!parent.fresh) {
    parent.fitness = objective(parent.coords);
    parent.fresh = true;
  }
  if (!bounds.contains(trial))
    return parent;
  const double f = objective(trial);
  if (f <= parent.fitness)
    return Point(std::move(trial), f);
  return parent;
}

std::size_t best_index(std::span<const Point> pop) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < pop.size(); ++i) {
    if (pop[i].fitness < pop[best].fitness)
      best = i;
  }
  return best;
}

double spreading_measure(std::span<const Point> pop, const Point& best, const Bounds& bounds) {
  if (pop.empty())
    return 0.0;
  const std::size_t d = bounds.dim();

  double scaled_norm = 0.0;
  for (std::size_t k = 0; k < d; ++k) {
    const double s = best.coords[k] / bounds.width(k);
    scaled_norm += s * s;
  }
  scaled_norm = std::sqrt(scaled_norm);

  const bool degenerate = scaled_norm < 1e-12;
  double total = 0.0;
  for (const auto& p : pop) {
    double acc = 0.0;
    for (std::size_t k = 0; k < d; ++k) {
      double diff = p.coords[k] - best.coords[k];
      if (!degenerate)
        diff /= bounds.width(k);
      acc += diff * diff;
    }
    total += std::sqrt(acc);
  }
  const double mean = total / static_cast<double>(pop.size());
  return degenerate ? mean / bounds.diagonal() : mean / scaled_norm;
}

RunRecord run_de(const Objective& objective, const Bounds& bounds, const DEParams& params,
                 Rng& rng, const TraceSink& trace) {
  params.validate();
  const auto start = std::chrono::steady_clock::now();

  RunRecord rec;
  rec.algorithm = Algorithm::DE;
  rec.seed = rng.seed();
  rec.generations_used = {0};

  Evaluator eval(objective);
  std::vector<Point> pop;

  auto finish = [&] {
    rec.evaluations = eval.count();
    rec.final_bests.clear();
    if (!pop.empty() && pop[best_index(pop)].fresh)
      rec.final_bests.push_back(pop[best_index(pop)]);
    rec.elapsed_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  };

  try {
    pop = init_population(bounds, params.population_size, rng);
    for (auto& p : pop) {
      p.fitness = eval(p.coords);
      p.fresh = true;
    }
    rec.uncached_evaluations = pop.size();

    for (std::size_t g = 1; g <= params.max_generations; ++g) {
      const Point& best = pop[best_index(pop)];
      const double spread = spreading_measure(pop, best, bounds);
      if (spread < params.spread_tolerance) {
        if (trace)
          trace({g, 0, best, spread});
        break;
      }

      auto trials = make_trials(std::span<const Point>(pop), params.amplification,
                                params.crossover, rng);
      const auto before = eval.count();
      for (std::size_t i = 0; i < pop.size(); ++i)
        pop[i] = select_greedy(pop[i], std::move(trials[i]), eval, bounds);
      rec.uncached_evaluations += 2 * (eval.count() - before) + pop.size();
      ++rec.generations_used[0];

      if (trace)
        trace({g, 0, pop[best_index(pop)], spread});
    }
  } catch (EvaluationError& e) {
    finish();
    rec.completed = false;
    rec.error = e.what();
    e.partial = std::make_shared<RunRecord>(rec);
    throw;
  }

  finish();
  return rec;
}

} // namespace mdeopt
