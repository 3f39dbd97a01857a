// mdeopt - multipopulation differential evolution for multimodal problems
// SPDX-License-Identifier: Apache-2.0

#ifndef MDEOPT_DE_HPP
#define MDEOPT_DE_HPP

#include "mdeopt/types.hpp"

#include <span>
#include <vector>

namespace mdeopt {

/// Control parameters of canonical DE/rand/1/bin.
struct DEParams {
  std::size_t population_size = 30;   // Np
  double amplification = 0.7;         // F
  double crossover = 0.8;             // CR
  std::size_t max_generations = 1000; // Gmax
  double spread_tolerance = 5e-5;     // epsilon

  void validate() const;
};

/// Uniform initialization x(k) = L_k + h (U_k - L_k). Fitness is left unset.
template <UniformSource R>
std::vector<Point> init_population(const Bounds& bounds, std::size_t count, R& rng) {
  if (count == 0)
    throw ConfigError("init_population: count must be at least 1");
  std::vector<Point> pop;
  pop.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    std::vector<double> x(bounds.dim());
    for (std::size_t k = 0; k < x.size(); ++k)
      x[k] = bounds.lower()[k] + rng.uniform() * bounds.width(k);
    pop.emplace_back(std::move(x));
  }
  return pop;
}

/// Mutant v = x_r1 + F (x_r2 - x_r3) with r1, r2, r3 mutually distinct and
/// distinct from `target`. No clipping; feasibility is decided at selection.
template <UniformSource R>
std::vector<double> mutate(std::span<const Point> pop, std::size_t target, double F, R& rng) {
  const std::size_t n = pop.size();
  if (n < 4)
    throw ConfigError("mutate: population needs at least 4 members");
  if (target >= n)
    throw ConfigError("mutate: target index out of range");

  std::size_t r1, r2, r3;
  do { r1 = rng.index(n); } while (r1 == target);
  do { r2 = rng.index(n); } while (r2 == target || r2 == r1);
  do { r3 = rng.index(n); } while (r3 == target || r3 == r1 || r3 == r2);

  const auto& a = pop[r1].coords;
  const auto& b = pop[r2].coords;
  const auto& c = pop[r3].coords;
  std::vector<double> v(a.size());
  for (std::size_t k = 0; k < v.size(); ++k)
    v[k] = a[k] + F * (b[k] - c[k]);
  return v;
}

/// Binomial crossover. One index rnbr is drawn first, then one fresh uniform
/// per coordinate; u(k) = donor(k) when rand(k) <= CR or k == rnbr.
template <UniformSource R>
std::vector<double> crossover(std::span<const double> target, std::span<const double> donor,
                              double CR, R& rng) {
  if (target.size() != donor.size() || target.empty())
    throw ConfigError("crossover: dimension mismatch");
  const std::size_t rnbr = rng.index(target.size());
  std::vector<double> u(target.begin(), target.end());
  for (std::size_t k = 0; k < u.size(); ++k) {
    const double r = rng.uniform();
    if (r <= CR || k == rnbr)
      u[k] = donor[k];
  }
  return u;
}

/// Trial vectors for every member, all built from the same parent snapshot.
/// Draw order per member: mutation indices, rnbr, then rand(k) for each k.
template <UniformSource R>
std::vector<std::vector<double>> make_trials(std::span<const Point> pop, double F, double CR,
                                             R& rng) {
  std::vector<std::vector<double>> trials;
  trials.reserve(pop.size());
  for (std::size_t i = 0; i < pop.size(); ++i) {
    auto v = mutate(pop, i, F, rng);
    trials.push_back(crossover(pop[i].coords, v, CR, rng));
  }
  return trials;
}

/// Greedy selection. An out-of-bounds trial loses without being evaluated;
/// otherwise the trial wins iff f(trial) <= f(target).
Point select_greedy(const Point& target, std::vector<double> trial, Evaluator& objective,
                    const Bounds& bounds);

/// Index of the lowest cached fitness; ties go to the lowest index.
std::size_t best_index(std::span<const Point> pop);

/// Average relative normalized distance of `pop` to `best`. When the scaled
/// norm of `best` is below 1e-12 the mean unscaled distance divided by the
/// domain diagonal is returned instead.
double spreading_measure(std::span<const Point> pop, const Point& best, const Bounds& bounds);

/// Canonical DE/rand/1/bin until G = Gmax or spreading < epsilon.
RunRecord run_de(const Objective& objective, const Bounds& bounds, const DEParams& params,
                 Rng& rng, const TraceSink& trace = {});

} // namespace mdeopt

#endif
