// mdeopt - multipopulation differential evolution for multimodal problems
// SPDX-License-Identifier: Apache-2.0

#include "mdeopt/multipop.hpp"

#include <chrono>
#include <cmath>
#include <exception>
#include <algorithm>
#include <memory>
#include <optional>
#include <thread>

namespace mdeopt {

void MultiParams::validate() const {
  de.validate();
  penalty.validate();
  if (subpop_count < 1)
    throw ConfigError("multipop: subpopulation count must be at least 1");
  if (dewi_tol && !(*dewi_tol > de.spread_tolerance))
    throw ConfigError("multipop: DEwI tolerance must be greater than the spread tolerance");
  if (threads < 1)
    throw ConfigError("multipop: threads must be at least 1");
  if (threads > 1 && anchor_mode != AnchorMode::Synchronous)
    throw ConfigError("multipop: threads > 1 requires synchronous anchor mode");
}

PopulationTensor::PopulationTensor(std::size_t dim, std::size_t np, std::size_t nsp)
    : dim_(dim), np_(np), nsp_(nsp), members_(np * nsp) {
  for (auto& m : members_)
    m.coords.assign(dim, 0.0);
}

Point best_of_subpop(const PopulationTensor& tensor, std::size_t j) {
  const auto members = tensor.subpop(j);
  return members[best_index(members)];
}

double subpop_spreading(const PopulationTensor& tensor, std::size_t j, const Bounds& bounds) {
  const auto members = tensor.subpop(j);
  return spreading_measure(members, members[best_index(members)], bounds);
}

AnchorSet snapshot_anchors(const PopulationTensor& tensor) {
  AnchorSet set;
  set.anchors.reserve(tensor.nsp());
  for (std::size_t j = 0; j < tensor.nsp(); ++j)
    set.anchors.push_back(best_of_subpop(tensor, j).coords);
  return set;
}

void selection_step_toggled(std::span<Point> subpop,
                            std::span<const std::vector<double>> trials, std::size_t j,
                            const AnchorSet& anchors, const PenaltyParams& penalty,
                            const Bounds& bounds, bool toggle, Evaluator& objective) {
  if (trials.size() != subpop.size())
    throw ConfigError("selection: one trial per member is required");

  for (std::size_t i = 0; i < subpop.size(); ++i) {
    if (!bounds.contains(trials[i]))
      continue;
    Point& parent = subpop[i];
    Point trial(trials[i]);
    double trial_value, parent_value;
    if (toggle) {
      trial_value = penalized_objective(objective, trial, j, anchors, penalty);
      parent_value = penalized_objective(objective, parent, j, anchors, penalty);
    } else {
      trial.fitness = objective(trial.coords);
      trial.fresh = true;
      if (!parent.fresh) {
        parent.fitness = objective(parent.coords);
        parent.fresh = true;
      }
      trial_value = trial.fitness;
      parent_value = parent.fitness;
    }
    if (trial_value <= parent_value)
      parent = std::move(trial);
  }
}

namespace {

RunRecord run_multipop(const Objective& objective, const Bounds& bounds,
                       const MultiParams& params, std::uint64_t seed, const TraceSink& trace,
                       Algorithm algorithm) {
  params.validate();
  const auto start = std::chrono::steady_clock::now();

  const std::size_t nsp = params.subpop_count;
  const std::size_t np = params.de.population_size;
  const bool dewi = algorithm == Algorithm::DEwI;
  const double tol = dewi ? *params.dewi_tol : 0.0;

  PopulationTensor tensor(bounds.dim(), np, nsp);
  std::vector<Rng> rngs;
  std::vector<Evaluator> evals;
  for (std::size_t j = 0; j < nsp; ++j) {
    rngs.emplace_back(derive_stream_seed(seed, j));
    evals.emplace_back(objective);
  }
  std::vector<SubpopState> states(nsp);
  std::vector<std::uint64_t> uncached(nsp, np);
  std::vector<std::vector<TraceRow>> pending(nsp);

  RunRecord rec;
  rec.algorithm = algorithm;
  rec.seed = seed;
  rec.generations_used.assign(nsp, 0);

  auto finish = [&] {
    rec.evaluations = 0;
    rec.uncached_evaluations = 0;
    for (std::size_t j = 0; j < nsp; ++j) {
      rec.evaluations += evals[j].count();
      rec.uncached_evaluations += uncached[j];
    }
    rec.final_bests.clear();
    for (std::size_t j = 0; j < nsp; ++j) {
      Point b = best_of_subpop(tensor, j);
      if (b.fresh)
        rec.final_bests.push_back(std::move(b));
    }
    rec.elapsed_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  };

  const AnchorSet no_anchors;

  auto step = [&](std::size_t j, std::size_t g, const AnchorSet* shared) {
    SubpopState& st = states[j];
    const auto members = tensor.subpop(j);
    st.best = members[best_index(members)];
    const double spread = spreading_measure(members, st.best, bounds);
    st.last_spreading = spread;
    if (spread < params.de.spread_tolerance) {
      st.frozen = true;
      pending[j].push_back({g, j, st.best, spread});
      return;
    }

    st.deflation_active = !dewi || spread >= tol;
    AnchorSet local;
    const AnchorSet* anchors = &no_anchors;
    if (st.deflation_active) {
      if (shared) {
        anchors = shared;
      } else {
        local = snapshot_anchors(tensor);
        anchors = &local;
      }
    }

    const auto trials = make_trials(std::span<const Point>(members), params.de.amplification,
                                    params.de.crossover, rngs[j]);
    const auto before = evals[j].count();
    selection_step_toggled(members, trials, j, *anchors, params.penalty, bounds,
                           st.deflation_active, evals[j]);
    uncached[j] += 2 * (evals[j].count() - before) + np;
    ++rec.generations_used[j];
    st.best = best_of_subpop(tensor, j);
    pending[j].push_back({g, j, st.best, spread});
  };

  auto flush_trace = [&] {
    for (auto& rows : pending) {
      if (trace) {
        for (const auto& r : rows)
          trace(r);
      }
      rows.clear();
    }
  };

  try {
    for (std::size_t j = 0; j < nsp; ++j) {
      auto init = init_population(bounds, np, rngs[j]);
      auto members = tensor.subpop(j);
      for (std::size_t i = 0; i < np; ++i) {
        init[i].fitness = evals[j](init[i].coords);
        init[i].fresh = true;
        members[i] = std::move(init[i]);
      }
    }

    for (std::size_t g = 1; g <= params.de.max_generations; ++g) {
      bool all_frozen = true;
      for (const auto& st : states)
        all_frozen = all_frozen && st.frozen;
      if (all_frozen)
        break;
      tensor.generation = g;

      std::optional<AnchorSet> shared;
      if (params.anchor_mode == AnchorMode::Synchronous)
        shared = snapshot_anchors(tensor);
      const AnchorSet* shared_ptr = shared ? &*shared : nullptr;

      if (params.threads > 1 && nsp > 1) {
        const std::size_t workers = std::min(params.threads, nsp);
        std::vector<std::exception_ptr> errors(nsp);
        {
          std::vector<std::jthread> pool;
          for (std::size_t t = 0; t < workers; ++t) {
            pool.emplace_back([&, t] {
              for (std::size_t j = t; j < nsp; j += workers) {
                if (states[j].frozen)
                  continue;
                try {
                  step(j, g, shared_ptr);
                } catch (...) {
                  errors[j] = std::current_exception();
                }
              }
            });
          }
        }
        for (auto& e : errors) {
          if (e)
            std::rethrow_exception(e);
        }
      } else {
        for (std::size_t j = 0; j < nsp; ++j) {
          if (!states[j].frozen)
            step(j, g, shared_ptr);
        }
      }
      flush_trace();
    }
  } catch (EvaluationError& e) {
    flush_trace();
    finish();
    rec.completed = false;
    rec.error = e.what();
    e.partial = std::make_shared<RunRecord>(rec);
    throw;
  }

  finish();
  return rec;
}

} // namespace

RunRecord run_mde_itmf(const Objective& objective, const Bounds& bounds,
                       const MultiParams& params, std::uint64_t seed, const TraceSink& trace) {
  if (params.dewi_tol)
    throw ConfigError("MDE-ITMF: the DEwI tolerance must be absent");
  return run_multipop(objective, bounds, params, seed, trace, Algorithm::MdeItmf);
}

RunRecord run_dewi(const Objective& objective, const Bounds& bounds, const MultiParams& params,
                   std::uint64_t seed, const TraceSink& trace) {
  if (!params.dewi_tol)
    throw ConfigError("DEwI: a tolerance is required");
  return run_multipop(objective, bounds, params, seed, trace, Algorithm::DEwI);
}

} // namespace mdeopt
