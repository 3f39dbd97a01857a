// mdeopt - multipopulation differential evolution for multimodal problems
// SPDX-License-Identifier: Apache-2.0

#ifndef MDEOPT_MULTIPOP_HPP
#define MDEOPT_MULTIPOP_HPP

#include "mdeopt/de.hpp"
#include "mdeopt/deflation.hpp"
#include "mdeopt/types.hpp"

#include <optional>
#include <span>
#include <vector>

namespace mdeopt {

/// When the anchors used by subpopulation j are taken.
///  - Sequential: right before j's update, so earlier subpopulations of the
///    same generation are already advanced.
///  - Synchronous: once per generation for all j; required for threads > 1.
enum class AnchorMode { Sequential, Synchronous };

struct MultiParams {
  DEParams de;
  PenaltyParams penalty;
  std::size_t subpop_count = 4;
  std::optional<double> dewi_tol;
  AnchorMode anchor_mode = AnchorMode::Sequential;
  std::size_t threads = 1;

  void validate() const;
};

/// d x Np x Nsp population. Individual i of subpopulation j lives at
/// members[j * Np + i]; coordinate k of it is at(k, i, j).
class PopulationTensor {
public:
  PopulationTensor(std::size_t dim, std::size_t np, std::size_t nsp);

  std::size_t dim() const { return dim_; }
  std::size_t np() const { return np_; }
  std::size_t nsp() const { return nsp_; }

  double at(std::size_t k, std::size_t i, std::size_t j) const {
    return members_[j * np_ + i].coords[k];
  }
  std::span<Point> subpop(std::size_t j) { return {members_.data() + j * np_, np_}; }
  std::span<const Point> subpop(std::size_t j) const {
    return {members_.data() + j * np_, np_};
  }

  std::size_t generation = 0;

private:
  std::size_t dim_, np_, nsp_;
  std::vector<Point> members_;
};

struct SubpopState {
  bool frozen = false;
  bool deflation_active = true;
  double last_spreading = 0.0;
  Point best;
};

/// Argmin of the cached base fitness in subpopulation j, lowest index on ties.
Point best_of_subpop(const PopulationTensor& tensor, std::size_t j);

double subpop_spreading(const PopulationTensor& tensor, std::size_t j, const Bounds& bounds);

AnchorSet snapshot_anchors(const PopulationTensor& tensor);

/// Selection for one subpopulation. Out-of-bounds trials are dropped without
/// evaluation. In-bounds trials are compared through penalized_objective when
/// `toggle` is set and through the base objective otherwise; the trial wins
/// ties. Each in-bounds trial costs exactly one base evaluation.
void selection_step_toggled(std::span<Point> subpop,
                            std::span<const std::vector<double>> trials, std::size_t j,
                            const AnchorSet& anchors, const PenaltyParams& penalty,
                            const Bounds& bounds, bool toggle, Evaluator& objective);

/// Per-subpopulation stream of a run: Rng(derive_stream_seed(seed, j)).
RunRecord run_mde_itmf(const Objective& objective, const Bounds& bounds,
                       const MultiParams& params, std::uint64_t seed,
                       const TraceSink& trace = {});

RunRecord run_dewi(const Objective& objective, const Bounds& bounds, const MultiParams& params,
                   std::uint64_t seed, const TraceSink& trace = {});

} // namespace mdeopt

#endif
