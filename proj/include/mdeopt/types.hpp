// mdeopt - multipopulation differential evolution for multimodal problems
// SPDX-License-Identifier: Apache-2.0

#ifndef MDEOPT_TYPES_HPP
#define MDEOPT_TYPES_HPP

#include <concepts>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <memory>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace mdeopt {

/// Raised for invalid parameters, bounds or configuration values.
class ConfigError : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

class UnknownProblemError : public ConfigError {
public:
  using ConfigError::ConfigError;
};

/// Raised by output emission; carries the offending path in the message.
class IoError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

struct RunRecord;

/// The objective returned a non-finite value. `point` is where it happened;
/// engines attach the record accumulated up to the failure.
class EvaluationError : public std::runtime_error {
public:
  EvaluationError(const std::string& what, std::vector<double> point)
      : std::runtime_error(what), point(std::move(point)) {}

  std::vector<double> point;
  std::shared_ptr<const RunRecord> partial;
};

using Objective = std::function<double(std::span<const double>)>;

struct Point {
  std::vector<double> coords;
  double fitness = std::numeric_limits<double>::quiet_NaN();
  bool fresh = false;

  Point() = default;
  explicit Point(std::vector<double> c) : coords(std::move(c)) {}
  Point(std::vector<double> c, double f) : coords(std::move(c)), fitness(f), fresh(true) {}

  std::size_t dim() const { return coords.size(); }
};

/// Box domain L_k <= x(k) <= U_k.
class Bounds {
public:
  Bounds(std::vector<double> lower, std::vector<double> upper);

  std::size_t dim() const { return lower_.size(); }
  const std::vector<double>& lower() const { return lower_; }
  const std::vector<double>& upper() const { return upper_; }
  double width(std::size_t k) const { return upper_[k] - lower_[k]; }
  double diagonal() const;
  bool contains(std::span<const double> x) const;

private:
  std::vector<double> lower_;
  std::vector<double> upper_;
};

/// Anything that can hand out uniform reals in [0,1) and indices in [0,n).
template <typename R>
concept UniformSource = requires(R& r, std::size_t n) {
  { r.uniform() } -> std::convertible_to<double>;
  { r.index(n) } -> std::convertible_to<std::size_t>;
};

/// Seedable stream over mt19937_64. Draws are built from raw engine output
/// only, so sequences are identical across standard libraries.
class Rng {
public:
  explicit Rng(std::uint64_t seed) : engine_(seed), seed_(seed) {}

  std::uint64_t seed() const { return seed_; }
  std::uint64_t next() { return engine_(); }
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  std::size_t index(std::size_t n);

private:
  std::mt19937_64 engine_;
  std::uint64_t seed_;
};

/// Seed of stream `stream` for a run seeded with `run_seed`:
/// splitmix64(run_seed + (stream + 1) * 0x9E3779B97F4A7C15).
std::uint64_t derive_stream_seed(std::uint64_t run_seed, std::size_t stream);

/// Wraps an objective, counts calls and rejects non-finite values. The
/// objective is held by reference and must outlive the evaluator.
class Evaluator {
public:
  explicit Evaluator(const Objective& f) : f_(&f) {}
  explicit Evaluator(Objective&&) = delete;

  double operator()(std::span<const double> x);
  std::uint64_t count() const { return count_; }

private:
  const Objective* f_;
  std::uint64_t count_ = 0;
};

enum class Algorithm { DE, MdeItmf, DEwI };

std::string_view to_string(Algorithm a);
Algorithm parse_algorithm(std::string_view s);

struct RunRecord {
  Algorithm algorithm = Algorithm::DE;
  std::string problem_id;
  std::uint64_t seed = 0;
  double elapsed_seconds = 0.0;
  std::uint64_t evaluations = 0;
  // Base calls an implementation without fitness caching would make: parent
  // and trial re-scored on every comparison plus a full re-evaluation of each
  // updated population per generation. Informational only.
  std::uint64_t uncached_evaluations = 0;
  std::vector<Point> final_bests;
  std::vector<std::size_t> generations_used;
  std::vector<std::size_t> matched_minimizers;
  bool completed = true;
  std::string error;
};

/// One row of the per-generation trace.
struct TraceRow {
  std::size_t generation = 0;
  std::size_t subpop = 0;
  Point best;
  double spreading = 0.0;
};

using TraceSink = std::function<void(const TraceRow&)>;

} // namespace mdeopt

#endif
