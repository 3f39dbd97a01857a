// mdeopt - multipopulation differential evolution for multimodal problems
// SPDX-License-Identifier: Apache-2.0

#include "mdeopt/types.hpp"

#include <cctype>
#include <cmath>
#include <string>

namespace mdeopt {

Bounds::Bounds(std::vector<double> lower, std::vector<double> upper)
    : lower_(std::move(lower)), upper_(std::move(upper)) {
  if (lower_.empty() || lower_.size() != upper_.size())
    throw ConfigError("bounds: lower and upper must be non-empty and of equal length");
  for (std::size_t k = 0; k < lower_.size(); ++k) {
    if (!std::isfinite(lower_[k]) || !std::isfinite(upper_[k]) || !(lower_[k] < upper_[k]))
      throw ConfigError("bounds: need finite L_k < U_k in dimension " + std::to_string(k));
  }
}

double Bounds::diagonal() const {
  double s = 0.0;
  for (std::size_t k = 0; k < dim(); ++k)
    s += width(k) * width(k);
  return std::sqrt(s);
}

bool Bounds::contains(std::span<const double> x) const {
  if (x.size() != dim())
    return false;
  for (std::size_t k = 0; k < x.size(); ++k) {
    if (x[k] < lower_[k] || x[k] > upper_[k])
      return false;
  }
  return true;
}

std::size_t Rng::index(std::size_t n) {
  // Lemire's multiply-shift with rejection; unbiased.
  const std::uint64_t range = n;
  unsigned __int128 m = static_cast<unsigned __int128>(engine_()) * range;
  auto low = static_cast<std::uint64_t>(m);
  if (low < range) {
    const std::uint64_t threshold = (0 - range) % range;
    while (low < threshold) {
      m = static_cast<unsigned __int128>(engine_()) * range;
      low = static_cast<std::uint64_t>(m);
    }
  }
  return static_cast<std::size_t>(m >> 64);
}

std::uint64_t derive_stream_seed(std::uint64_t run_seed, std::size_t stream) {
  std::uint64_t z = run_seed + (static_cast<std::uint64_t>(stream) + 1) * 0x9E3779B97F4A7C15ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

double Evaluator::operator()(std::span<const double> x) {
  ++count_;
  const double v = (*f_)(x);
  if (!std::isfinite(v))
    throw EvaluationError("objective returned a non-finite value", {x.begin(), x.end()});
  return v;
}

std::string_view to_string(Algorithm a) {
  switch (a) {
  case Algorithm::DE: return "de";
  case Algorithm::MdeItmf: return "mde-itmf";
  case Algorithm::DEwI: return "dewi";
  }
  return "?";
}

Algorithm parse_algorithm(std::string_view s) {
  std::string t;
  for (char c : s) {
    if (c != '-' && c != '_')
      t.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
  }
  if (t == "de")
    return Algorithm::DE;
  if (t == "mdeitmf")
    return Algorithm::MdeItmf;
  if (t == "dewi")
    return Algorithm::DEwI;
  throw ConfigError("unknown algorithm '" + std::string(s) + "' (expected de, mde-itmf, dewi)");
}

} // namespace mdeopt
