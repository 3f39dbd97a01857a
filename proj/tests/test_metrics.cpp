// mdeopt - multipopulation differential evolution for multimodal problems
// SPDX-License-Identifier: Apache-2.0

#include "mdeopt/benchmarks.hpp"
#include "mdeopt/metrics.hpp"

#include <doctest.h>

#include <cmath>

using namespace mdeopt;

namespace {

std::vector<Point> bests(std::initializer_list<std::vector<double>> xs) {
  std::vector<Point> out;
  for (const auto& x : xs)
    out.emplace_back(x, 0.0);
  return out;
}

RunRecord de_record(std::vector<double> best, std::uint64_t nfe, double et) {
  RunRecord r;
  r.evaluations = nfe;
  r.uncached_evaluations = 3 * nfe;
  r.elapsed_seconds = et;
  r.generations_used = {nfe / 10};
  r.final_bests.emplace_back(std::move(best), 0.0);
  return r;
}

} // namespace

TEST_CASE("match_minimizers on Himmelblau") {
  const auto& b1 = get_problem("B1");

  std::vector<Point> exact;
  for (const auto& m : b1.known_minimizers)
    exact.emplace_back(m, 0.0);
  CHECK(count_ngp(exact, b1) == 4);

  CHECK(count_ngp(bests({{3, 2}, {3, 2}, {3, 2}, {3, 2}}), b1) == 1);

  const auto near = bests({{3.02, 2.01}, {100, 100}});
  CHECK(std::hypot(0.02, 0.01) == doctest::Approx(0.0224).epsilon(1e-3));
  CHECK(count_ngp(near, b1) == 1);
  CHECK(match_minimizers(near, b1.known_minimizers, 0.05) == std::vector<std::size_t>{0});

  CHECK(count_ngp(bests({{3.05, 2.0}}), b1) == 1);
  CHECK(count_ngp(bests({{3.0500001, 2.0}}), b1) == 0);
  CHECK(count_ngp({}, b1) == 0);
}

TEST_CASE("group_de_runs") {
  std::vector<RunRecord> records;
  for (int g = 0; g < 100; ++g)
    for (int m = 0; m < 4; ++m)
      records.push_back(de_record({3, 2}, 100 + m, 0.5));

  const auto groups = group_de_runs(records, 4);
  CHECK(groups.size() == 100);
  const auto& b1 = get_problem("B1");
  for (const auto& g : groups) {
    CHECK(g.evaluations == 100 + 101 + 102 + 103);
    CHECK(g.uncached_evaluations == 3 * g.evaluations);
    CHECK(g.elapsed_seconds == doctest::Approx(2.0));
    CHECK(g.final_bests.size() == 4);
    CHECK(g.generations_used.size() == 4);
    CHECK(count_ngp(g.final_bests, b1) == 1);
    CHECK(g.completed);
  }

  records[5].completed = false;
  records[5].error = "boom";
  const auto flagged = group_de_runs(records, 4);
  CHECK_FALSE(flagged[1].completed);
  CHECK(flagged[1].error == "boom");
  CHECK(flagged[0].completed);

  CHECK_THROWS_AS(group_de_runs(records, 3), ConfigError);
  CHECK_THROWS_AS(group_de_runs(records, 0), ConfigError);
}

TEST_CASE("aggregate") {
  SUBCASE("constant values") {
    const std::vector<double> v{2, 2, 2, 2};
    const auto s = aggregate(v);
    CHECK(s.mean == 2.0);
    CHECK(s.stddev == 0.0);
    REQUIRE(s.cv_percent);
    CHECK(*s.cv_percent == 0.0);
  }
  SUBCASE("population standard deviation") {
    const std::vector<double> v{0, 4};
    const auto s = aggregate(v);
    CHECK(s.mean == 2.0);
    CHECK(s.stddev == 2.0);
    CHECK(s.sample_stddev == doctest::Approx(std::sqrt(8.0)));
    REQUIRE(s.cv_percent);
    CHECK(*s.cv_percent == 100.0);
  }
  SUBCASE("all-four NGP list has zero spread") {
    const std::vector<double> v(100, 4.0);
    CHECK(aggregate(v).stddev == 0.0);
  }
  SUBCASE("zero mean leaves the coefficient of variation undefined") {
    const std::vector<double> v{-1, 1};
    CHECK_FALSE(aggregate(v).cv_percent.has_value());
  }
  SUBCASE("fewer than two values are refused") {
    CHECK_THROWS_AS(aggregate(std::vector<double>{1.0}), ConfigError);
    CHECK_THROWS_AS(aggregate(std::vector<double>{}), ConfigError);
  }
}
