// mdeopt - multipopulation differential evolution for multimodal problems
// SPDX-License-Identifier: Apache-2.0

#include "mdeopt/benchmarks.hpp"

#include <cctype>
#include <cmath>
#include <numbers>
#include <string>

namespace mdeopt {

namespace {

constexpr double pi = std::numbers::pi;

MultiParams table_params(std::size_t np, double F, double CR, std::size_t nsp, double rho) {
  MultiParams p;
  p.de.population_size = np;
  p.de.amplification = F;
  p.de.crossover = CR;
  p.de.max_generations = 1000;
  p.de.spread_tolerance = 5e-5;
  p.subpop_count = nsp;
  p.penalty.magnitude = 2e3;
  p.penalty.radius = rho;
  p.dewi_tol = 5e-4;
  return p;
}

BenchmarkProblem make(std::string id, std::string name, std::string formula,
                      Objective f, Bounds bounds, std::vector<std::vector<double>> minimizers,
                      double global_value, MultiParams params) {
  return BenchmarkProblem{std::move(id),        std::move(name),       std::move(formula),
                          std::move(f),         std::move(bounds),     std::move(minimizers),
                          global_value,         std::move(params),     0.05};
}

// Minimizer coordinates below were polished to ~20 digits by Newton's
// method on the analytic gradient and are verified by the benchmark tests.
std::vector<BenchmarkProblem> build_registry() {
  std::vector<BenchmarkProblem> r;

  r.push_back(make(
      "B1", "Himmelblau", "(x^2+y-11)^2+(x+y^2-7)^2",
      [](std::span<const double> v) {
        const double x = v[0], y = v[1];
        const double a = x * x + y - 11.0, b = x + y * y - 7.0;
        return a * a + b * b;
      },
      Bounds({-6, -6}, {6, 6}),
      {{3.0, 2.0},
       {-2.8051180869527448531, 3.1313125182505729658},
       {-3.7793102533777468919, -3.2831859912861694123},
       {3.5844283403304917449, -1.8481265269644035535}},
      0.0, table_params(30, 0.7, 0.8, 4, 2.0)));

  r.push_back(make(
      "B2", "Trecanni", "x^4+4*x^3+4*x^2+y^2",
      [](std::span<const double> v) {
        const double x = v[0], y = v[1];
        return x * x * x * x + 4.0 * x * x * x + 4.0 * x * x + y * y;
      },
      Bounds({-5, -5}, {5, 5}), {{0.0, 0.0}, {-2.0, 0.0}}, 0.0,
      table_params(15, 0.4, 0.3, 2, 1.0)));

  r.push_back(make(
      "B3", "Six-Hump Camel", "(4-2.1*x^2+x^4/3)*x^2+x*y+(-4+4*y^2)*y^2",
      [](std::span<const double> v) {
        const double x = v[0], y = v[1];
        const double x2 = x * x, y2 = y * y;
        return (4.0 - 2.1 * x2 + x2 * x2 / 3.0) * x2 + x * y + (-4.0 + 4.0 * y2) * y2;
      },
      Bounds({-3, -2}, {3, 2}),
      {{0.089842013100318062456, -0.7126564030207396334},
       {-0.089842013100318062456, 0.7126564030207396334}},
      -1.0316284534898773504, table_params(20, 0.7, 0.8, 2, 0.6)));

  r.push_back(make(
      "B4", "Cross-in-tray",
      "-0.0001*(abs(sin(x)*sin(y)*exp(abs(100-sqrt(x^2+y^2)/pi)))+1)^0.1",
      [](std::span<const double> v) {
        const double x = v[0], y = v[1];
        const double e = std::exp(std::abs(100.0 - std::sqrt(x * x + y * y) / pi));
        return -0.0001 * std::pow(std::abs(std::sin(x) * std::sin(y) * e) + 1.0, 0.1);
      },
      Bounds({-10, -10}, {10, 10}),
      {{1.3494066171539107918, 1.3494066171539107918},
       {-1.3494066171539107918, 1.3494066171539107918},
       {1.3494066171539107918, -1.3494066171539107918},
       {-1.3494066171539107918, -1.3494066171539107918}},
      -2.0626118708227368778, table_params(15, 0.6, 0.7, 4, 0.8)));

  r.push_back(make(
      "B5", "Bird", "sin(x)*exp((1-cos(y))^2)+cos(y)*exp((1-sin(x))^2)+(x-y)^2",
      [](std::span<const double> v) {
        const double x = v[0], y = v[1];
        const double a = 1.0 - std::cos(y), b = 1.0 - std::sin(x);
        return std::sin(x) * std::exp(a * a) + std::cos(y) * std::exp(b * b) + (x - y) * (x - y);
      },
      Bounds({-2 * pi, -2 * pi}, {2 * pi, 2 * pi}),
      {{4.7010431302495530234, 3.1529385037249300727},
       {-1.5821421769300334535, -3.1302468034546564042}},
      -106.76453674926467478, table_params(30, 0.8, 0.7, 2, 3.2)));

  r.push_back(make(
      "B6", "Branin RCOS", "(y-5.1*x^2/(4*pi^2)+5*x/pi-6)^2+10*(1-1/(8*pi))*cos(x)+10",
      [](std::span<const double> v) {
        const double x = v[0], y = v[1];
        const double a = y - 5.1 * x * x / (4.0 * pi * pi) + 5.0 * x / pi - 6.0;
        return a * a + 10.0 * (1.0 - 1.0 / (8.0 * pi)) * std::cos(x) + 10.0;
      },
      Bounds({-5, 0}, {10, 15}), {{-pi, 12.275}, {pi, 2.275}, {3.0 * pi, 2.475}},
      0.39788735772973833942, table_params(25, 0.6, 0.6, 3, 2.0)));

  r.push_back(make("B7", "System of equations", "(x^2+y^2-0.5)^2+(x*y-0.1)^2",
                   residual_objective(default_b7_system()), Bounds({-1, -1}, {1, 1}),
                   {{0.69219129201962083072, 0.14446873451445471726},
                    {0.14446873451445471726, 0.69219129201962083072},
                    {-0.69219129201962083072, -0.14446873451445471726},
                    {-0.14446873451445471726, -0.69219129201962083072}},
                   0.0, table_params(30, 0.6, 0.8, 4, 0.7)));

  r.push_back(make(
      "B8", "Wayburn-Seader #1", "(x^6+y^4-17)^2+(2*x+y-4)^2",
      [](std::span<const double> v) {
        const double x = v[0], y = v[1];
        const double x3 = x * x * x, y2 = y * y;
        const double a = x3 * x3 + y2 * y2 - 17.0, b = 2.0 * x + y - 4.0;
        return a * a + b * b;
      },
      Bounds({-500, -500}, {500, 500}),
      {{1.0, 2.0}, {1.5968041538769333366, 0.80639169224613332683}}, 0.0,
      table_params(20, 0.5, 0.3, 2, 1.1)));

  r.push_back(make(
      "B9", "Wayburn-Seader #2", "(1.613-4*(x-0.3125)^2-4*(y-1.625)^2)^2+(y-1)^2",
      [](std::span<const double> v) {
        const double x = v[0], y = v[1];
        const double a = 1.613 - 4.0 * (x - 0.3125) * (x - 0.3125) - 4.0 * (y - 1.625) * (y - 1.625);
        return a * a + (y - 1.0) * (y - 1.0);
      },
      Bounds({-500, -500}, {500, 500}),
      {{0.20013897472877884068, 1.0}, {0.42486102527122115932, 1.0}}, 0.0,
      table_params(20, 0.4, 0.7, 2, 0.15)));

  r.push_back(make(
      "B10", "Ackley #3", "-200*exp(-0.02*sqrt(x^2+y^2))+5*exp(cos(3*x)+sin(3*y))",
      [](std::span<const double> v) {
        const double x = v[0], y = v[1];
        return -200.0 * std::exp(-0.02 * std::sqrt(x * x + y * y)) +
               5.0 * std::exp(std::cos(3.0 * x) + std::sin(3.0 * y));
      },
      Bounds({-32, -32}, {32, 32}),
      {{0.6825771831515794222, -0.36070186306103734588},
       {-0.6825771831515794222, -0.36070186306103734588}},
      -195.62902826227934336, table_params(20, 0.4, 0.4, 2, 1.1)));

  return r;
}

const std::vector<BenchmarkProblem>& registry() {
  static const std::vector<BenchmarkProblem> problems = build_registry();
  return problems;
}

std::string normalize(std::string_view s) {
  std::string out;
  for (char c : s) {
    if (std::isalnum(static_cast<unsigned char>(c)))
      out.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
  }
  return out;
}

} // namespace

NonlinearSystem default_b7_system() {
  NonlinearSystem sys;
  sys.residuals.push_back([](std::span<const double> v) { return v[0] * v[0] + v[1] * v[1] - 0.5; });
  sys.residuals.push_back([](std::span<const double> v) { return v[0] * v[1] - 0.1; });
  return sys;
}

const BenchmarkProblem& get_problem(std::string_view id_or_name) {
  const std::string key = normalize(id_or_name);
  for (const auto& p : registry()) {
    if (normalize(p.id) == key || normalize(p.name) == key)
      return p;
  }
  throw UnknownProblemError("unknown problem '" + std::string(id_or_name) + "'");
}

std::span<const BenchmarkProblem> list_problems() { return registry(); }

BenchmarkProblem b7_with_system(NonlinearSystem system, std::vector<std::vector<double>> roots) {
  BenchmarkProblem p = get_problem("B7");
  p.formula = "user-supplied nonlinear system (sum of squared residuals)";
  p.objective = residual_objective(std::move(system));
  p.known_minimizers = std::move(roots);
  p.global_value = 0.0;
  return p;
}

} // namespace mdeopt
