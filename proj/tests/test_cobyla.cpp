#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "wigner/cobyla.hpp"
#include "wigner/errors.hpp"

using namespace wigner;

namespace {

double sphere(std::span<const double> x) {
  double s = 0.0;
  for (double v : x) s += v * v;
  return s;
}

}  // namespace

TEST_CASE("12-dimensional sphere") {
  OptimizerConfig cfg;
  cfg.max_evaluations = 2000;
  const auto r = cobyla_minimize(sphere, std::vector<double>(12, 1.0), cfg);
  CHECK(r.f <= 1e-6);
  CHECK(r.evaluations <= 2000);
  CHECK(r.converged);
  CHECK(static_cast<int>(r.history.size()) == r.evaluations);
}

TEST_CASE("one-dimensional quadratic") {
  const auto r = cobyla_minimize([](std::span<const double> x) { return (x[0] - 3.0) * (x[0] - 3.0); }, {0.0}, {});
  CHECK(std::abs(r.x[0] - 3.0) <= 1e-4);
  CHECK(r.converged);
}

TEST_CASE("constant objective stalls at the start point") {
  for (std::size_t n : {1u, 4u, 12u}) {
    const std::vector<double> x0(n, 0.25);
    const auto r = cobyla_minimize([](std::span<const double>) { return 7.0; }, x0, {});
    CHECK(r.x == x0);
    CHECK(r.f == 7.0);
    CHECK(r.evaluations <= static_cast<int>(n) + 2);
  }
}

TEST_CASE("shifted, scaled quadratic reaches its minimiser") {
  const std::vector<double> centre{0.3, -1.7, 2.2, 0.05, -0.6};
  const std::vector<double> weight{1.0, 4.0, 0.5, 9.0, 2.0};
  auto f = [&](std::span<const double> x) {
    double s = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) s += weight[i] * (x[i] - centre[i]) * (x[i] - centre[i]);
    return s;
  };
  const auto r = cobyla_minimize(f, std::vector<double>(5, 0.0), {});
  for (std::size_t i = 0; i < 5; ++i) CHECK(std::abs(r.x[i] - centre[i]) <= 1e-4);
}

TEST_CASE("Rosenbrock in two dimensions") {
  auto f = [](std::span<const double> x) {
    return 100.0 * (x[1] - x[0] * x[0]) * (x[1] - x[0] * x[0]) + (1.0 - x[0]) * (1.0 - x[0]);
  };
  OptimizerConfig cfg;
  cfg.rho_end = 1e-8;
  cfg.max_evaluations = 100000;
  const auto r = cobyla_minimize(f, {-1.2, 1.0}, cfg);
  CHECK(std::abs(r.x[0] - 1.0) <= 1e-3);
  CHECK(std::abs(r.x[1] - 1.0) <= 2e-3);
  CHECK(r.converged);
}

TEST_CASE("best-seen contract on rugged objectives") {
  std::mt19937_64 rng(13);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  for (int trial = 0; trial < 25; ++trial) {
    const std::size_t n = 1 + static_cast<std::size_t>(trial % 6);
    std::vector<double> x0(n);
    for (double& v : x0) v = u(rng);
    const double a = u(rng), b = 3.0 + u(rng);
    auto f = [&](std::span<const double> x) {
      double s = 0.0;
      for (double v : x) s += std::sin(b * v) + a * v * v + 0.1 * std::cos(7.0 * v);
      return s;
    };
    OptimizerConfig cfg;
    cfg.max_evaluations = 300;
    const auto r = cobyla_minimize(f, x0, cfg);
    CHECK(r.f <= f(x0));
    CHECK(r.f == f(r.x));
    CHECK(r.f == *std::min_element(r.history.begin(), r.history.end()));
    CHECK(r.history.front() == f(x0));
    CHECK(r.evaluations <= 300);
  }
}

TEST_CASE("evaluation cap") {
  OptimizerConfig cfg;
  cfg.max_evaluations = 20;
  cfg.rho_end = 1e-12;
  const auto r = cobyla_minimize(sphere, std::vector<double>(12, 1.0), cfg);
  CHECK(r.evaluations == 20);
  CHECK_FALSE(r.converged);
}

TEST_CASE("determinism") {
  auto f = [](std::span<const double> x) { return std::cos(x[0]) * std::sin(2 * x[1]) + 0.1 * x[2] * x[2]; };
  const auto a = cobyla_minimize(f, {0.1, 0.2, 0.3}, {});
  const auto b = cobyla_minimize(f, {0.1, 0.2, 0.3}, {});
  CHECK(a.x == b.x);
  CHECK(a.history == b.history);
}

TEST_CASE("errors") {
  OptimizerConfig bad;
  bad.rho_end = 1.0;
  CHECK_THROWS_AS(cobyla_minimize(sphere, {1.0}, bad), DomainError);
  OptimizerConfig tiny;
  tiny.max_evaluations = 3;
  CHECK_THROWS_AS(cobyla_minimize(sphere, {1.0, 2.0}, tiny), DomainError);
  CHECK_THROWS_AS(cobyla_minimize(sphere, {}, {}), DomainError);
  const double nan = std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_AS(cobyla_minimize([&](std::span<const double> x) { return x[0] > 0.6 ? nan : x[0]; }, {0.5}, {}),
                  OptimizerError);
}
