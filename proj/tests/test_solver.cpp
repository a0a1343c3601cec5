// Copyright 2026 The nlhomog Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Dense>
#include <random>

#include "nlhomog/solver.hpp"

using namespace nlh;

namespace {

GridFunction random_function(const Grid& g, std::mt19937_64& rng) {
  std::normal_distribution<double> n(0.0, 1.0);
  GridFunction u(g);
  for (double& v : u.values) v = n(rng);
  return u;
}

// Dense Cholesky solve of (m - L) u = f built from the operator entries.
GridFunction direct_solve(const NonlocalOperator& op, const GridFunction& f, double m) {
  const std::size_t n = op.size();
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(Eigen::Index(n), Eigen::Index(n));
  for (std::size_t i = 0; i < n; ++i) {
    double diag = m + op.kappa()[i];
    for (std::size_t j = 0; j < n; ++j) {
      if (i == j) continue;
      A(Eigen::Index(i), Eigen::Index(j)) = -op.weight(i, j);
      diag += op.weight(i, j);
    }
    A(Eigen::Index(i), Eigen::Index(i)) = diag;
  }
  Eigen::VectorXd b = Eigen::Map<const Eigen::VectorXd>(f.values.data(), Eigen::Index(n));
  Eigen::VectorXd x = A.llt().solve(b);
  return GridFunction(f.grid, std::vector<double>(x.data(), x.data() + n));
}

NonlocalOperator sample_operator(int N) {
  auto k = make_core_tail_kernel(1, 1.2, 0.3);
  return assemble_eps(k, make_sin_product_coefficient(1), 0.125, Grid(1, 4.0, N));
}

}  // namespace

TEST_CASE("zero right-hand side") {
  auto op = sample_operator(64);
  auto rep = resolvent_solve(op, GridFunction(op.grid()), SolveConfig{});
  CHECK(rep.iterations == 0);
  CHECK(rep.converged);
  for (double v : rep.solution.values) CHECK(v == 0.0);
}

TEST_CASE("diagonal system") {
  Grid g(1, 1.0, 16);
  NonlocalOperator zero(g, std::vector<double>(256, 0.0), std::vector<double>(16, 0.0),
                        OperatorMeta{"custom"});
  std::mt19937_64 rng(2);
  auto f = random_function(g, rng);
  SolveConfig cfg;
  cfg.m = 2.0;
  auto rep = resolvent_solve(zero, f, cfg);
  CHECK(rep.iterations == 1);
  for (std::size_t i = 0; i < 16; ++i) CHECK(rep.solution.values[i] == f.values[i] / 2.0);
}

TEST_CASE("agreement with a dense direct solve") {
  std::mt19937_64 rng(3);
  auto op = sample_operator(128);
  for (double m : {0.1, 1.0, 10.0}) {
    auto f = random_function(op.grid(), rng);
    SolveConfig cfg;
    cfg.m = m;
    auto rep = resolvent_solve(op, f, cfg);
    REQUIRE(rep.converged);
    CHECK(rep.rel_residual <= cfg.rel_tol);
    CHECK(rep.resolvent_bound_ok);
    CHECK(rep.l2_norm <= f.l2_norm() / m * (1.0 + cfg.rel_tol));
    auto exact = direct_solve(op, f, m);
    double diff = 0.0;
    for (std::size_t i = 0; i < op.size(); ++i)
      diff = std::max(diff, std::abs(exact.values[i] - rep.solution.values[i]));
    double scale = 0.0;
    for (double v : exact.values) scale = std::max(scale, std::abs(v));
    CHECK(diff <= 1e-8 * scale);
    // First-order condition collapses F to -(f, u) at the minimizer.
    const double F = energy_functional(op, f, m, exact);
    CHECK(F == doctest::Approx(-inner(f, exact)).epsilon(1e-10));
  }
}

TEST_CASE("minimizer and coercivity") {
  std::mt19937_64 rng(4);
  auto op = sample_operator(96);
  auto f = random_function(op.grid(), rng);
  SolveConfig cfg;
  cfg.m = 0.5;
  cfg.record_history = true;
  auto rep = resolvent_solve(op, f, cfg);
  CHECK(energy_functional(op, f, 0.5, GridFunction(op.grid())) == 0.0);
  for (int t = 0; t < 10; ++t) {
    auto v = random_function(op.grid(), rng);
    for (double s : {1e-3, -1e-3}) {
      GridFunction w = rep.solution;
      for (std::size_t i = 0; i < w.values.size(); ++i) w.values[i] += s * v.values[i];
      CHECK(rep.energy <= energy_functional(op, f, 0.5, w));
    }
  }
  const double floor = -f.l2_norm() * f.l2_norm() / 0.5;
  REQUIRE(rep.energy_history.size() == std::size_t(rep.iterations) + 1);
  for (std::size_t k = 0; k < rep.energy_history.size(); ++k) {
    CHECK(rep.energy_history[k] >= floor * (1.0 + 1e-12));
    if (k > 0)
      CHECK(rep.energy_history[k] <= rep.energy_history[k - 1] + 1e-12 * std::abs(floor));
  }
}

TEST_CASE("uniqueness from different initial guesses") {
  std::mt19937_64 rng(6);
  auto op = sample_operator(64);
  auto f = random_function(op.grid(), rng);
  auto guess = random_function(op.grid(), rng);
  SolveConfig cfg;
  auto a = resolvent_solve(op, f, cfg);
  auto b = resolvent_solve(op, f, cfg, &guess);
  double diff = 0.0;
  for (std::size_t i = 0; i < op.size(); ++i)
    diff += std::pow(a.solution.values[i] - b.solution.values[i], 2);
  diff = std::sqrt(diff * op.grid().cell_volume());
  CHECK(diff <= 10.0 * cfg.rel_tol * a.l2_norm);
}

TEST_CASE("fast path solve matches dense solve") {
  std::mt19937_64 rng(8);
  auto op = assemble_effective(KTable::constant(1, 0.5), 2.0, 1.0, Grid(1, 8.0, 512));
  REQUIRE(op.has_convolution());
  auto f = random_function(op.grid(), rng);
  SolveConfig fast, dense;
  dense.fast_path = false;
  auto a = resolvent_solve(op, f, fast), b = resolvent_solve(op, f, dense);
  CHECK(a.converged);
  CHECK(b.converged);
  for (std::size_t i = 0; i < op.size(); ++i)
    CHECK(a.solution.values[i] == doctest::Approx(b.solution.values[i]).scale(a.l2_norm).epsilon(1e-8));
}

TEST_CASE("iteration cap and parameter errors") {
  std::mt19937_64 rng(10);
  auto op = sample_operator(64);
  auto f = random_function(op.grid(), rng);
  SolveConfig cfg;
  cfg.max_iter = 2;
  auto rep = resolvent_solve(op, f, cfg);
  CHECK_FALSE(rep.converged);
  CHECK(rep.iterations == 2);
  SolveConfig bad;
  bad.m = 0.0;
  CHECK_THROWS_AS(resolvent_solve(op, f, bad), Error);
  CHECK_THROWS_AS(resolvent_solve(op, GridFunction(Grid(1, 4.0, 32)), SolveConfig{}), Error);
}
