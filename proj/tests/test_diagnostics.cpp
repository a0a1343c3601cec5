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

#include <cmath>
#include <random>

#include "nlhomog/diagnostics.hpp"

using namespace nlh;

namespace {

GridFunction gaussian(const Grid& g, double sigma) {
  Profile p;
  p.sigma = sigma;
  return p.sample(g);
}

GridFunction bump(const Grid& g, double radius) {
  Profile p;
  p.name = "bump";
  p.radius = radius;
  return p.sample(g);
}

StudySpec small_study(Coefficient coeff, int N) {
  auto kernel = make_pareto_kernel(1, 1.0, 1.0);
  StudySpec s{kernel, coeff, KTable::constant(1, 0.5), Grid(1, 8.0, N), {0.25, 0.125, 0.0625},
              Profile{}, SolveConfig{}, AssemblyConfig{}};
  return s;
}

}  // namespace

TEST_CASE("profiles and cutoff") {
  Profile g;
  g.sigma = 0.5;
  g.amplitude = 3.0;
  CHECK(g({0.5, 0.0}, 1) == doctest::Approx(3.0 * std::exp(-0.5)).epsilon(1e-15));
  CHECK(g.support_radius(1) == 2.0);
  Profile b;
  b.name = "bump";
  b.radius = 2.0;
  CHECK(b({0.0, 0.0}, 1) == 1.0);
  CHECK(b({2.0, 0.0}, 1) == 0.0);
  CHECK(b({1.0, 1.0}, 2) > 0.0);
  CHECK(exterior_cutoff(0.3) == 0.0);
  CHECK(exterior_cutoff(1.0) == 0.0);
  CHECK(exterior_cutoff(2.0) == 1.0);
  CHECK(exterior_cutoff(1.5) == doctest::Approx(0.5).epsilon(1e-15));
  // psi(1 + s) + psi(2 - s) = 1
  CHECK(exterior_cutoff(1.2) + exterior_cutoff(1.8) == doctest::Approx(1.0).epsilon(1e-15));

  auto parsed = Profile::from_json({{"profile", "gaussian"}, {"sigma", 0.25}, {"center", 0.5}}, 1);
  CHECK(parsed.sigma == 0.25);
  CHECK(parsed.center[0] == 0.5);
  CHECK_THROWS_AS(Profile::from_json({{"profile", "gaussian"}, {"sigmaa", 1}}, 1), Error);
  CHECK_THROWS_AS(Profile::from_json({{"profile", "boxcar"}}, 1), Error);
}

TEST_CASE("region split against an indicator-function reference") {
  auto kernel = make_pareto_kernel(1, 1.0, 1.0);
  Grid g(1, 8.0, 128);
  auto op = assemble_eps(kernel, make_sin_product_coefficient(1), 0.125, g);
  auto u = gaussian(g, 0.7);
  auto phi = bump(g, 1.5);
  const double delta = 0.5;
  auto r = region_split_energy(op, u, phi, delta);

  double ref[3] = {0, 0, 0};
  for (std::size_t i = 0; i < g.size(); ++i)
    for (std::size_t j = 0; j < g.size(); ++j) {
      if (i == j) continue;
      const double x = g.axis_center(int(i)), y = g.axis_center(int(j));
      const double v = op.weight(i, j) * (u.values[j] - u.values[i]) *
                       (phi.values[j] - phi.values[i]) * g.cell_volume();
      const bool far = std::abs(x) + std::abs(y) >= 1.0 / delta;
      const bool near = std::abs(x - y) <= delta;
      ref[far ? 2 : (near ? 1 : 0)] += v;
    }
  CHECK(r.g1 == doctest::Approx(ref[0]).epsilon(1e-13));
  CHECK(r.g2 == doctest::Approx(ref[1]).epsilon(1e-13));
  CHECK(r.g3 == doctest::Approx(ref[2]).epsilon(1e-13));
  CHECK(r.n1 + r.n2 + r.n3 == g.size() * (g.size() - 1));
  CHECK(r.partition_defect() < 1e-13);
  // Twice the energy without the kappa part.
  double kap = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) kap += op.kappa()[i] * u.values[i] * phi.values[i];
  CHECK(r.total == doctest::Approx(2.0 * (op.energy(u, phi) - kap * g.cell_volume())).epsilon(1e-11));

  CHECK_THROWS_AS(region_split_energy(op, u, phi, 2.0 * g.spacing()), Error);
  CHECK_THROWS_AS(region_split_energy(op, u, phi, 2.0), Error);
}

TEST_CASE("cube check: constant coefficient has zero gap") {
  auto kernel = make_pareto_kernel(1, 1.0, 1.0);
  Grid g(1, 8.0, 1024);
  auto u = gaussian(g, 0.5);
  auto phi = bump(g, 1.0);
  auto r = cube_decomposition_check(kernel, make_constant_coefficient(1, 2.0), 1.0 / 16, 0.5, u, phi);
  CHECK(r.pairs > 0);
  CHECK(r.gap == 0.0);
  CHECK(r.lhs == r.rhs);
}

TEST_CASE("cube check: independent double sum and boundary mass") {
  auto kernel = make_pareto_kernel(1, 1.0, 1.0);
  Grid g(1, 8.0, 2048);
  auto coeff = make_sin_product_coefficient(1);
  auto u = gaussian(g, 0.5);
  auto phi = bump(g, 1.0);
  const double delta = 0.5;

  const double eps = 1.0 / 16;
  double lhs = 0.0;
  for (int i = 0; i < g.n_per_axis(); ++i)
    for (int j = 0; j < g.n_per_axis(); ++j) {
      const double x = g.axis_center(i), y = g.axis_center(j);
      if (!(std::abs(x - y) > delta && std::abs(x) + std::abs(y) < 1.0 / delta)) continue;
      const double z = std::abs(x - y) / eps;
      const double p = z >= 1.0 ? 0.5 / (z * z) : 0.0;
      const double lam = 2.0 + std::sin(2 * M_PI * x / eps) * std::sin(2 * M_PI * y / eps);
      lhs += p / (eps * eps) * lam * u.values[std::size_t(i)] * phi.values[std::size_t(j)] *
             g.cell_volume() * g.cell_volume();
    }
  auto r8 = cube_decomposition_check(kernel, coeff, eps, delta, u, phi);
  CHECK(r8.lhs == doctest::Approx(lhs).epsilon(1e-12));
  CHECK(r8.lambda_bar == doctest::Approx(2.0).epsilon(1e-12));

  auto r64 = cube_decomposition_check(kernel, coeff, eps / 4, delta, u, phi);
  CHECK(r64.boundary_mass < r8.boundary_mass);
  CHECK(r64.cubes > r8.cubes);
  CHECK(r64.gap < 0.02);

  // The G1 boundary lines are level sets of x - y and x + y, so dropping the
  // tie pairs leaves a first-order term in h that dominates at fixed h.
  Grid fine(1, 8.0, 4096);
  auto rf = cube_decomposition_check(kernel, coeff, eps / 4, delta, gaussian(fine, 0.5),
                                     bump(fine, 1.0));
  CHECK(rf.gap < 0.6 * r64.gap);

  CHECK_THROWS_AS(cube_decomposition_check(kernel, coeff, 0.125, 0.5, u, phi), Error);
}

TEST_CASE("translation energy matches the gaussian autocorrelation") {
  Grid g(1, 8.0, 1024);
  const double sigma = 0.5;
  auto u = gaussian(g, sigma);
  auto rep = translation_energy_check(u, 0.0625, 1.0, 1.0, {0, 8, 16, 64, 256, -64});
  CHECK(rep.rows[0].energy == 0.0);
  for (const auto& row : rep.rows) {
    const double exact = 2.0 * std::sqrt(M_PI) * sigma * (1.0 - std::exp(-row.h * row.h / (4 * sigma * sigma)));
    CHECK(row.energy == doctest::Approx(exact).epsilon(1e-10));
  }
  CHECK(rep.rows[5].energy == doctest::Approx(rep.rows[3].energy).epsilon(1e-14));
  CHECK(rep.threshold == 0.1875);
  CHECK(!rep.rows[1].large);  // 8h = 0.125
  CHECK(rep.rows[3].large);
  CHECK(rep.large_count == 4);

  // A single nonzero cell leaves the box under a long shift: energy 2 a^2 h.
  GridFunction spike(g);
  spike.values[1020] = 3.0;
  auto sp = translation_energy_check(spike, 0.0625, 1.0, 1.0, {10, -10});
  CHECK(sp.rows[0].energy == doctest::Approx(18.0 * g.spacing()).epsilon(1e-15));
  CHECK(sp.rows[1].energy == doctest::Approx(18.0 * g.spacing()).epsilon(1e-15));
}

TEST_CASE("exterior decay") {
  Grid g(1, 8.0, 4096);
  GridFunction one = GridFunction::sample(g, [](const Point&) { return 1.0; });
  auto rows = exterior_decay_check(one, {1.0, 2.0, 3.0});
  for (const auto& r : rows) CHECK(r.tail == doctest::Approx(2.0 * (8.0 - 1.5 * r.n)).epsilon(1e-8));

  auto b = bump(g, 1.5);
  auto t = exterior_decay_check(b, {1.5, 2.0, 4.0});
  CHECK(t[0].tail == 0.0);
  auto gs = exterior_decay_check(gaussian(g, 1.0), {0.5, 1.0, 2.0, 4.0});
  for (std::size_t i = 1; i < gs.size(); ++i) CHECK(gs[i].tail <= gs[i - 1].tail);
  CHECK_THROWS_AS(exterior_decay_check(b, {8.0}), Error);
}

TEST_CASE("convergence study basics") {
  auto spec = small_study(make_constant_coefficient(1, 1.0), 256);
  spec.f.name = "zero";
  auto z = run_convergence_study(spec);
  REQUIRE(z.rows.size() == 3);
  for (const auto& r : z.rows) CHECK(r.l2_error == 0.0);

  auto s = small_study(make_constant_coefficient(1, 1.0), 256);
  auto rep = run_convergence_study(s);
  CHECK(rep.rows[0].eps > rep.rows[1].eps);
  CHECK(rep.strictly_decreasing());
  for (const auto& r : rep.rows) {
    CHECK(r.solve.converged);
    CHECK(r.energy > 0.0);
  }
  CHECK(rep.plot_data().rfind("# eps l2_error\n", 0) == 0);
  CHECK(rep.csv().find("eps,l2_error") == 0);

  auto bad = small_study(make_constant_coefficient(1, 1.0), 32);  // h = 0.5
  try {
    run_convergence_study(bad);
    FAIL("expected a resolution error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::resolution_violation);
  }
  auto wide = small_study(make_constant_coefficient(1, 1.0), 256);
  wide.f.sigma = 1.0;  // 4 sigma > R/4
  CHECK_THROWS_AS(run_convergence_study(wide), Error);
}

TEST_CASE("equal effective coefficients give the same limit") {
  auto a = small_study(make_cos_difference_coefficient(1), 256);
  auto b = small_study(make_constant_coefficient(1, 2.0), 256);
  a.keep_solutions = b.keep_solutions = true;
  auto ra = run_convergence_study(a);
  auto rb = run_convergence_study(b);
  CHECK(ra.lambda_bar == 2.0);
  CHECK(ra.u0.values == rb.u0.values);
  CHECK(ra.solutions[0].values != rb.solutions[0].values);
}
