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

#include "nlhomog/solver.hpp"

#include <cmath>

namespace nlh {

using nlohmann::json;

json SolveConfig::to_json() const {
  return {{"m", m}, {"rel_tol", rel_tol}, {"max_iter", max_iter}, {"fast_path", fast_path}};
}

json SolveReport::to_json() const {
  return {{"iterations", iterations},
          {"restarts", restarts},
          {"rel_residual", rel_residual},
          {"energy", energy},
          {"l2_norm", l2_norm},
          {"f_norm", f_norm},
          {"resolvent_bound", resolvent_bound},
          {"resolvent_bound_ok", resolvent_bound_ok},
          {"converged", converged}};
}

double energy_functional(const NonlocalOperator& op, const GridFunction& f, double m,
                         const GridFunction& u) {
  return op.energy(u, u) + m * inner(u, u) - 2.0 * inner(f, u);
}

namespace {

double dot(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

}  // namespace

SolveReport resolvent_solve(const NonlocalOperator& op, const GridFunction& f,
                            const SolveConfig& cfg, const GridFunction* initial) {
  require(cfg.m > 0.0 && std::isfinite(cfg.m), ErrorCode::invalid_parameter,
          "resolvent mass m must be positive");
  require(cfg.rel_tol > 0.0 && cfg.rel_tol < 1.0, ErrorCode::invalid_parameter,
          "rel_tol must lie in (0, 1)");
  require(cfg.max_iter >= 0, ErrorCode::invalid_parameter, "max_iter must be >= 1");
  require_same_grid(op.grid(), f.grid);
  if (initial) require_same_grid(op.grid(), initial->grid);

  const std::size_t n = op.size();
  const int max_iter = cfg.max_iter > 0 ? cfg.max_iter : int(10 * op.grid().n_per_axis());
  const double hd = op.grid().cell_volume();
  const double m = cfg.m;
  std::vector<double> scratch(n);
  auto apply_a = [&](const std::vector<double>& v, std::vector<double>& out) {
    if (cfg.fast_path)
      op.apply_auto(v.data(), scratch.data());
    else
      op.apply(v.data(), scratch.data());
    for (std::size_t i = 0; i < n; ++i) out[i] = m * v[i] - scratch[i];
  };

  SolveReport rep;
  rep.f_norm = f.l2_norm();
  std::vector<double> u = initial ? initial->values : std::vector<double>(n, 0.0);
  std::vector<double> r(n), p(n), ap(n);
  const double fnorm2 = dot(f.values, f.values);
  const double target = cfg.rel_tol * std::sqrt(fnorm2);

  auto true_residual = [&] {
    apply_a(u, ap);
    for (std::size_t i = 0; i < n; ++i) r[i] = f.values[i] - ap[i];
    return std::sqrt(dot(r, r));
  };
  auto functional = [&] { return -(dot(r, u) + dot(f.values, u)) * hd; };

  double rnorm = true_residual();
  if (cfg.record_history) rep.energy_history.push_back(functional());
  int iter = 0;
  const int max_restarts = 5;
  while (rnorm > target && iter < max_iter) {
    p = r;
    double rr = dot(r, r);
    // Aim below the target so the fresh residual certifies.
    while (iter < max_iter && std::sqrt(rr) > 0.5 * target) {
      apply_a(p, ap);
      const double pap = dot(p, ap);
      if (!(pap > 0.0)) break;
      const double step = rr / pap;
      for (std::size_t i = 0; i < n; ++i) {
        u[i] += step * p[i];
        r[i] -= step * ap[i];
      }
      ++iter;
      if (cfg.record_history) rep.energy_history.push_back(functional());
      const double rr_new = dot(r, r);
      const double beta = rr_new / rr;
      rr = rr_new;
      for (std::size_t i = 0; i < n; ++i) p[i] = r[i] + beta * p[i];
    }
    rnorm = true_residual();
    if (rnorm <= target || rep.restarts >= max_restarts) break;
    ++rep.restarts;
  }

  rep.iterations = iter;
  rep.converged = rnorm <= target;
  rep.rel_residual = fnorm2 > 0.0 ? rnorm / std::sqrt(fnorm2) : rnorm;
  rep.solution = GridFunction(op.grid(), std::move(u));
  rep.l2_norm = rep.solution.l2_norm();
  rep.energy = energy_functional(op, f, m, rep.solution);
  rep.resolvent_bound = rep.f_norm / m + cfg.rel_tol * rep.f_norm / m;
  rep.resolvent_bound_ok = rep.l2_norm <= rep.resolvent_bound;
  return rep;
}

}  // namespace nlh
