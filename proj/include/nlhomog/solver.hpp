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

#pragma once

#include <vector>

#include <json.hpp>

#include "nlhomog/discretization.hpp"

namespace nlh {

struct SolveConfig {
  double m = 1.0;
  double rel_tol = 1e-10;
  /// 0 selects 10 * N.
  int max_iter = 0;
  /// Use the FFT matvec when the operator offers one.
  bool fast_path = true;
  /// Keep F(u_k) for every iterate.
  bool record_history = false;

  nlohmann::json to_json() const;
};

struct SolveReport {
  GridFunction solution;
  int iterations = 0;
  int restarts = 0;
  /// Certified ||(m - L) u - f|| / ||f|| from a fresh matvec.
  double rel_residual = 0.0;
  /// F(u) = E(u, u) + m ||u||^2 - 2 (f, u).
  double energy = 0.0;
  double l2_norm = 0.0;
  double f_norm = 0.0;
  /// ||f|| / m + rel_tol ||f|| / m.
  double resolvent_bound = 0.0;
  bool resolvent_bound_ok = false;
  bool converged = false;
  std::vector<double> energy_history;

  /// Everything except the solution vector.
  nlohmann::json to_json() const;
};

/// Conjugate gradients on (m - L) u = f, the minimizer of F. Zero initial
/// guess unless `initial` is given.
SolveReport resolvent_solve(const NonlocalOperator& op, const GridFunction& f,
                            const SolveConfig& cfg, const GridFunction* initial = nullptr);

/// F(u) = E(u, u) + m ||u||^2 - 2 (f, u).
double energy_functional(const NonlocalOperator& op, const GridFunction& f, double m,
                         const GridFunction& u);

}  // namespace nlh
