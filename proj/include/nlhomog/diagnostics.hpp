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

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "nlhomog/coefficients.hpp"
#include "nlhomog/discretization.hpp"
#include "nlhomog/kernels.hpp"
#include "nlhomog/solver.hpp"

namespace nlh {

/// Named analytic profile: gaussian (sigma, center, amplitude), bump
/// (radius, center, amplitude) or zero.
struct Profile {
  std::string name = "gaussian";
  double sigma = 0.5;
  double radius = 1.0;
  Point center{0.0, 0.0};
  double amplitude = 1.0;

  static Profile from_json(const nlohmann::json& j, int d);
  nlohmann::json to_json(int d) const;
  double operator()(const Point& x, int d) const;
  /// Radius of the ball around the origin holding the (effective) support;
  /// four standard deviations for a gaussian.
  double support_radius(int d) const;
  GridFunction sample(const Grid& g) const;
};

/// Smooth step: 0 for t <= 1, 1 for t >= 2.
double exterior_cutoff(double t);

struct StudySpec {
  KernelSpec kernel;
  Coefficient coeff;
  KTable k;
  Grid grid;
  std::vector<double> eps;
  Profile f;
  SolveConfig solve;
  AssemblyConfig assembly;
  /// Keep u^eps for later diagnostics.
  bool keep_solutions = false;
};

struct ConvergenceRow {
  double eps = 0.0;
  double l2_error = 0.0;
  /// (-L^eps u^eps, u^eps).
  double energy = 0.0;
  SolveReport solve;
};

struct ConvergenceReport {
  nlohmann::json study;
  GridFunction u0;
  SolveReport u0_solve;
  double lambda_bar = 0.0;
  std::vector<ConvergenceRow> rows;
  std::vector<GridFunction> solutions;

  bool strictly_decreasing() const;
  nlohmann::json to_json() const;
  std::string csv() const;
  /// Two columns, eps and error, with a '#' header.
  std::string plot_data() const;
};

/// Solves the limit problem once and every L^eps problem, recording
/// ||u^eps - u0||.
ConvergenceReport run_convergence_study(const StudySpec& spec);

/// Limit operator for a kernel and coefficient: constant Lambda_bar for
/// periodic fields, the Lambda_bar(x, y) field otherwise.
NonlocalOperator assemble_limit(const KTable& k, const Coefficient& coeff, double alpha,
                                const Grid& grid, const AssemblyConfig& cfg,
                                double* lambda_bar = nullptr);

struct RegionSplit {
  double delta = 0.0;
  double g1 = 0.0;
  double g2 = 0.0;
  double g3 = 0.0;
  /// Unsplit sum over all ordered pairs.
  double total = 0.0;
  std::size_t n1 = 0, n2 = 0, n3 = 0;

  double partition_defect() const;
  nlohmann::json to_json() const;
};

/// Splits sum_ij w_ij (u_j - u_i)(phi_j - phi_i) h^d over the regions
/// G3: |x| + |y| >= 1/delta; G2: |x - y| <= delta (and not G3); G1: the rest.
RegionSplit region_split_energy(const NonlocalOperator& op, const GridFunction& u,
                                const GridFunction& phi, double delta);

struct CubeCheckReport {
  double eps = 0.0;
  double delta = 0.0;
  double lhs = 0.0;
  double rhs = 0.0;
  double gap = 0.0;
  double lambda_bar = 0.0;
  std::size_t pairs = 0;
  std::size_t cubes = 0;
  std::size_t boundary_cubes = 0;
  /// Kernel mass of pairs outside G1 lying in eps-cubes that meet G1.
  double boundary_mass = 0.0;

  nlohmann::json to_json() const;
};

/// Compares the Lambda-weighted and Lambda_bar-weighted G1 sums of
/// eps^{-d-alpha} p((x - y)/eps) u(x) phi(y) h^{2d}.
CubeCheckReport cube_decomposition_check(const KernelSpec& kernel, const Coefficient& coeff,
                                         double eps, double delta, const GridFunction& u,
                                         const GridFunction& phi);

struct TranslationRow {
  int shift = 0;
  double h = 0.0;
  double energy = 0.0;
  bool large = false;
  /// energy / |h|^alpha when large, energy / eps^alpha otherwise.
  double ratio = 0.0;
};

struct TranslationReport {
  double eps = 0.0;
  double threshold = 0.0;
  std::vector<TranslationRow> rows;
  double max_large = 0.0;
  double min_large = 0.0;
  double max_small = 0.0;
  std::size_t large_count = 0;

  /// max / min of energy / |h|^alpha over the large-shift regime.
  double large_band() const;
  nlohmann::json to_json() const;
};

/// Shifts are in grid units along the first axis; u is zero outside the box.
TranslationReport translation_energy_check(const GridFunction& u, double eps, double M,
                                           double alpha, const std::vector<int>& shifts);

struct ExteriorRow {
  double n = 0.0;
  double tail = 0.0;
};

/// sum psi(|x|/n) u^2 h^d for every n; n must be below R.
std::vector<ExteriorRow> exterior_decay_check(const GridFunction& u,
                                              const std::vector<double>& n_list);

}  // namespace nlh
