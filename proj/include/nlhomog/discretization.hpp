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

#include <filesystem>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "nlhomog/coefficients.hpp"
#include "nlhomog/kernels.hpp"
#include "nlhomog/types.hpp"

namespace nlh {

/// Cell-centered grid on [-R, R]^d with N cells per axis. In d = 2 the cell
/// (ix, iy) has flat index ix * N + iy.
class Grid {
 public:
  Grid() = default;
  Grid(int d, double R, int N);

  int dimension() const { return d_; }
  double half_width() const { return R_; }
  int n_per_axis() const { return N_; }
  double spacing() const { return h_; }
  std::size_t size() const { return size_; }
  /// h^d.
  double cell_volume() const { return vol_; }
  double axis_center(int i) const { return -R_ + (i + 0.5) * h_; }
  Point center(std::size_t idx) const;

  bool operator==(const Grid& o) const { return d_ == o.d_ && R_ == o.R_ && N_ == o.N_; }
  nlohmann::json to_json() const;

 private:
  int d_ = 1;
  double R_ = 1.0;
  int N_ = 8;
  double h_ = 0.25;
  double vol_ = 0.25;
  std::size_t size_ = 8;
};

struct GridFunction {
  Grid grid;
  std::vector<double> values;

  GridFunction() = default;
  explicit GridFunction(const Grid& g) : grid(g), values(g.size(), 0.0) {}
  GridFunction(const Grid& g, std::vector<double> v);

  static GridFunction sample(const Grid& g, const std::function<double(const Point&)>& f);

  /// h^{d/2} times the Euclidean norm.
  double l2_norm() const;
};

/// Discrete L^2 inner product.
double inner(const GridFunction& u, const GridFunction& v);
void require_same_grid(const Grid& a, const Grid& b);

/// CSV with a "# nlhomog grid d R N" header followed by x[,y],value rows.
std::string grid_function_csv(const GridFunction& u);
GridFunction parse_grid_function_csv(const std::string& text);

struct OperatorMeta {
  std::string kind;  // "eps", "effective" or "custom"
  double eps = 0.0;
  nlohmann::json kernel;
  nlohmann::json coefficient;
  nlohmann::json plan;
  /// Weights depend only on x_i - x_j.
  bool translation_invariant = false;

  nlohmann::json to_json() const;
};

/// Symmetric weights w_ij (dense, row-major, zero diagonal) plus the killing
/// term kappa. (L u)_i = sum_j w_ij (u_j - u_i) - kappa_i u_i.
class NonlocalOperator {
 public:
  NonlocalOperator(Grid grid, std::vector<double> weights, std::vector<double> kappa,
                   OperatorMeta meta);

  const Grid& grid() const { return grid_; }
  std::size_t size() const { return n_; }
  double weight(std::size_t i, std::size_t j) const { return w_[i * n_ + j]; }
  std::span<const double> row(std::size_t i) const { return {w_.data() + i * n_, n_}; }
  const std::vector<double>& kappa() const { return kappa_; }
  const std::vector<double>& row_sums() const { return row_sums_; }
  const OperatorMeta& meta() const { return meta_; }
  double max_row_sum() const;

  GridFunction apply(const GridFunction& u) const;
  void apply(const double* u, double* out) const;

  /// 1/2 sum w_ij (u_j - u_i)(v_j - v_i) h^d + sum kappa_i u_i v_i h^d.
  double energy(const GridFunction& u, const GridFunction& v) const;

  /// True when fast_apply is available.
  bool has_convolution() const { return static_cast<bool>(fft_); }
  /// FFT evaluation of the convolution part; inapplicable-structure error
  /// unless the operator is translation invariant.
  GridFunction fast_apply(const GridFunction& u) const;
  void fast_apply(const double* u, double* out) const;
  /// Preferred matvec: FFT when available, dense otherwise.
  void apply_auto(const double* u, double* out) const;

  /// Same weights with kappa replaced.
  NonlocalOperator with_kappa(std::vector<double> kappa) const;

  /// Text export: header, upper-triangle "i j w" lines, then "i kappa" lines.
  std::string export_text() const;

 private:
  struct Fft;
  void build_convolution();

  Grid grid_;
  std::size_t n_;
  std::vector<double> w_;
  std::vector<double> kappa_;
  std::vector<double> row_sums_;
  OperatorMeta meta_;
  std::shared_ptr<Fft> fft_;
};

struct AssemblyConfig {
  /// Points per axis for the cell-averaged kernel inside the near band;
  /// 1 means plain midpoint values.
  int subsample = 1;
  /// Band half-width in units of eps for subsampling.
  double band = 4.0;
  /// Whole periods integrated exactly beyond each box face for kappa.
  int kappa_periods_1d = 64;
  int kappa_periods_2d = 2;
  /// Gauss panels per period in the near exterior.
  int kappa_panels_per_period = 2;
  /// Gauss panels per angular piece (d = 2).
  int angular_panels = 4;
  /// Midpoints per axis for the eta average in the far exterior.
  int far_average_points_1d = 64;
  int far_average_points_2d = 16;
  /// Midpoints per axis for eta averages that depend on the slow variable.
  int local_average_points_1d = 8;
  int local_average_points_2d = 4;
  /// Midpoints per axis for Lambda_bar(x, y) inside assembly.
  int field_points = 4;
  /// Pairs on which field_points is certified against 2 * field_points.
  int field_check_pairs = 64;
  double field_check_tol = 1e-10;
  QuadConfig quad;

  nlohmann::json to_json() const;
};

/// Discrete rescaled operator L^eps.
NonlocalOperator assemble_eps(const KernelSpec& kernel, const Coefficient& coeff, double eps,
                              const Grid& grid, const AssemblyConfig& cfg = {});

/// Kappa of L^eps alone (exposed for tests).
std::vector<double> eps_kappa(const KernelSpec& kernel, const Coefficient& coeff, double eps,
                              const Grid& grid, const AssemblyConfig& cfg = {});

/// Limit operator with constant Lambda_bar.
NonlocalOperator assemble_effective(const KTable& k, double lambda_bar, double alpha,
                                    const Grid& grid, const AssemblyConfig& cfg = {});

/// Limit operator with the Lambda_bar(x, y) field of a locally periodic coefficient.
NonlocalOperator assemble_effective_field(const KTable& k, const Coefficient& coeff, double alpha,
                                          const Grid& grid, const AssemblyConfig& cfg = {});

}  // namespace nlh
