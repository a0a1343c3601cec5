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
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "nlhomog/types.hpp"

namespace nlh {

/// p(z) = c_tail |z|^{-d-alpha} for |z| >= r0.
struct TailDescriptor {
  double c_tail = 0.0;
  double r0 = 0.0;
};

/// Jump kernel density p on R^d. Immutable after construction.
class KernelSpec {
 public:
  using Density = std::function<double(const Point&)>;

  KernelSpec(std::string name, int dimension, double alpha, Density density,
             bool near_origin_bounded, double M, std::optional<TailDescriptor> tail,
             std::vector<double> breakpoints = {}, nlohmann::json params = nlohmann::json::object());

  double operator()(const Point& z) const { return density_(z); }

  const std::string& name() const { return name_; }
  int dimension() const { return dimension_; }
  double alpha() const { return alpha_; }
  bool near_origin_bounded() const { return near_origin_bounded_; }
  /// Radius beyond which the two-sided bounds are claimed.
  double M() const { return M_; }
  const std::optional<TailDescriptor>& tail() const { return tail_; }
  /// Radii across which the density may jump; quadrature panels split there.
  const std::vector<double>& breakpoints() const { return breakpoints_; }
  const nlohmann::json& params() const { return params_; }

  /// Density along the ray r -> r * direction for a unit direction.
  double radial(double r, const Point& direction) const {
    return density_({r * direction[0], r * direction[1]});
  }

  nlohmann::json describe() const;

 private:
  std::string name_;
  int dimension_;
  double alpha_;
  Density density_;
  bool near_origin_bounded_;
  double M_;
  std::optional<TailDescriptor> tail_;
  std::vector<double> breakpoints_;
  nlohmann::json params_;
};

/// p(z) = c |z|^{-d-alpha} 1_{|z| >= r0}, normalized to unit mass.
KernelSpec make_pareto_kernel(int d, double alpha, double r0);

/// Uniform core of mass core_mass on B_1 plus a pareto tail of mass
/// 1 - core_mass on |z| >= 1.
KernelSpec make_core_tail_kernel(int d, double alpha, double core_mass);

/// Pareto kernel cut off beyond `cutoff` and renormalized. Violates the
/// pointwise lower bound and the stable attraction; negative control.
KernelSpec make_truncated_pareto_kernel(int d, double alpha, double r0, double cutoff);

/// Name -> factory(d, alpha, params). Built-ins: pareto, core_tail,
/// truncated_pareto. Further kernels may be registered at startup.
class KernelRegistry {
 public:
  using Factory = std::function<KernelSpec(int d, double alpha, const nlohmann::json& params)>;

  static KernelRegistry& instance();

  void add(const std::string& name, Factory factory);
  bool contains(const std::string& name) const;
  KernelSpec make(const std::string& name, int d, double alpha, const nlohmann::json& params) const;
  std::vector<std::string> names() const;

 private:
  KernelRegistry();
  std::map<std::string, Factory> factories_;
};

// ---------------------------------------------------------------------------
// Hypothesis verifiers

struct QuadConfig {
  /// Gauss panels per unit of radius-range below the first dyadic shell.
  int near_panels = 64;
  double shell_tol = 1e-14;
  int max_shells = 400;
  /// Equally spaced angles per unit circle for d = 2 radial integrals.
  int angular_points = 64;
  /// Use the closed-form tail when a tail descriptor covers the range.
  bool analytic_tail = true;

  nlohmann::json to_json() const;
};

/// Subset of the unit sphere. d = 1: sign = +1, -1, or 0 for both points
/// (counting measure). d = 2: angular interval [theta_lo, theta_hi).
struct DirectionSet {
  std::string label;
  int sign = 0;
  double theta_lo = 0.0;
  double theta_hi = 0.0;

  double surface_measure(int d) const;
  DirectionSet negated(int d) const;
  bool contains(const Point& unit, int d) const;
};

std::vector<DirectionSet> default_direction_sets(int d, int sectors = 8);

struct H1Result {
  double mass = 0.0;
  double symmetry_defect = 0.0;
  double min_sampled_density = 0.0;
  bool tail_completed = false;
  bool pass = false;
};

struct AnnularValue {
  double r = 0.0;
  double value = 0.0;
  bool analytic = false;
};

struct AnnularResult {
  std::vector<AnnularValue> values;
  double c2_estimate = 0.0;
  bool pass = false;
};

struct LowerBoundResult {
  double c1_estimate = 0.0;
  Point argmin{};
  std::size_t samples = 0;
  bool pass = false;
};

struct KEstimate {
  DirectionSet set;
  std::vector<double> n_values;
  std::vector<double> k_sequence;
  double extrapolated = 0.0;
  bool converged = false;
};

struct KResult {
  std::vector<KEstimate> estimates;
  double symmetry_defect = 0.0;
  double k_min = 0.0;
  double k_max = 0.0;
  bool pass = false;
};

struct PhiSample {
  double r = 0.0;
  double phi = 0.0;
  Point argmax_z{};
  Point argmax_zprime{};
  std::size_t pairs = 0;
  std::vector<Point> degenerate_cubes;
};

struct PhiResult {
  std::vector<PhiSample> values;
  bool pass = false;
};

/// Piecewise-constant angular density k built from estimate_k.
class KTable {
 public:
  KTable() = default;
  KTable(int d, std::vector<DirectionSet> sets, std::vector<double> values);
  static KTable constant(int d, double value);
  static KTable from(const KResult& result, int d);

  double operator()(const Point& direction) const;
  int dimension() const { return d_; }
  const std::vector<DirectionSet>& sets() const { return sets_; }
  const std::vector<double>& values() const { return values_; }
  /// True when the same value is assigned to every direction.
  bool is_constant() const;
  /// Angles (d = 2) where the table value may jump.
  std::vector<double> boundaries() const;
  nlohmann::json to_json() const;

 private:
  int d_ = 1;
  std::vector<DirectionSet> sets_;
  std::vector<double> values_;
};

H1Result check_h1(const KernelSpec& kernel, const QuadConfig& quad = {});

/// r^alpha * integral of p over B_{2r} \ B_r for every r.
AnnularResult check_annular_bound(const KernelSpec& kernel, const std::vector<double>& radii,
                                  const QuadConfig& quad = {});

/// min over samples of p(z) |z|^{d+alpha}.
LowerBoundResult check_lower_bound(const KernelSpec& kernel, const std::vector<Point>& samples);

KResult estimate_k(const KernelSpec& kernel, const std::vector<double>& n_list,
                   const std::vector<DirectionSet>& directions, const QuadConfig& quad = {},
                   double agreement_tol = 0.01);

PhiResult oscillation_phi(const KernelSpec& kernel, const std::vector<double>& r_list,
                          int angular_samples = 16);

/// Integral of p over |z| > R.
double tail_mass(const KernelSpec& kernel, double R, const QuadConfig& quad = {});

/// Integral of p over R1 < |z| < R2 with direction in `set`.
double sector_mass(const KernelSpec& kernel, double R1, double R2, const DirectionSet& set,
                   const QuadConfig& quad = {});

struct HypothesisPlan {
  QuadConfig quad;
  std::vector<double> annular_radii;   // default: M * {1, 4, 16, 64, 256}
  std::vector<Point> lower_samples;    // default: radii M * 2^k, k = 0..20
  std::vector<double> k_n_list;        // default: {128, 256, 512, 1024} * M
  std::vector<DirectionSet> k_directions;
  std::vector<double> phi_r_list;      // default: {16, 32, 64} * M
  double mass_tol = 1e-6;
  double symmetry_tol = 1e-12;
  double k_agreement_tol = 0.01;
  double h4_threshold = 0.5;

  static HypothesisPlan defaults(const KernelSpec& kernel);
  nlohmann::json to_json() const;
};

struct HypothesisReport {
  H1Result h1;
  AnnularResult annular;
  LowerBoundResult lower;
  KResult k;
  PhiResult phi;
  std::map<std::string, bool> verdict;  // H1, H2-lower, H2-upper, H3, H4
  nlohmann::json plan;

  bool all_pass() const;
  nlohmann::json to_json() const;
};

HypothesisReport check_hypotheses(const KernelSpec& kernel, const HypothesisPlan& plan);

}  // namespace nlh
