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

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "nlhomog/kernels.hpp"
#include "nlhomog/types.hpp"

namespace nlh {

enum class CoefficientMode { periodic, locally_periodic };

const char* to_string(CoefficientMode mode);

/// Oscillating coefficient Lambda. Periodic fields ignore the slow (x, y)
/// arguments of the four-argument evaluator.
class Coefficient {
 public:
  using Periodic = std::function<double(const Point& xi, const Point& eta)>;
  using Local =
      std::function<double(const Point& x, const Point& y, const Point& xi, const Point& eta)>;
  using Modulus = std::function<double(double)>;

  static Coefficient periodic(std::string name, int d, double gamma, Periodic f,
                              nlohmann::json params = nlohmann::json::object(),
                              std::optional<double> constant = std::nullopt);
  static Coefficient locally_periodic(std::string name, int d, double gamma, Local f,
                                      Modulus modulus,
                                      nlohmann::json params = nlohmann::json::object());

  const std::string& name() const { return name_; }
  int dimension() const { return d_; }
  double gamma() const { return gamma_; }
  CoefficientMode mode() const { return mode_; }
  /// Set when Lambda is the same number everywhere.
  std::optional<double> constant() const { return constant_; }
  const nlohmann::json& params() const { return params_; }

  /// Lambda(x, y, xi, eta).
  double operator()(const Point& x, const Point& y, const Point& xi, const Point& eta) const;
  /// Periodic evaluator; throws for locally periodic fields.
  double periodic_value(const Point& xi, const Point& eta) const;
  double modulus(double t) const;

  nlohmann::json describe() const;

 private:
  Coefficient() = default;
  std::string name_;
  int d_ = 1;
  double gamma_ = 1.0;
  CoefficientMode mode_ = CoefficientMode::periodic;
  Periodic periodic_;
  Local local_;
  Modulus modulus_;
  std::optional<double> constant_;
  nlohmann::json params_;
};

/// Lambda(x/eps, y/eps) or Lambda(x, y, x/eps, y/eps).
double eval_oscillating(const Coefficient& coeff, double eps, const Point& x, const Point& y);

struct EffectiveQuad {
  /// Midpoint points per axis of each unit cell.
  int s = 64;
  /// Relative agreement required between s and 2s.
  double tol = 1e-9;
};

/// Default plan: s = 64 for d = 1 and s = 16 for d = 2.
EffectiveQuad default_effective_quad(int d);

struct EffectiveResult {
  double value = 0.0;
  double refined = 0.0;
  int s = 0;
  bool converged = false;

  nlohmann::json to_json() const;
};

/// Average of Lambda over the unit cell pair. Throws quadrature-stall when
/// the s and 2s rules disagree.
EffectiveResult effective_lambda(const Coefficient& coeff, const EffectiveQuad& quad);
EffectiveResult effective_lambda(const Coefficient& coeff);

/// Pointwise average over (xi, eta) of Lambda(x, y, ., .).
EffectiveResult effective_lambda_field(const Coefficient& coeff, const Point& x, const Point& y,
                                       const EffectiveQuad& quad);
EffectiveResult effective_lambda_field(const Coefficient& coeff, const Point& x, const Point& y);

/// Plain s-point midpoint average without refinement check.
double cell_average(const Coefficient& coeff, const Point& x, const Point& y, int s);

/// Average over eta only: the row mean of Lambda(x, y, xi, .).
double row_average(const Coefficient& coeff, const Point& x, const Point& y, const Point& xi,
                   int s);

/// Lambda_bar * k(direction of x - y).
double effective_angular_kernel(double lambda_bar, const KTable& k, const Point& x,
                                const Point& y);

struct CoefficientAudit {
  double symmetry_defect = 0.0;
  double periodicity_defect = 0.0;
  double min_value = 0.0;
  double max_value = 0.0;
  /// max of |Lambda(p1) - Lambda(p2)| - omega(distance), clipped below at 0.
  double modulus_excess = 0.0;
  std::size_t samples = 0;
  bool pass = false;

  nlohmann::json to_json() const;
};

/// Sampled check of symmetry, integer-shift periodicity, ellipticity bounds
/// and (locally periodic) the declared modulus.
CoefficientAudit audit_coefficient(const Coefficient& coeff, std::uint64_t seed,
                                   std::size_t samples = 200);

/// Name -> factory(d, params). Built-ins: constant, sin_product,
/// cos_difference, locally_periodic.
class CoefficientRegistry {
 public:
  using Factory = std::function<Coefficient(int d, const nlohmann::json& params)>;

  static CoefficientRegistry& instance();

  void add(const std::string& name, Factory factory);
  bool contains(const std::string& name) const;
  Coefficient make(const std::string& name, int d, const nlohmann::json& params) const;
  std::vector<std::string> names() const;

 private:
  CoefficientRegistry();
  std::map<std::string, Factory> factories_;
};

Coefficient make_constant_coefficient(int d, double value);
/// 2 + prod sin(2 pi xi_k) * prod sin(2 pi eta_k).
Coefficient make_sin_product_coefficient(int d);
/// 2 + prod cos(2 pi (xi_k - eta_k)).
Coefficient make_cos_difference_coefficient(int d);
/// (2 + prod sin(2 pi xi_k) prod sin(2 pi eta_k)) * (1 + 1/2 (1 + |x|^2 + |y|^2)^-1).
Coefficient make_locally_periodic_coefficient(int d);

}  // namespace nlh
