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

#include "nlhomog/coefficients.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>


namespace nlh {

using nlohmann::json;

const char* to_string(CoefficientMode mode) {
  return mode == CoefficientMode::periodic ? "periodic" : "locally_periodic";
}

Coefficient Coefficient::periodic(std::string name, int d, double gamma, Periodic f, json params,
                                  std::optional<double> constant) {
  require(d == 1 || d == 2, ErrorCode::invalid_parameter, "dimension must be 1 or 2");
  require(gamma >= 1.0, ErrorCode::invalid_parameter, "gamma must be >= 1");
  Coefficient c;
  c.name_ = std::move(name);
  c.d_ = d;
  c.gamma_ = gamma;
  c.mode_ = CoefficientMode::periodic;
  c.periodic_ = std::move(f);
  c.constant_ = constant;
  c.params_ = std::move(params);
  return c;
}

Coefficient Coefficient::locally_periodic(std::string name, int d, double gamma, Local f,
                                          Modulus modulus, json params) {
  require(d == 1 || d == 2, ErrorCode::invalid_parameter, "dimension must be 1 or 2");
  require(gamma >= 1.0, ErrorCode::invalid_parameter, "gamma must be >= 1");
  Coefficient c;
  c.name_ = std::move(name);
  c.d_ = d;
  c.gamma_ = gamma;
  c.mode_ = CoefficientMode::locally_periodic;
  c.local_ = std::move(f);
  c.modulus_ = std::move(modulus);
  c.params_ = std::move(params);
  return c;
}

double Coefficient::operator()(const Point& x, const Point& y, const Point& xi,
                               const Point& eta) const {
  return mode_ == CoefficientMode::periodic ? periodic_(xi, eta) : local_(x, y, xi, eta);
}

double Coefficient::periodic_value(const Point& xi, const Point& eta) const {
  require(mode_ == CoefficientMode::periodic, ErrorCode::invalid_parameter,
          "coefficient " + name_ + " is locally periodic");
  return periodic_(xi, eta);
}

double Coefficient::modulus(double t) const { return modulus_ ? modulus_(t) : 0.0; }

json Coefficient::describe() const {
  json j{{"name", name_}, {"dimension", d_}, {"gamma", gamma_}, {"mode", to_string(mode_)},
         {"params", params_}};
  if (constant_) j["constant"] = *constant_;
  return j;
}

double eval_oscillating(const Coefficient& coeff, double eps, const Point& x, const Point& y) {
  const Point xi{x[0] / eps, x[1] / eps};
  const Point eta{y[0] / eps, y[1] / eps};
  return coeff(x, y, xi, eta);
}

EffectiveQuad default_effective_quad(int d) { return EffectiveQuad{d == 1 ? 64 : 16, 1e-9}; }

json EffectiveResult::to_json() const {
  return {{"value", value}, {"refined", refined}, {"s", s}, {"converged", converged}};
}

namespace {

EffectiveResult refine(const std::function<double(int)>& average, const EffectiveQuad& quad) {
  require(quad.s >= 1, ErrorCode::invalid_parameter, "midpoint count must be positive");
  EffectiveResult r;
  r.s = quad.s;
  r.value = average(quad.s);
  r.refined = average(2 * quad.s);
  r.converged = std::abs(r.value - r.refined) <= quad.tol * std::abs(r.refined);
  require(r.converged, ErrorCode::quadrature_stall,
          "effective coefficient quadrature did not settle under refinement");
  return r;
}

}  // namespace

namespace {

/// Calls f on the s^d midpoints of the unit cell.
template <class F>
void for_cell_points(int d, int s, F&& f) {
  for (int a = 0; a < s; ++a) {
    const double ta = (a + 0.5) / s;
    if (d == 1) {
      f(Point{ta, 0.0});
      continue;
    }
    for (int b = 0; b < s; ++b) f(Point{ta, (b + 0.5) / s});
  }
}

}  // namespace

double cell_average(const Coefficient& coeff, const Point& x, const Point& y, int s) {
  if (coeff.constant()) return *coeff.constant();
  const int d = coeff.dimension();
  double total = 0.0;
  for_cell_points(d, s, [&](const Point& xi) {
    double row = 0.0;
    for_cell_points(d, s, [&](const Point& eta) { row += coeff(x, y, xi, eta); });
    total += row;
  });
  const double m = d == 1 ? double(s) : double(s) * s;
  return total / (m * m);
}

double row_average(const Coefficient& coeff, const Point& x, const Point& y, const Point& xi,
                   int s) {
  if (coeff.constant()) return *coeff.constant();
  const int d = coeff.dimension();
  double total = 0.0;
  for_cell_points(d, s, [&](const Point& eta) { total += coeff(x, y, xi, eta); });
  return total / (d == 1 ? double(s) : double(s) * s);
}

EffectiveResult effective_lambda(const Coefficient& coeff, const EffectiveQuad& quad) {
  require(coeff.mode() == CoefficientMode::periodic, ErrorCode::invalid_parameter,
          "effective_lambda needs a periodic coefficient; use the field form");
  if (coeff.constant()) return {*coeff.constant(), *coeff.constant(), quad.s, true};
  return refine([&](int s) { return cell_average(coeff, {0.0, 0.0}, {0.0, 0.0}, s); }, quad);
}

EffectiveResult effective_lambda(const Coefficient& coeff) {
  return effective_lambda(coeff, default_effective_quad(coeff.dimension()));
}

EffectiveResult effective_lambda_field(const Coefficient& coeff, const Point& x, const Point& y,
                                       const EffectiveQuad& quad) {
  if (coeff.constant()) return {*coeff.constant(), *coeff.constant(), quad.s, true};
  return refine([&](int s) { return cell_average(coeff, x, y, s); }, quad);
}

EffectiveResult effective_lambda_field(const Coefficient& coeff, const Point& x, const Point& y) {
  return effective_lambda_field(coeff, x, y, default_effective_quad(coeff.dimension()));
}

double effective_angular_kernel(double lambda_bar, const KTable& k, const Point& x,
                                const Point& y) {
  const int d = k.dimension();
  const Point z = x - y;
  const double r = norm(z, d);
  require(r > 0.0, ErrorCode::coincident_points, "effective kernel needs x != y");
  return lambda_bar * k(Point{z[0] / r, d == 1 ? 0.0 : z[1] / r});
}

json CoefficientAudit::to_json() const {
  return {{"symmetry_defect", symmetry_defect},
          {"periodicity_defect", periodicity_defect},
          {"min", min_value},
          {"max", max_value},
          {"modulus_excess", modulus_excess},
          {"samples", samples},
          {"pass", pass}};
}

CoefficientAudit audit_coefficient(const Coefficient& coeff, std::uint64_t seed,
                                   std::size_t samples) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> fast(-3.0, 3.0), slow(-4.0, 4.0), step(-0.5, 0.5);
  std::uniform_int_distribution<int> shift(-3, 3);
  const int d = coeff.dimension();
  auto draw = [&](auto& dist) {
    Point p{dist(rng), 0.0};
    if (d == 2) p[1] = dist(rng);
    return p;
  };
  auto draw_int = [&] {
    Point p{double(shift(rng)), 0.0};
    if (d == 2) p[1] = double(shift(rng));
    return p;
  };
  const bool local = coeff.mode() == CoefficientMode::locally_periodic;

  CoefficientAudit a;
  a.min_value = std::numeric_limits<double>::infinity();
  a.max_value = -a.min_value;
  for (std::size_t n = 0; n < samples; ++n) {
    const Point x = draw(slow), y = draw(slow), xi = draw(fast), eta = draw(fast);
    const double v = coeff(x, y, xi, eta);
    a.min_value = std::min(a.min_value, v);
    a.max_value = std::max(a.max_value, v);
    a.symmetry_defect = std::max(a.symmetry_defect, std::abs(v - coeff(y, x, eta, xi)));
    if (local) {
      a.symmetry_defect = std::max(a.symmetry_defect, std::abs(v - coeff(x, y, eta, xi)));
      const Point z1 = draw_int(), z2 = draw_int();
      a.periodicity_defect =
          std::max(a.periodicity_defect, std::abs(v - coeff(x, y, xi + z1, eta + z2)));
      const Point x2 = x + draw(step), y2 = y + draw(step);
      const double t = norm(x2 - x, d) + norm(y2 - y, d);
      a.modulus_excess = std::max(
          a.modulus_excess, std::abs(v - coeff(x2, y2, xi, eta)) - coeff.modulus(t));
    } else {
      const Point z = draw_int();
      a.periodicity_defect =
          std::max(a.periodicity_defect, std::abs(v - coeff(x, y, xi + z, eta + z)));
    }
    ++a.samples;
  }
  const double g = coeff.gamma();
  a.pass = a.symmetry_defect <= 1e-12 && a.periodicity_defect <= 1e-10 &&
           a.min_value >= 1.0 / g - 1e-12 && a.max_value <= g + 1e-12 &&
           a.modulus_excess <= 1e-12;
  return a;
}

// ---------------------------------------------------------------------------
// Built-ins

namespace {

double sin_prod(const Point& p, int d) {
  double v = std::sin(2.0 * M_PI * p[0]);
  if (d == 2) v *= std::sin(2.0 * M_PI * p[1]);
  return v;
}

}  // namespace

Coefficient make_constant_coefficient(int d, double value) {
  require(value > 0.0 && std::isfinite(value), ErrorCode::invalid_parameter,
          "constant coefficient must be positive");
  return Coefficient::periodic(
      "constant", d, std::max(value, 1.0 / value),
      [value](const Point&, const Point&) { return value; }, json{{"value", value}}, value);
}

Coefficient make_sin_product_coefficient(int d) {
  return Coefficient::periodic("sin_product", d, 3.0, [d](const Point& xi, const Point& eta) {
    return 2.0 + sin_prod(xi, d) * sin_prod(eta, d);
  });
}

Coefficient make_cos_difference_coefficient(int d) {
  return Coefficient::periodic("cos_difference", d, 3.0, [d](const Point& xi, const Point& eta) {
    double v = std::cos(2.0 * M_PI * (xi[0] - eta[0]));
    if (d == 2) v *= std::cos(2.0 * M_PI * (xi[1] - eta[1]));
    return 2.0 + v;
  });
}

Coefficient make_locally_periodic_coefficient(int d) {
  // Slow factor lies in (1, 3/2]; its Lipschitz constant times 3 stays below 1.
  return Coefficient::locally_periodic(
      "locally_periodic", d, 4.5,
      [d](const Point& x, const Point& y, const Point& xi, const Point& eta) {
        const double s = x[0] * x[0] + x[1] * x[1] + y[0] * y[0] + y[1] * y[1];
        return (2.0 + sin_prod(xi, d) * sin_prod(eta, d)) * (1.0 + 0.5 / (1.0 + s));
      },
      [](double t) { return t; });
}

namespace {

void no_params(const json& params, const std::string& name) {
  if (params.is_null()) return;
  require(params.is_object(), ErrorCode::config_error, "coefficient.params must be an object");
  for (const auto& [key, value] : params.items())
    fail(ErrorCode::config_error,
         "unknown key \"" + key + "\" in coefficient.params for " + name);
}

}  // namespace

CoefficientRegistry::CoefficientRegistry() {
  factories_["constant"] = [](int d, const json& p) {
    double value = 1.0;
    if (!p.is_null()) {
      require(p.is_object(), ErrorCode::config_error, "coefficient.params must be an object");
      for (const auto& [key, v] : p.items()) {
        require(key == "value", ErrorCode::config_error,
                "unknown key \"" + key + "\" in coefficient.params for constant");
        value = v.get<double>();
      }
    }
    return make_constant_coefficient(d, value);
  };
  factories_["sin_product"] = [](int d, const json& p) {
    no_params(p, "sin_product");
    return make_sin_product_coefficient(d);
  };
  factories_["cos_difference"] = [](int d, const json& p) {
    no_params(p, "cos_difference");
    return make_cos_difference_coefficient(d);
  };
  factories_["locally_periodic"] = [](int d, const json& p) {
    no_params(p, "locally_periodic");
    return make_locally_periodic_coefficient(d);
  };
}

CoefficientRegistry& CoefficientRegistry::instance() {
  static CoefficientRegistry registry;
  return registry;
}

void CoefficientRegistry::add(const std::string& name, Factory factory) {
  factories_[name] = std::move(factory);
}

bool CoefficientRegistry::contains(const std::string& name) const {
  return factories_.count(name) > 0;
}

Coefficient CoefficientRegistry::make(const std::string& name, int d, const json& params) const {
  const auto it = factories_.find(name);
  require(it != factories_.end(), ErrorCode::config_error,
          "unknown coefficient \"" + name + "\"");
  return it->second(d, params);
}

std::vector<std::string> CoefficientRegistry::names() const {
  std::vector<std::string> out;
  for (const auto& [name, f] : factories_) out.push_back(name);
  return out;
}

}  // namespace nlh
