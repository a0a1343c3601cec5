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

#include "nlhomog/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

#include "nlhomog/quadrature.hpp"

namespace nlh {

using nlohmann::json;

const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::invalid_parameter: return "invalid-parameter";
    case ErrorCode::resolution_violation: return "resolution-violation";
    case ErrorCode::quadrature_stall: return "quadrature-stall";
    case ErrorCode::grid_mismatch: return "grid-mismatch";
    case ErrorCode::coincident_points: return "coincident-points";
    case ErrorCode::empty_samples: return "empty-sample-set";
    case ErrorCode::inapplicable_structure: return "inapplicable-structure";
    case ErrorCode::scale_separation: return "scale-separation-violation";
    case ErrorCode::delta_out_of_range: return "delta-out-of-range";
    case ErrorCode::config_error: return "config-error";
    case ErrorCode::io_error: return "io-error";
    case ErrorCode::max_iterations: return "max-iterations-exceeded";
    case ErrorCode::internal: return "internal-error";
  }
  return "unknown";
}

KernelSpec::KernelSpec(std::string name, int dimension, double alpha, Density density,
                       bool near_origin_bounded, double M, std::optional<TailDescriptor> tail,
                       std::vector<double> breakpoints, json params)
    : name_(std::move(name)),
      dimension_(dimension),
      alpha_(alpha),
      density_(std::move(density)),
      near_origin_bounded_(near_origin_bounded),
      M_(M),
      tail_(tail),
      breakpoints_(std::move(breakpoints)),
      params_(std::move(params)) {
  require(dimension_ == 1 || dimension_ == 2, ErrorCode::invalid_parameter,
          "dimension must be 1 or 2");
  require(alpha_ > 0.0 && alpha_ < 2.0, ErrorCode::invalid_parameter, "alpha must lie in (0, 2)");
  require(M_ >= 1.0, ErrorCode::invalid_parameter, "M must be >= 1");
  require(static_cast<bool>(density_), ErrorCode::invalid_parameter, "kernel density is empty");
}

json KernelSpec::describe() const {
  json j{{"name", name_},
         {"dimension", dimension_},
         {"alpha", alpha_},
         {"near_origin_bounded", near_origin_bounded_},
         {"M", M_},
         {"params", params_}};
  if (tail_)
    j["tail"] = {{"c_tail", tail_->c_tail}, {"r0", tail_->r0}};
  else
    j["tail"] = nullptr;
  return j;
}

namespace {

void validate_common(int d, double alpha) {
  require(d == 1 || d == 2, ErrorCode::invalid_parameter, "dimension must be 1 or 2");
  require(alpha > 0.0 && alpha < 2.0, ErrorCode::invalid_parameter, "alpha must lie in (0, 2)");
}

double unit_ball_volume(int d) { return d == 1 ? 2.0 : M_PI; }

}  // namespace

KernelSpec make_pareto_kernel(int d, double alpha, double r0) {
  validate_common(d, alpha);
  require(r0 > 0.0 && std::isfinite(r0), ErrorCode::invalid_parameter, "r0 must be positive");
  const double c = alpha * std::pow(r0, alpha) / sphere_measure(d);
  const double expo = -d - alpha;
  auto density = [c, r0, d, expo](const Point& z) {
    const double r = norm(z, d);
    return r >= r0 ? c * std::pow(r, expo) : 0.0;
  };
  return KernelSpec("pareto", d, alpha, density, true, std::max(1.0, r0), TailDescriptor{c, r0},
                    {r0}, json{{"r0", r0}});
}

KernelSpec make_core_tail_kernel(int d, double alpha, double core_mass) {
  validate_common(d, alpha);
  require(core_mass >= 0.0 && core_mass < 1.0, ErrorCode::invalid_parameter,
          "core_mass must lie in [0, 1)");
  const double c = (1.0 - core_mass) * alpha / sphere_measure(d);
  const double core = core_mass / unit_ball_volume(d);
  const double expo = -d - alpha;
  auto density = [c, core, d, expo](const Point& z) {
    const double r = norm(z, d);
    return r >= 1.0 ? c * std::pow(r, expo) : core;
  };
  return KernelSpec("core_tail", d, alpha, density, true, 1.0, TailDescriptor{c, 1.0}, {1.0},
                    json{{"core_mass", core_mass}});
}

KernelSpec make_truncated_pareto_kernel(int d, double alpha, double r0, double cutoff) {
  validate_common(d, alpha);
  require(r0 > 0.0, ErrorCode::invalid_parameter, "r0 must be positive");
  require(cutoff > r0, ErrorCode::invalid_parameter, "cutoff must exceed r0");
  const double c =
      alpha / (sphere_measure(d) * (std::pow(r0, -alpha) - std::pow(cutoff, -alpha)));
  const double expo = -d - alpha;
  auto density = [c, r0, cutoff, d, expo](const Point& z) {
    const double r = norm(z, d);
    return (r >= r0 && r <= cutoff) ? c * std::pow(r, expo) : 0.0;
  };
  return KernelSpec("truncated_pareto", d, alpha, density, true, std::max(1.0, r0), std::nullopt,
                    {r0, cutoff}, json{{"r0", r0}, {"cutoff", cutoff}});
}

// ---------------------------------------------------------------------------
// Registry

namespace {

double param_or(const json& params, const char* key, double fallback) {
  return params.contains(key) ? params.at(key).get<double>() : fallback;
}

void only_keys(const json& params, std::initializer_list<const char*> allowed,
               const std::string& where) {
  if (params.is_null()) return;
  require(params.is_object(), ErrorCode::config_error, where + " must be an object");
  for (const auto& [key, value] : params.items()) {
    bool ok = false;
    for (const char* a : allowed) ok = ok || key == a;
    require(ok, ErrorCode::config_error, "unknown key \"" + key + "\" in " + where);
  }
}

}  // namespace

KernelRegistry::KernelRegistry() {
  factories_["pareto"] = [](int d, double alpha, const json& p) {
    only_keys(p, {"r0"}, "kernel.params");
    return make_pareto_kernel(d, alpha, param_or(p, "r0", 1.0));
  };
  factories_["core_tail"] = [](int d, double alpha, const json& p) {
    only_keys(p, {"core_mass"}, "kernel.params");
    return make_core_tail_kernel(d, alpha, param_or(p, "core_mass", 0.5));
  };
  factories_["truncated_pareto"] = [](int d, double alpha, const json& p) {
    only_keys(p, {"r0", "cutoff"}, "kernel.params");
    return make_truncated_pareto_kernel(d, alpha, param_or(p, "r0", 1.0),
                                        param_or(p, "cutoff", 10.0));
  };
}

KernelRegistry& KernelRegistry::instance() {
  static KernelRegistry registry;
  return registry;
}

void KernelRegistry::add(const std::string& name, Factory factory) {
  factories_[name] = std::move(factory);
}

bool KernelRegistry::contains(const std::string& name) const { return factories_.count(name) > 0; }

KernelSpec KernelRegistry::make(const std::string& name, int d, double alpha,
                                const json& params) const {
  const auto it = factories_.find(name);
  require(it != factories_.end(), ErrorCode::config_error, "unknown kernel \"" + name + "\"");
  return it->second(d, alpha, params);
}

std::vector<std::string> KernelRegistry::names() const {
  std::vector<std::string> out;
  for (const auto& [name, f] : factories_) out.push_back(name);
  return out;
}

// ---------------------------------------------------------------------------
// Quadrature helpers

json QuadConfig::to_json() const {
  return {{"rule", "gauss_legendre_20"},
          {"near_panels", near_panels},
          {"shell_tol", shell_tol},
          {"max_shells", max_shells},
          {"angular_points", angular_points},
          {"analytic_tail", analytic_tail}};
}

double DirectionSet::surface_measure(int d) const {
  if (d == 1) return sign == 0 ? 2.0 : 1.0;
  return theta_hi - theta_lo;
}

DirectionSet DirectionSet::negated(int d) const {
  DirectionSet out = *this;
  out.label = "-(" + label + ")";
  if (d == 1) {
    out.sign = -sign;
  } else {
    out.theta_lo = theta_lo + M_PI;
    out.theta_hi = theta_hi + M_PI;
    if (out.theta_lo >= 2.0 * M_PI) {
      out.theta_lo -= 2.0 * M_PI;
      out.theta_hi -= 2.0 * M_PI;
    }
  }
  return out;
}

bool DirectionSet::contains(const Point& unit, int d) const {
  if (d == 1) return sign == 0 || (sign > 0 ? unit[0] > 0.0 : unit[0] < 0.0);
  double theta = std::atan2(unit[1], unit[0]);
  if (theta < 0.0) theta += 2.0 * M_PI;
  for (double shift : {0.0, 2.0 * M_PI, -2.0 * M_PI})
    if (theta + shift >= theta_lo && theta + shift < theta_hi) return true;
  return false;
}

std::vector<DirectionSet> default_direction_sets(int d, int sectors) {
  if (d == 1) return {DirectionSet{"+1", +1}, DirectionSet{"-1", -1}};
  std::vector<DirectionSet> out;
  const double width = 2.0 * M_PI / sectors;
  for (int s = 0; s < sectors; ++s)
    out.push_back(DirectionSet{"sector" + std::to_string(s), 0, s * width, (s + 1) * width});
  return out;
}

namespace {

/// Radial profile g(r) such that the mass over a <= |z| <= b in `set` is the
/// integral of g over [a, b].
std::function<double(double)> radial_profile(const KernelSpec& kernel, const DirectionSet& set,
                                             const QuadConfig& quad) {
  const int d = kernel.dimension();
  if (d == 1) {
    return [&kernel, set](double r) {
      double sum = 0.0;
      if (set.sign >= 0) sum += kernel.radial(r, {1.0, 0.0});
      if (set.sign <= 0) sum += kernel.radial(r, {-1.0, 0.0});
      return sum;
    };
  }
  const double width = set.theta_hi - set.theta_lo;
  const int panels = std::max(1, static_cast<int>(std::ceil(quad.angular_points * width /
                                                            (2.0 * M_PI * GaussRule::order))));
  return [&kernel, set, panels](double r) {
    auto angular = [&](double theta) {
      return kernel.radial(r, {std::cos(theta), std::sin(theta)});
    };
    return r * panel_integrate(angular, set.theta_lo, set.theta_hi, panels);
  };
}

/// Integral of g over [a, b] with near-field panels below radius 1 and
/// dyadic shells beyond.
double radial_integral(const std::function<double(double)>& g, double a, double b,
                       const QuadConfig& quad, std::span<const double> breaks) {
  double total = 0.0;
  if (a < 1.0) {
    const double top = std::min(b, 1.0);
    total += panel_integrate(g, a, top, quad.near_panels, breaks);
    a = top;
  }
  for (double lo = a; lo < b;) {
    const double hi = std::min(2.0 * lo, b);
    total += panel_integrate(g, lo, hi, 1, breaks);
    lo = hi;
  }
  return total;
}

DyadicResult radial_tail(const std::function<double(double)>& g, double a, const QuadConfig& quad,
                         std::span<const double> breaks) {
  DyadicResult out;
  if (a < 1.0) {
    out.value = radial_integral(g, a, 1.0, quad, breaks);
    a = 1.0;
  }
  const auto tail = dyadic_tail_integrate(g, a, quad.shell_tol, quad.max_shells, breaks);
  out.value += tail.value;
  out.shells = tail.shells;
  out.converged = tail.converged;
  return out;
}

bool tail_covers(const KernelSpec& kernel, double r, const QuadConfig& quad) {
  return quad.analytic_tail && kernel.tail() && r >= kernel.tail()->r0;
}

/// Closed-form mass over R1 < |z| < R2 (R2 may be infinite) in a set of
/// surface measure `surface`, valid when the descriptor covers R1.
double analytic_shell(const KernelSpec& kernel, double surface, double R1, double R2) {
  const double a = kernel.alpha();
  const double upper = std::isinf(R2) ? 0.0 : std::pow(R2, -a);
  return surface * kernel.tail()->c_tail * (std::pow(R1, -a) - upper) / a;
}

std::vector<Point> symmetry_samples(int d) {
  std::vector<Point> out;
  std::vector<Point> dirs;
  if (d == 1) {
    dirs.push_back({1.0, 0.0});
  } else {
    for (int k = 0; k < 16; ++k) {
      const double t = 2.0 * M_PI * (k + 0.25) / 16.0;
      dirs.push_back({std::cos(t), std::sin(t)});
    }
  }
  for (double r = 0.01; r <= 1.0e4; r *= 1.37)
    for (const auto& u : dirs) out.push_back(r * u);
  return out;
}

}  // namespace

double sector_mass(const KernelSpec& kernel, double R1, double R2, const DirectionSet& set,
                   const QuadConfig& quad) {
  require(R1 >= 0.0 && R2 > R1, ErrorCode::invalid_parameter, "invalid radial range");
  const int d = kernel.dimension();
  if (tail_covers(kernel, R1, quad)) return analytic_shell(kernel, set.surface_measure(d), R1, R2);
  const auto g = radial_profile(kernel, set, quad);
  const auto& breaks = kernel.breakpoints();
  if (std::isinf(R2)) {
    if (quad.analytic_tail && kernel.tail()) {
      const double r0 = kernel.tail()->r0;
      return radial_integral(g, R1, r0, quad, breaks) +
             analytic_shell(kernel, set.surface_measure(d), r0, R2);
    }
    const auto tail = radial_tail(g, R1, quad, breaks);
    require(tail.converged, ErrorCode::quadrature_stall,
            "tail quadrature did not converge for kernel " + kernel.name());
    return tail.value;
  }
  if (quad.analytic_tail && kernel.tail() && R2 > kernel.tail()->r0) {
    const double r0 = kernel.tail()->r0;
    return radial_integral(g, R1, r0, quad, breaks) +
           analytic_shell(kernel, set.surface_measure(d), r0, R2);
  }
  return radial_integral(g, R1, R2, quad, breaks);
}

double tail_mass(const KernelSpec& kernel, double R, const QuadConfig& quad) {
  require(R > 0.0, ErrorCode::invalid_parameter, "tail_mass requires R > 0");
  return sector_mass(kernel, R, std::numeric_limits<double>::infinity(), DirectionSet{"all", 0},
                     quad);
}

H1Result check_h1(const KernelSpec& kernel, const QuadConfig& quad) {
  H1Result out;
  const int d = kernel.dimension();
  const DirectionSet all{"all", 0, 0.0, 2.0 * M_PI};
  const auto g = radial_profile(kernel, all, quad);
  const auto& breaks = kernel.breakpoints();
  if (quad.analytic_tail && kernel.tail()) {
    const double r0 = kernel.tail()->r0;
    out.mass = radial_integral(g, 0.0, r0, quad, breaks) +
               analytic_shell(kernel, all.surface_measure(d), r0,
                              std::numeric_limits<double>::infinity());
    out.tail_completed = true;
  } else {
    const auto tail = radial_tail(g, 0.0, quad, breaks);
    out.mass = tail.value;
    out.tail_completed = tail.converged;
  }
  out.min_sampled_density = std::numeric_limits<double>::infinity();
  for (const auto& z : symmetry_samples(d)) {
    const double a = kernel(z);
    const double b = kernel(Point{-z[0], -z[1]});
    out.symmetry_defect = std::max(out.symmetry_defect, std::abs(a - b));
    out.min_sampled_density = std::min({out.min_sampled_density, a, b});
  }
  return out;
}

AnnularResult check_annular_bound(const KernelSpec& kernel, const std::vector<double>& radii,
                                  const QuadConfig& quad) {
  AnnularResult out;
  const int d = kernel.dimension();
  const double a = kernel.alpha();
  const DirectionSet all{"all", 0, 0.0, 2.0 * M_PI};
  for (double r : radii) {
    require(r >= kernel.M(), ErrorCode::invalid_parameter, "annular radius below M");
    AnnularValue v{r, 0.0, false};
    if (tail_covers(kernel, r, quad)) {
      // r^alpha * S c (r^-a - (2r)^-a) / a simplifies to S c (1 - 2^-a) / a.
      v.value = sphere_measure(d) * kernel.tail()->c_tail * (1.0 - std::pow(2.0, -a)) / a;
      v.analytic = true;
    } else {
      const auto g = radial_profile(kernel, all, quad);
      v.value = std::pow(r, a) * panel_integrate(g, r, 2.0 * r, 4, kernel.breakpoints());
    }
    out.values.push_back(v);
  }
  out.pass = !out.values.empty();
  for (const auto& v : out.values) {
    out.c2_estimate = std::max(out.c2_estimate, v.value);
    out.pass = out.pass && std::isfinite(v.value);
  }
  return out;
}

LowerBoundResult check_lower_bound(const KernelSpec& kernel, const std::vector<Point>& samples) {
  require(!samples.empty(), ErrorCode::empty_samples, "lower-bound sample set is empty");
  const int d = kernel.dimension();
  LowerBoundResult out;
  out.c1_estimate = std::numeric_limits<double>::infinity();
  for (const auto& z : samples) {
    const double r = norm(z, d);
    require(r >= kernel.M(), ErrorCode::invalid_parameter, "lower-bound sample below M");
    const double v = kernel(z) * std::pow(r, d + kernel.alpha());
    if (v < out.c1_estimate) {
      out.c1_estimate = v;
      out.argmin = z;
    }
  }
  out.samples = samples.size();
  out.pass = out.c1_estimate > 0.0;
  return out;
}

KResult estimate_k(const KernelSpec& kernel, const std::vector<double>& n_list,
                   const std::vector<DirectionSet>& directions, const QuadConfig& quad,
                   double agreement_tol) {
  require(!n_list.empty(), ErrorCode::invalid_parameter, "estimate_k needs at least one n");
  require(!directions.empty(), ErrorCode::invalid_parameter, "estimate_k needs direction sets");
  for (std::size_t i = 0; i < n_list.size(); ++i) {
    require(n_list[i] >= kernel.M(), ErrorCode::invalid_parameter, "n below M in estimate_k");
    require(i == 0 || n_list[i] > n_list[i - 1], ErrorCode::invalid_parameter,
            "n_list must be increasing");
  }
  const int d = kernel.dimension();
  const double a = kernel.alpha();
  const double inf = std::numeric_limits<double>::infinity();

  auto run = [&](const DirectionSet& set) {
    KEstimate est;
    est.set = set;
    est.n_values = n_list;
    for (double n : n_list) {
      const double mass = sector_mass(kernel, n, inf, set, quad);
      est.k_sequence.push_back(a * std::pow(n, a) * mass / set.surface_measure(d));
    }
    const std::size_t m = est.k_sequence.size();
    if (m == 1) {
      est.extrapolated = est.k_sequence[0];
      est.converged = true;
    } else {
      const double n1 = n_list[m - 2], n2 = n_list[m - 1];
      const double k1 = est.k_sequence[m - 2], k2 = est.k_sequence[m - 1];
      // Richardson step assuming an O(1/n) remainder.
      est.extrapolated = (n2 * k2 - n1 * k1) / (n2 - n1);
      est.converged = std::abs(k2 - k1) <= agreement_tol * std::abs(k2) &&
                      std::abs(est.extrapolated - k2) <= agreement_tol * std::abs(k2);
    }
    return est;
  };

  KResult out;
  out.k_min = inf;
  out.k_max = 0.0;
  bool all_converged = true;
  for (const auto& set : directions) {
    auto est = run(set);
    const auto mirror = run(set.negated(d));
    out.symmetry_defect =
        std::max(out.symmetry_defect, std::abs(est.extrapolated - mirror.extrapolated));
    out.k_min = std::min(out.k_min, est.extrapolated);
    out.k_max = std::max(out.k_max, est.extrapolated);
    all_converged = all_converged && est.converged && mirror.converged;
    out.estimates.push_back(std::move(est));
  }
  out.pass = all_converged && out.k_min > 0.0 &&
             out.symmetry_defect <= agreement_tol * out.k_max;
  return out;
}

PhiResult oscillation_phi(const KernelSpec& kernel, const std::vector<double>& r_list,
                          int angular_samples) {
  const int d = kernel.dimension();
  const auto& rule = gauss_rule();
  const int q = GaussRule::order;

  // Unit-cube product rule on [-1/2, 1/2]^d.
  std::vector<Point> nodes;
  std::vector<double> weights;
  for (int i = 0; i < q; ++i) {
    if (d == 1) {
      nodes.push_back({0.5 * rule.nodes[i], 0.0});
      weights.push_back(0.5 * rule.weights[i]);
      continue;
    }
    for (int j = 0; j < q; ++j) {
      nodes.push_back({0.5 * rule.nodes[i], 0.5 * rule.nodes[j]});
      weights.push_back(0.25 * rule.weights[i] * rule.weights[j]);
    }
  }
  auto cube_average = [&](const Point& z) {
    double s = 0.0;
    for (std::size_t k = 0; k < nodes.size(); ++k) s += weights[k] * kernel(z + nodes[k]);
    return s;
  };
  auto cube_deviation = [&](const Point& z, double level) {
    double s = 0.0;
    for (std::size_t k = 0; k < nodes.size(); ++k)
      s += weights[k] * std::abs(kernel(z + nodes[k]) - level);
    return s;
  };

  std::vector<Point> offsets;
  if (d == 1) {
    offsets = {{-1.0, 0.0}, {0.0, 0.0}, {1.0, 0.0}};
  } else {
    for (int i = -1; i <= 1; ++i)
      for (int j = -1; j <= 1; ++j) offsets.push_back({double(i), double(j)});
  }

  PhiResult out;
  for (double r : r_list) {
    PhiSample sample;
    sample.r = r;
    std::vector<Point> centers;
    for (double rho : {r, 2.0 * r}) {
      if (d == 1) {
        centers.push_back({rho, 0.0});
        centers.push_back({-rho, 0.0});
      } else {
        for (int k = 0; k < angular_samples; ++k) {
          const double t = 2.0 * M_PI * k / angular_samples;
          centers.push_back({rho * std::cos(t), rho * std::sin(t)});
        }
      }
    }
    for (const auto& z : centers) {
      const double own = cube_average(z);
      if (!(own > 0.0)) {
        sample.degenerate_cubes.push_back(z);
        continue;
      }
      for (const auto& o : offsets) {
        const Point zp = z + o;
        const double level = cube_average(zp);
        const double ratio = cube_deviation(z, level) / own;
        ++sample.pairs;
        if (ratio > sample.phi || sample.pairs == 1) {
          sample.phi = std::max(sample.phi, ratio);
          if (ratio >= sample.phi) {
            sample.argmax_z = z;
            sample.argmax_zprime = zp;
          }
        }
      }
    }
    out.values.push_back(std::move(sample));
  }
  return out;
}

// ---------------------------------------------------------------------------
// KTable

KTable::KTable(int d, std::vector<DirectionSet> sets, std::vector<double> values)
    : d_(d), sets_(std::move(sets)), values_(std::move(values)) {
  require(sets_.size() == values_.size() && !sets_.empty(), ErrorCode::invalid_parameter,
          "k table needs one value per direction set");
}

KTable KTable::constant(int d, double value) {
  if (d == 1) return KTable(1, default_direction_sets(1), {value, value});
  return KTable(2, {DirectionSet{"all", 0, 0.0, 2.0 * M_PI}}, {value});
}

KTable KTable::from(const KResult& result, int d) {
  std::vector<DirectionSet> sets;
  std::vector<double> values;
  for (const auto& e : result.estimates) {
    sets.push_back(e.set);
    values.push_back(e.extrapolated);
  }
  // One-sided d = 1 tables are completed by the symmetry of k.
  if (d == 1 && sets.size() == 1 && sets[0].sign != 0) {
    sets.push_back(sets[0].negated(1));
    values.push_back(values[0]);
  }
  return KTable(d, std::move(sets), std::move(values));
}

double KTable::operator()(const Point& direction) const {
  for (std::size_t i = 0; i < sets_.size(); ++i)
    if (sets_[i].contains(direction, d_)) return values_[i];
  fail(ErrorCode::invalid_parameter, "direction not covered by the k table");
}

bool KTable::is_constant() const {
  return std::all_of(values_.begin(), values_.end(), [&](double v) { return v == values_[0]; });
}

std::vector<double> KTable::boundaries() const {
  std::vector<double> out;
  if (d_ == 2)
    for (const auto& s : sets_) {
      out.push_back(s.theta_lo);
      out.push_back(s.theta_hi);
    }
  return out;
}

json KTable::to_json() const {
  json rows = json::array();
  for (std::size_t i = 0; i < sets_.size(); ++i) {
    json row{{"label", sets_[i].label}, {"k", values_[i]}};
    if (d_ == 1)
      row["sign"] = sets_[i].sign;
    else
      row["theta"] = {sets_[i].theta_lo, sets_[i].theta_hi};
    rows.push_back(row);
  }
  return {{"dimension", d_}, {"sets", rows}};
}

// ---------------------------------------------------------------------------
// Full report

HypothesisPlan HypothesisPlan::defaults(const KernelSpec& kernel) {
  HypothesisPlan plan;
  const double M = kernel.M();
  const int d = kernel.dimension();
  plan.annular_radii = {M, 4.0 * M, 16.0 * M, 64.0 * M, 256.0 * M};
  std::vector<Point> dirs;
  if (d == 1) {
    dirs = {{1.0, 0.0}, {-1.0, 0.0}};
  } else {
    for (int k = 0; k < 8; ++k) {
      const double t = 2.0 * M_PI * (k + 0.5) / 8.0;
      dirs.push_back({std::cos(t), std::sin(t)});
    }
  }
  for (int k = 0; k <= 20; ++k)
    for (const auto& u : dirs) plan.lower_samples.push_back(std::ldexp(M, k) * u);
  plan.k_n_list = {128.0 * M, 256.0 * M, 512.0 * M, 1024.0 * M};
  plan.k_directions = default_direction_sets(d);
  plan.phi_r_list = {16.0 * M, 32.0 * M, 64.0 * M};
  return plan;
}

json HypothesisPlan::to_json() const {
  json samples = json::array();
  for (const auto& p : lower_samples) samples.push_back({p[0], p[1]});
  json dirs = json::array();
  for (const auto& s : k_directions)
    dirs.push_back({{"label", s.label}, {"sign", s.sign}, {"theta", {s.theta_lo, s.theta_hi}}});
  return {{"quadrature", quad.to_json()},
          {"annular_radii", annular_radii},
          {"lower_bound_samples", samples},
          {"k_n_list", k_n_list},
          {"k_directions", dirs},
          {"phi_r_list", phi_r_list},
          {"phi_sampling",
           "z on shells {r, 2r}; z' = z + o for integer offsets o with |o| <= sqrt(d); "
           "cube averages by product Gauss-Legendre 20"},
          {"tolerances",
           {{"mass", mass_tol},
            {"symmetry", symmetry_tol},
            {"k_agreement", k_agreement_tol},
            {"h4_threshold", h4_threshold}}}};
}

HypothesisReport check_hypotheses(const KernelSpec& kernel, const HypothesisPlan& plan) {
  HypothesisReport rep;
  rep.plan = plan.to_json();
  rep.h1 = check_h1(kernel, plan.quad);
  rep.h1.pass = std::abs(rep.h1.mass - 1.0) <= plan.mass_tol &&
                rep.h1.symmetry_defect <= plan.symmetry_tol && rep.h1.min_sampled_density >= 0.0;
  rep.annular = check_annular_bound(kernel, plan.annular_radii, plan.quad);
  rep.lower = check_lower_bound(kernel, plan.lower_samples);
  rep.k = estimate_k(kernel, plan.k_n_list, plan.k_directions, plan.quad, plan.k_agreement_tol);
  rep.phi = oscillation_phi(kernel, plan.phi_r_list);

  bool h4 = !rep.phi.values.empty();
  for (std::size_t i = 0; i < rep.phi.values.size(); ++i) {
    const auto& v = rep.phi.values[i];
    h4 = h4 && v.degenerate_cubes.empty() && std::isfinite(v.phi);
    if (i > 0) h4 = h4 && v.phi <= rep.phi.values[i - 1].phi * (1.0 + 1e-12);
  }
  h4 = h4 && rep.phi.values.back().phi < plan.h4_threshold;
  rep.phi.pass = h4;

  rep.verdict["H1"] = rep.h1.pass;
  rep.verdict["H2-lower"] = rep.lower.pass;
  rep.verdict["H2-upper"] = rep.annular.pass;
  rep.verdict["H3"] = rep.k.pass;
  rep.verdict["H4"] = rep.phi.pass;
  return rep;
}

bool HypothesisReport::all_pass() const {
  return std::all_of(verdict.begin(), verdict.end(), [](const auto& kv) { return kv.second; });
}

json HypothesisReport::to_json() const {
  json annular_rows = json::array();
  for (const auto& v : annular.values)
    annular_rows.push_back({{"r", v.r}, {"value", v.value}, {"analytic", v.analytic}});
  json k_rows = json::array();
  for (const auto& e : k.estimates)
    k_rows.push_back({{"set", e.set.label},
                      {"n", e.n_values},
                      {"k", e.k_sequence},
                      {"extrapolated", e.extrapolated},
                      {"converged", e.converged}});
  json phi_rows = json::array();
  for (const auto& v : phi.values) {
    json degenerate = json::array();
    for (const auto& z : v.degenerate_cubes) degenerate.push_back({z[0], z[1]});
    phi_rows.push_back({{"r", v.r},
                        {"phi", v.phi},
                        {"pairs", v.pairs},
                        {"argmax_z", {v.argmax_z[0], v.argmax_z[1]}},
                        {"argmax_zprime", {v.argmax_zprime[0], v.argmax_zprime[1]}},
                        {"degenerate_cubes", degenerate}});
  }
  return {{"mass", h1.mass},
          {"symmetry_defect", h1.symmetry_defect},
          {"min_sampled_density", h1.min_sampled_density},
          {"tail_completed", h1.tail_completed},
          {"c1_estimate", lower.c1_estimate},
          {"c1_argmin", {lower.argmin[0], lower.argmin[1]}},
          {"c2_estimate", annular.c2_estimate},
          {"annular", annular_rows},
          {"k_values", k_rows},
          {"k_symmetry_defect", k.symmetry_defect},
          {"k_bounds", {k.k_min, k.k_max}},
          {"phi_values", phi_rows},
          {"verdict", verdict},
          {"plan", plan}};
}

}  // namespace nlh
