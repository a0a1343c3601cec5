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

#include "nlhomog/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <sstream>
#include <unordered_set>

#include "nlhomog/io.hpp"

namespace nlh {

using nlohmann::json;

namespace {

void reject_unknown(const json& j, std::initializer_list<const char*> allowed, const std::string& where) {
  for (auto it = j.begin(); it != j.end(); ++it) {
    bool ok = false;
    for (const char* a : allowed) ok = ok || it.key() == a;
    if (!ok) fail(ErrorCode::config_error, "unknown key '" + where + "." + it.key() + "'");
  }
}

double number(const json& j, const char* key, const std::string& where) {
  if (!j.at(key).is_number())
    fail(ErrorCode::config_error, "key '" + where + "." + key + "' must be a number");
  return j.at(key).get<double>();
}

double l2_distance(const GridFunction& a, const GridFunction& b) {
  require_same_grid(a.grid, b.grid);
  double s = 0.0;
  for (std::size_t i = 0; i < a.values.size(); ++i) {
    const double e = a.values[i] - b.values[i];
    s += e * e;
  }
  return std::sqrt(s * a.grid.cell_volume());
}

}  // namespace

// ---------------------------------------------------------------------------
// Profiles

Profile Profile::from_json(const json& j, int d) {
  if (!j.is_object()) fail(ErrorCode::config_error, "profile must be an object");
  Profile p;
  if (!j.contains("profile") || !j.at("profile").is_string())
    fail(ErrorCode::config_error, "key 'profile' (gaussian, bump or zero) is required");
  p.name = j.at("profile").get<std::string>();
  if (p.name == "gaussian") {
    reject_unknown(j, {"profile", "sigma", "center", "amplitude"}, "profile");
  } else if (p.name == "bump") {
    reject_unknown(j, {"profile", "radius", "center", "amplitude"}, "profile");
  } else if (p.name == "zero") {
    reject_unknown(j, {"profile"}, "profile");
  } else {
    fail(ErrorCode::config_error, "unknown profile '" + p.name + "'");
  }
  if (j.contains("sigma")) p.sigma = number(j, "sigma", "profile");
  if (j.contains("radius")) p.radius = number(j, "radius", "profile");
  if (j.contains("amplitude")) p.amplitude = number(j, "amplitude", "profile");
  if (j.contains("center")) {
    const json& c = j.at("center");
    if (c.is_number()) {
      p.center = {c.get<double>(), 0.0};
    } else if (c.is_array() && int(c.size()) == d && c[0].is_number() &&
               (d == 1 || c[1].is_number())) {
      p.center = {c[0].get<double>(), d == 2 ? c[1].get<double>() : 0.0};
    } else {
      fail(ErrorCode::config_error, "key 'profile.center' must be a number or a d-vector");
    }
    if (d == 1 && c.is_number()) p.center[1] = 0.0;
  }
  require(p.sigma > 0.0, ErrorCode::config_error, "key 'profile.sigma' must be positive");
  require(p.radius > 0.0, ErrorCode::config_error, "key 'profile.radius' must be positive");
  return p;
}

json Profile::to_json(int d) const {
  json c = d == 1 ? json(center[0]) : json::array({center[0], center[1]});
  if (name == "gaussian") return {{"profile", name}, {"sigma", sigma}, {"center", c}, {"amplitude", amplitude}};
  if (name == "bump") return {{"profile", name}, {"radius", radius}, {"center", c}, {"amplitude", amplitude}};
  return {{"profile", name}};
}

double Profile::operator()(const Point& x, int d) const {
  const double r = norm(x - center, d);
  if (name == "gaussian") return amplitude * std::exp(-0.5 * r * r / (sigma * sigma));
  if (name == "bump") {
    if (r >= radius) return 0.0;
    const double t = r / radius;
    return amplitude * std::exp(1.0 - 1.0 / (1.0 - t * t));
  }
  return 0.0;
}

double Profile::support_radius(int d) const {
  const double c = norm(center, d);
  if (name == "gaussian") return c + 4.0 * sigma;
  if (name == "bump") return c + radius;
  return 0.0;
}

GridFunction Profile::sample(const Grid& g) const {
  const int d = g.dimension();
  return GridFunction::sample(g, [&](const Point& x) { return (*this)(x, d); });
}

double exterior_cutoff(double t) {
  const double s = t - 1.0;
  if (s <= 0.0) return 0.0;
  if (s >= 1.0) return 1.0;
  const double a = std::exp(-1.0 / s);
  const double b = std::exp(-1.0 / (1.0 - s));
  return a / (a + b);
}

// ---------------------------------------------------------------------------
// Convergence study

NonlocalOperator assemble_limit(const KTable& k, const Coefficient& coeff, double alpha,
                                const Grid& grid, const AssemblyConfig& cfg, double* lambda_bar) {
  if (coeff.mode() == CoefficientMode::periodic) {
    const double lb = effective_lambda(coeff).value;
    if (lambda_bar) *lambda_bar = lb;
    return assemble_effective(k, lb, alpha, grid, cfg);
  }
  if (lambda_bar) *lambda_bar = std::nan("");
  return assemble_effective_field(k, coeff, alpha, grid, cfg);
}

bool ConvergenceReport::strictly_decreasing() const {
  for (std::size_t i = 1; i < rows.size(); ++i)
    if (!(rows[i].l2_error < rows[i - 1].l2_error)) return false;
  return true;
}

json ConvergenceReport::to_json() const {
  json r = json::array();
  for (const auto& row : rows)
    r.push_back({{"eps", row.eps}, {"l2_error", row.l2_error}, {"energy", row.energy},
                 {"solver", row.solve.to_json()}});
  json j = {{"study", study},
            {"u0", {{"l2_norm", u0.l2_norm()}, {"solver", u0_solve.to_json()}}},
            {"rows", r},
            {"strictly_decreasing", strictly_decreasing()}};
  if (std::isfinite(lambda_bar)) j["lambda_bar"] = lambda_bar;
  if (rows.size() >= 2 && rows.front().l2_error > 0.0)
    j["error_ratio_last_first"] = rows.back().l2_error / rows.front().l2_error;
  return j;
}

std::string ConvergenceReport::csv() const {
  std::ostringstream os;
  os << "eps,l2_error,energy,iterations,restarts,rel_residual,l2_norm,converged\n";
  for (const auto& row : rows)
    os << format_double(row.eps) << ',' << format_double(row.l2_error) << ','
       << format_double(row.energy) << ',' << row.solve.iterations << ',' << row.solve.restarts
       << ',' << format_double(row.solve.rel_residual) << ',' << format_double(row.solve.l2_norm)
       << ',' << (row.solve.converged ? 1 : 0) << '\n';
  return os.str();
}

std::string ConvergenceReport::plot_data() const {
  std::ostringstream os;
  os << "# eps l2_error\n";
  for (const auto& row : rows) os << format_double(row.eps) << ' ' << format_double(row.l2_error) << '\n';
  return os.str();
}

ConvergenceReport run_convergence_study(const StudySpec& spec) {
  const Grid& g = spec.grid;
  const int d = g.dimension();
  require(spec.kernel.dimension() == d && spec.coeff.dimension() == d,
          ErrorCode::invalid_parameter, "kernel, coefficient and grid dimensions differ");
  require(!spec.eps.empty(), ErrorCode::invalid_parameter, "eps list is empty");
  for (std::size_t i = 0; i < spec.eps.size(); ++i) {
    require(spec.eps[i] > 0.0, ErrorCode::invalid_parameter, "eps values must be positive");
    if (i > 0)
      require(spec.eps[i] < spec.eps[i - 1], ErrorCode::invalid_parameter,
              "eps list must be strictly decreasing");
  }
  const double min_eps = spec.eps.back();
  if (g.spacing() > min_eps * (1.0 + 1e-12))
    fail(ErrorCode::resolution_violation,
         "resolution rule h <= min eps violated: h = " + format_double(g.spacing()) +
             ", min eps = " + format_double(min_eps));
  require(spec.f.support_radius(d) <= 0.25 * g.half_width() * (1.0 + 1e-12),
          ErrorCode::invalid_parameter, "f must be supported within R/4 of the origin");

  ConvergenceReport rep;
  rep.study = {{"kernel", spec.kernel.describe()},
               {"coefficient", spec.coeff.describe()},
               {"alpha", spec.kernel.alpha()},
               {"m", spec.solve.m},
               {"R", g.half_width()},
               {"N", g.n_per_axis()},
               {"dimension", d},
               {"f", spec.f.to_json(d)},
               {"k", spec.k.to_json()},
               {"solver", spec.solve.to_json()},
               {"assembly", spec.assembly.to_json()}};

  const GridFunction f = spec.f.sample(g);
  {
    const NonlocalOperator l0 =
        assemble_limit(spec.k, spec.coeff, spec.kernel.alpha(), g, spec.assembly, &rep.lambda_bar);
    rep.u0_solve = resolvent_solve(l0, f, spec.solve);
  }
  require(rep.u0_solve.converged, ErrorCode::max_iterations, "limit solve did not converge");
  rep.u0 = rep.u0_solve.solution;

  for (double eps : spec.eps) {
    ConvergenceRow row;
    row.eps = eps;
    const NonlocalOperator op = assemble_eps(spec.kernel, spec.coeff, eps, g, spec.assembly);
    row.solve = resolvent_solve(op, f, spec.solve);
    if (!row.solve.converged)
      fail(ErrorCode::max_iterations, "solve at eps = " + format_double(eps) + " did not converge");
    row.l2_error = l2_distance(row.solve.solution, rep.u0);
    row.energy = op.energy(row.solve.solution, row.solve.solution);
    if (spec.keep_solutions) rep.solutions.push_back(row.solve.solution);
    row.solve.solution = GridFunction();
    rep.rows.push_back(std::move(row));
  }
  return rep;
}

// ---------------------------------------------------------------------------
// Region split

double RegionSplit::partition_defect() const {
  const double scale = std::max(std::abs(total), std::abs(g1) + std::abs(g2) + std::abs(g3));
  if (scale == 0.0) return 0.0;
  return std::abs(g1 + g2 + g3 - total) / scale;
}

json RegionSplit::to_json() const {
  return {{"delta", delta}, {"g1", g1}, {"g2", g2}, {"g3", g3}, {"total", total},
          {"pairs_g1", n1}, {"pairs_g2", n2}, {"pairs_g3", n3},
          {"partition_defect", partition_defect()}};
}

RegionSplit region_split_energy(const NonlocalOperator& op, const GridFunction& u,
                                const GridFunction& phi, double delta) {
  const Grid& g = op.grid();
  require(g.dimension() == 1, ErrorCode::inapplicable_structure,
          "region split is implemented for d = 1 only");
  require_same_grid(g, u.grid);
  require_same_grid(g, phi.grid);
  require(delta > 2.0 * g.spacing() && delta < 0.25 * g.half_width(),
          ErrorCode::delta_out_of_range,
          "delta = " + format_double(delta) + " must lie in (2h, R/4)");

  const std::size_t n = g.size();
  const double hd = g.cell_volume();
  const double inv = 1.0 / delta;
  // Per-row partials, summed serially afterwards for thread-count independent output.
  std::vector<double> p1(n), p2(n), p3(n), pt(n);
  std::vector<std::size_t> c1(n), c2(n), c3(n);
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t ii = 0; ii < std::ptrdiff_t(n); ++ii) {
    const std::size_t i = std::size_t(ii);
    const double xi = g.axis_center(int(i));
    const auto w = op.row(i);
    double s1 = 0, s2 = 0, s3 = 0, st = 0;
    std::size_t k1 = 0, k2 = 0, k3 = 0;
    for (std::size_t j = 0; j < n; ++j) {
      if (j == i) continue;
      const double xj = g.axis_center(int(j));
      const double v = w[j] * (u.values[j] - u.values[i]) * (phi.values[j] - phi.values[i]) * hd;
      st += v;
      if (std::abs(xi) + std::abs(xj) >= inv) {
        s3 += v;
        ++k3;
      } else if (std::abs(xi - xj) <= delta) {
        s2 += v;
        ++k2;
      } else {
        s1 += v;
        ++k1;
      }
    }
    p1[i] = s1, p2[i] = s2, p3[i] = s3, pt[i] = st;
    c1[i] = k1, c2[i] = k2, c3[i] = k3;
  }
  RegionSplit r;
  r.delta = delta;
  for (std::size_t i = 0; i < n; ++i) {
    r.g1 += p1[i], r.g2 += p2[i], r.g3 += p3[i], r.total += pt[i];
    r.n1 += c1[i], r.n2 += c2[i], r.n3 += c3[i];
  }
  return r;
}

// ---------------------------------------------------------------------------
// Cube decomposition

json CubeCheckReport::to_json() const {
  return {{"eps", eps},       {"delta", delta},
          {"lhs", lhs},       {"rhs", rhs},
          {"gap", gap},       {"lambda_bar", lambda_bar},
          {"pairs", pairs},   {"cubes", cubes},
          {"boundary_cubes", boundary_cubes}, {"boundary_mass", boundary_mass}};
}

CubeCheckReport cube_decomposition_check(const KernelSpec& kernel, const Coefficient& coeff,
                                         double eps, double delta, const GridFunction& u,
                                         const GridFunction& phi) {
  const Grid& g = u.grid;
  require_same_grid(g, phi.grid);
  require(g.dimension() == 1 && kernel.dimension() == 1 && coeff.dimension() == 1,
          ErrorCode::inapplicable_structure, "cube check is implemented for d = 1 only");
  require(coeff.mode() == CoefficientMode::periodic, ErrorCode::inapplicable_structure,
          "cube check needs a periodic coefficient");
  require(eps > 0.0 && delta > 0.0, ErrorCode::invalid_parameter, "eps and delta must be positive");
  require(eps <= delta / 8.0 * (1.0 + 1e-12), ErrorCode::scale_separation,
          "scale separation eps <= delta/8 violated: eps = " + format_double(eps) +
              ", delta = " + format_double(delta));
  require(g.spacing() <= eps * (1.0 + 1e-12), ErrorCode::resolution_violation,
          "resolution rule h <= eps violated");

  CubeCheckReport rep;
  rep.eps = eps;
  rep.delta = delta;
  rep.lambda_bar = effective_lambda(coeff).value;
  const double alpha = kernel.alpha();
  const double scale = std::pow(eps, -1.0 - alpha);
  const double h2 = g.cell_volume() * g.cell_volume();
  const double inv = 1.0 / delta;
  const int N = g.n_per_axis();

  // Cells that can share an eps-cube with a G1 pair.
  std::vector<int> idx;
  for (int i = 0; i < N; ++i)
    if (std::abs(g.axis_center(i)) <= inv + eps) idx.push_back(i);

  auto in_g1 = [&](double x, double y) {
    return std::abs(x) + std::abs(y) < inv && std::abs(x - y) > delta;
  };
  auto cube_key = [&](double x, double y) {
    const auto kx = std::int64_t(std::llround(x / eps));
    const auto ky = std::int64_t(std::llround(y / eps));
    return (std::uint64_t(kx + (1 << 30)) << 32) | std::uint64_t(ky + (1 << 30));
  };

  std::unordered_set<std::uint64_t> g1_cubes, mixed_cubes;
  double lhs = 0.0, rhs = 0.0;
  for (int i : idx) {
    const double x = g.axis_center(i);
    for (int j : idx) {
      const double y = g.axis_center(j);
      if (!in_g1(x, y)) continue;
      const double pk = kernel({(x - y) / eps, 0.0}) * scale;
      const double uphi = u.values[i] * phi.values[j] * h2;
      lhs += pk * coeff.periodic_value({x / eps, 0.0}, {y / eps, 0.0}) * uphi;
      rhs += pk * rep.lambda_bar * uphi;
      ++rep.pairs;
      g1_cubes.insert(cube_key(x, y));
    }
  }
  for (int i : idx) {
    const double x = g.axis_center(i);
    for (int j : idx) {
      const double y = g.axis_center(j);
      if (in_g1(x, y)) continue;
      const auto key = cube_key(x, y);
      if (!g1_cubes.count(key)) continue;
      mixed_cubes.insert(key);
      rep.boundary_mass += kernel({(x - y) / eps, 0.0}) * scale * h2;
    }
  }
  rep.lhs = lhs;
  rep.rhs = rhs;
  rep.gap = rhs != 0.0 ? std::abs(lhs - rhs) / std::abs(rhs) : std::abs(lhs - rhs);
  rep.cubes = g1_cubes.size();
  rep.boundary_cubes = mixed_cubes.size();
  return rep;
}

// ---------------------------------------------------------------------------
// Translation energy and exterior decay

double TranslationReport::large_band() const {
  if (large_count == 0 || min_large <= 0.0) return std::nan("");
  return max_large / min_large;
}

json TranslationReport::to_json() const {
  json rows_j = json::array();
  for (const auto& r : rows)
    rows_j.push_back({{"shift", r.shift}, {"h", r.h}, {"energy", r.energy},
                      {"regime", r.large ? "large" : "small"}, {"ratio", r.ratio}});
  json j = {{"eps", eps}, {"threshold", threshold}, {"rows", rows_j},
            {"large_count", large_count}, {"max_small_ratio", max_small}};
  if (large_count > 0) {
    j["max_large_ratio"] = max_large;
    j["min_large_ratio"] = min_large;
    j["large_band"] = large_band();
  }
  return j;
}

TranslationReport translation_energy_check(const GridFunction& u, double eps, double M,
                                           double alpha, const std::vector<int>& shifts) {
  const Grid& g = u.grid;
  const int N = g.n_per_axis();
  const int d = g.dimension();
  TranslationReport rep;
  rep.eps = eps;
  rep.threshold = 3.0 * M * eps;
  rep.min_large = std::numeric_limits<double>::infinity();
  auto value = [&](int ix, int iy) -> double {
    if (ix < 0 || ix >= N) return 0.0;
    return d == 1 ? u.values[std::size_t(ix)] : u.values[std::size_t(ix) * N + iy];
  };
  for (int s : shifts) {
    TranslationRow row;
    row.shift = s;
    row.h = std::abs(s) * g.spacing();
    double e = 0.0;
    const int rows_y = d == 1 ? 1 : N;
    for (int ix = 0; ix < N; ++ix)
      for (int iy = 0; iy < rows_y; ++iy) {
        const double diff = value(ix + s, iy) - value(ix, iy);
        e += diff * diff;
      }
    // Cells outside the box whose shifted image lands inside it.
    for (int t = 0; t < N; ++t) {
      if (t - s >= 0 && t - s < N) continue;
      for (int iy = 0; iy < rows_y; ++iy) {
        const double v = value(t, iy);
        e += v * v;
      }
    }
    row.energy = e * g.cell_volume();
    row.large = row.h >= rep.threshold;
    if (row.large) {
      row.ratio = row.energy / std::pow(row.h, alpha);
      rep.max_large = std::max(rep.max_large, row.ratio);
      rep.min_large = std::min(rep.min_large, row.ratio);
      ++rep.large_count;
    } else {
      row.ratio = row.energy / std::pow(eps, alpha);
      rep.max_small = std::max(rep.max_small, row.ratio);
    }
    rep.rows.push_back(row);
  }
  if (rep.large_count == 0) rep.min_large = 0.0;
  return rep;
}

std::vector<ExteriorRow> exterior_decay_check(const GridFunction& u,
                                              const std::vector<double>& n_list) {
  const Grid& g = u.grid;
  const int d = g.dimension();
  std::vector<ExteriorRow> out;
  for (double n : n_list) {
    require(n > 0.0, ErrorCode::invalid_parameter, "exterior radius n must be positive");
    require(n < g.half_width(), ErrorCode::invalid_parameter,
            "exterior radius n = " + format_double(n) + " must be below R");
    double s = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) {
      const double psi = exterior_cutoff(norm(g.center(i), d) / n);
      s += psi * u.values[i] * u.values[i];
    }
    out.push_back({n, s * g.cell_volume()});
  }
  return out;
}

}  // namespace nlh
