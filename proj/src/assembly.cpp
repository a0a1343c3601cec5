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

#include <algorithm>
#include <cmath>
#include <numeric>

#include "nlhomog/discretization.hpp"
#include "nlhomog/quadrature.hpp"

namespace nlh {

using nlohmann::json;

json AssemblyConfig::to_json() const {
  return {{"subsample", subsample},
          {"band_eps", band},
          {"kappa_periods_1d", kappa_periods_1d},
          {"kappa_periods_2d", kappa_periods_2d},
          {"kappa_panels_per_period", kappa_panels_per_period},
          {"angular_panels", angular_panels},
          {"far_average_points_1d", far_average_points_1d},
          {"far_average_points_2d", far_average_points_2d},
          {"local_average_points_1d", local_average_points_1d},
          {"local_average_points_2d", local_average_points_2d},
          {"field_points", field_points},
          {"field_check_pairs", field_check_pairs},
          {"field_check_tol", field_check_tol},
          {"quadrature", quad.to_json()}};
}

namespace {

/// Integral of p(s e) s^{d-1} over s > S along the unit direction e.
double ray_tail(const KernelSpec& kernel, const Point& e, double S, const QuadConfig& quad) {
  const int d = kernel.dimension();
  const auto& breaks = kernel.breakpoints();
  auto g = [&](double s) {
    const double v = kernel.radial(s, e);
    return d == 1 ? v : v * s;
  };
  if (quad.analytic_tail && kernel.tail()) {
    const double r0 = kernel.tail()->r0, c = kernel.tail()->c_tail, a = kernel.alpha();
    if (S >= r0) return c * std::pow(S, -a) / a;
    const int panels = std::max(1, int(std::ceil(4.0 * (r0 - S))));
    return panel_integrate(g, S, r0, panels, breaks) + c * std::pow(r0, -a) / a;
  }
  const auto tail = dyadic_tail_integrate(g, S, quad.shell_tol, quad.max_shells, breaks);
  require(tail.converged, ErrorCode::quadrature_stall,
          "exterior shells failed to contract for kernel " + kernel.name());
  return tail.value;
}

/// Distance from x to the boundary of [-R, R]^2 along direction (cos t, sin t).
double exit_distance(const Point& x, double R, double t) {
  const double c = std::cos(t), s = std::sin(t);
  double best = std::numeric_limits<double>::infinity();
  if (c > 0.0) best = std::min(best, (R - x[0]) / c);
  if (c < 0.0) best = std::min(best, (-R - x[0]) / c);
  if (s > 0.0) best = std::min(best, (R - x[1]) / s);
  if (s < 0.0) best = std::min(best, (-R - x[1]) / s);
  return best;
}

/// Angles in [0, 2 pi] at which the exit distance (and optionally k) has kinks.
std::vector<double> angular_breaks(const Point& x, double R, const std::vector<double>& extra) {
  std::vector<double> cuts{0.0, 2.0 * M_PI};
  for (double cx : {-R, R})
    for (double cy : {-R, R}) {
      double t = std::atan2(cy - x[1], cx - x[0]);
      if (t < 0.0) t += 2.0 * M_PI;
      cuts.push_back(t);
    }
  for (double t : extra) {
    double u = std::fmod(t, 2.0 * M_PI);
    if (u < 0.0) u += 2.0 * M_PI;
    cuts.push_back(u);
  }
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end(),
                         [](double a, double b) { return std::abs(a - b) < 1e-15; }),
             cuts.end());
  return cuts;
}

/// Sum of f(direction, exit distance) over the exterior rays from x: the
/// two rays in d = 1, an angular Gauss integral in d = 2.
double integrate_rays(const Grid& grid, const Point& x, int angular_panels,
                      const std::vector<double>& extra_breaks,
                      const std::function<double(const Point&, double)>& f) {
  const double R = grid.half_width();
  if (grid.dimension() == 1) return f({1.0, 0.0}, R - x[0]) + f({-1.0, 0.0}, R + x[0]);
  const auto cuts = angular_breaks(x, R, extra_breaks);
  double total = 0.0;
  for (std::size_t c = 0; c + 1 < cuts.size(); ++c) {
    total += panel_integrate(
        [&](double t) {
          return f({std::cos(t), std::sin(t)}, exit_distance(x, R, t));
        },
        cuts[c], cuts[c + 1], angular_panels);
  }
  return total;
}

void check_compatible(const KernelSpec& kernel, const Coefficient& coeff, const Grid& grid) {
  require(kernel.dimension() == grid.dimension() && coeff.dimension() == grid.dimension(),
          ErrorCode::invalid_parameter, "kernel, coefficient and grid dimensions differ");
}

}  // namespace

std::vector<double> eps_kappa(const KernelSpec& kernel, const Coefficient& coeff, double eps,
                              const Grid& grid, const AssemblyConfig& cfg) {
  check_compatible(kernel, coeff, grid);
  require(eps > 0.0, ErrorCode::invalid_parameter, "eps must be positive");
  const int d = grid.dimension();
  const double scale = std::pow(eps, -kernel.alpha());
  const int periods = d == 1 ? cfg.kappa_periods_1d : cfg.kappa_periods_2d;
  const int far_points = d == 1 ? cfg.far_average_points_1d : cfg.far_average_points_2d;
  const auto& breaks = kernel.breakpoints();
  const auto constant = coeff.constant();
  const bool local = coeff.mode() == CoefficientMode::locally_periodic;
  const int local_points = d == 1 ? cfg.local_average_points_1d : cfg.local_average_points_2d;
  const double last_break =
      breaks.empty() ? 0.0 : *std::max_element(breaks.begin(), breaks.end());

  std::vector<double> kappa(grid.size());
  const std::ptrdiff_t n = std::ptrdiff_t(grid.size());
  bool stalled = false;
#pragma omp parallel for schedule(dynamic, 16)
  for (std::ptrdiff_t idx = 0; idx < n; ++idx) {
    try {
      const Point x = grid.center(std::size_t(idx));
      const Point xi{x[0] / eps, x[1] / eps};
      const double far_mean =
          (constant || local) ? 0.0 : row_average(coeff, x, x, xi, far_points);
      auto ray = [&](const Point& e, double T) {
        const double S0 = T / eps;
        if (constant) return *constant * ray_tail(kernel, e, S0, cfg.quad);
        auto weighted = [&](double s) {
          const double pk = kernel.radial(s, e);
          if (pk == 0.0) return 0.0;
          const Point y{x[0] + eps * s * e[0], x[1] + eps * s * e[1]};
          const Point eta{xi[0] + s * e[0], xi[1] + s * e[1]};
          const double jac = d == 1 ? 1.0 : s;
          return pk * jac * coeff(x, y, xi, eta);
        };
        const double S1 = S0 + periods;
        double value = panel_integrate(weighted, S0, S1, periods * cfg.kappa_panels_per_period,
                                       breaks);
        // In d = 1 the coefficient is 1-periodic along the ray. Replacing it by its mean
        // beyond S1 drops the boundary terms of two integrations by parts against the
        // zero-mean antiderivatives G1 = int B1(t) dev(S + t) dt and
        // G2 = -int B2(t)/2 dev(S + t) dt (Bernoulli polynomials); restore them so the
        // remainder is O(p''(S1)).
        double correction = 0.0;
        if (d == 1 && S1 * (1.0 - 1e-4) > last_break) {
          const double p1 = kernel.radial(S1, e);
          const double step = 1e-4 * S1;
          const double dp1 =
              (kernel.radial(S1 + step, e) - kernel.radial(S1 - step, e)) / (2.0 * step);
          auto weighted_deviation = [&](double t) {
            const double s = S1 + t;
            const Point y{x[0] + eps * s * e[0], 0.0};
            const Point eta{xi[0] + s * e[0], 0.0};
            const double mean = local ? row_average(coeff, x, y, xi, local_points) : far_mean;
            const double b1 = t - 0.5;
            const double b2 = t * t - t + 1.0 / 6.0;
            return (p1 * b1 + 0.5 * dp1 * b2) * (coeff(x, y, xi, eta) - mean);
          };
          correction = -panel_integrate(weighted_deviation, 0.0, 1.0, 2);
        }
        value += correction;
        if (!local) return value + far_mean * ray_tail(kernel, e, S1, cfg.quad);
        auto averaged = [&](double s) {
          const double pk = kernel.radial(s, e);
          if (pk == 0.0) return 0.0;
          const Point y{x[0] + eps * s * e[0], x[1] + eps * s * e[1]};
          const double jac = d == 1 ? 1.0 : s;
          return pk * jac * row_average(coeff, x, y, xi, local_points);
        };
        const auto tail =
            dyadic_tail_integrate(averaged, S1, cfg.quad.shell_tol, cfg.quad.max_shells, breaks);
        require(tail.converged, ErrorCode::quadrature_stall,
                "exterior shells failed to contract for kernel " + kernel.name());
        return value + tail.value;
      };
      kappa[idx] = scale * integrate_rays(grid, x, cfg.angular_panels, {}, ray);
    } catch (const Error&) {
#pragma omp atomic write
      stalled = true;
    }
  }
  require(!stalled, ErrorCode::quadrature_stall,
          "exterior shells failed to contract for kernel " + kernel.name());
  return kappa;
}

NonlocalOperator assemble_eps(const KernelSpec& kernel, const Coefficient& coeff, double eps,
                              const Grid& grid, const AssemblyConfig& cfg) {
  check_compatible(kernel, coeff, grid);
  require(eps > 0.0, ErrorCode::invalid_parameter, "eps must be positive");
  require(grid.spacing() <= eps * (1.0 + 1e-12), ErrorCode::resolution_violation,
          "resolution rule violated: grid spacing h = " + std::to_string(grid.spacing()) +
              " exceeds eps = " + std::to_string(eps));
  require(kernel.near_origin_bounded(), ErrorCode::invalid_parameter,
          "kernel must be bounded near the origin for midpoint assembly");
  require(cfg.subsample >= 1, ErrorCode::invalid_parameter, "subsample must be >= 1");

  const int d = grid.dimension();
  const std::size_t n = grid.size();
  const double scale = std::pow(eps, -d - kernel.alpha());
  const double hd = grid.cell_volume();
  const double h = grid.spacing();
  const double band = cfg.band * eps;
  const int s = cfg.subsample;
  std::vector<Point> offsets;
  for (int a = 0; a < s; ++a) {
    const double ta = (-0.5 + (a + 0.5) / s) * h;
    if (d == 1) {
      offsets.push_back({ta, 0.0});
      continue;
    }
    for (int b = 0; b < s; ++b) offsets.push_back({ta, (-0.5 + (b + 0.5) / s) * h});
  }

  std::vector<double> w(n * n, 0.0);
  const std::ptrdiff_t nn = std::ptrdiff_t(n);
#pragma omp parallel for schedule(dynamic, 8)
  for (std::ptrdiff_t i = 0; i < nn; ++i) {
    const Point xi = grid.center(std::size_t(i));
    for (std::size_t j = std::size_t(i) + 1; j < n; ++j) {
      const Point xj = grid.center(j);
      const Point diff = xi - xj;
      double pk;
      if (s > 1 && norm(diff, d) <= band) {
        pk = 0.0;
        for (const auto& o : offsets) pk += kernel(Point{(diff[0] - o[0]) / eps, (diff[1] - o[1]) / eps});
        pk /= double(offsets.size());
      } else {
        pk = kernel(Point{diff[0] / eps, diff[1] / eps});
      }
      const double lam = eval_oscillating(coeff, eps, xi, xj);
      const double v = scale * pk * lam * hd;
      w[std::size_t(i) * n + j] = v;
      w[j * n + std::size_t(i)] = v;
    }
  }

  OperatorMeta meta;
  meta.kind = "eps";
  meta.eps = eps;
  meta.kernel = kernel.describe();
  meta.coefficient = coeff.describe();
  meta.plan = cfg.to_json();
  meta.translation_invariant = coeff.constant().has_value();
  return NonlocalOperator(grid, std::move(w), eps_kappa(kernel, coeff, eps, grid, cfg),
                          std::move(meta));
}

namespace {

NonlocalOperator effective_impl(const KTable& k, const std::function<double(const Point&, const Point&)>& lambda_bar,
                                bool constant, double alpha, const Grid& grid,
                                const AssemblyConfig& cfg, json coefficient_meta) {
  require(alpha > 0.0 && alpha < 2.0, ErrorCode::invalid_parameter, "alpha must lie in (0, 2)");
  require(k.dimension() == grid.dimension(), ErrorCode::invalid_parameter,
          "k table and grid dimensions differ");
  const int d = grid.dimension();
  const std::size_t n = grid.size();
  const double hd = grid.cell_volume();
  const double power = d + alpha;

  std::vector<double> w(n * n, 0.0);
  const std::ptrdiff_t nn = std::ptrdiff_t(n);
#pragma omp parallel for schedule(dynamic, 8)
  for (std::ptrdiff_t i = 0; i < nn; ++i) {
    const Point xi = grid.center(std::size_t(i));
    for (std::size_t j = std::size_t(i) + 1; j < n; ++j) {
      const Point xj = grid.center(j);
      const double r = norm(xi - xj, d);
      const double v = effective_angular_kernel(lambda_bar(xi, xj), k, xi, xj) * hd / std::pow(r, power);
      w[std::size_t(i) * n + j] = v;
      w[j * n + std::size_t(i)] = v;
    }
  }

  const auto kb = k.boundaries();
  std::vector<double> kappa(n);
  bool stalled = false;
#pragma omp parallel for schedule(dynamic, 16)
  for (std::ptrdiff_t idx = 0; idx < nn; ++idx) {
    const Point x = grid.center(std::size_t(idx));
    auto ray = [&](const Point& e, double T) {
      const double kv = k(e);
      if (constant) return lambda_bar(x, x) * kv * std::pow(T, -alpha) / alpha;
      auto g = [&](double rho) {
        const Point y{x[0] + rho * e[0], x[1] + rho * e[1]};
        return lambda_bar(x, y) * std::pow(rho, -1.0 - alpha);
      };
      const auto tail = dyadic_tail_integrate(g, T, cfg.quad.shell_tol, cfg.quad.max_shells);
      if (!tail.converged) {
#pragma omp atomic write
        stalled = true;
      }
      return kv * tail.value;
    };
    kappa[idx] = integrate_rays(grid, x, cfg.angular_panels, kb, ray);
  }
  require(!stalled, ErrorCode::quadrature_stall, "effective exterior shells failed to contract");

  OperatorMeta meta;
  meta.kind = "effective";
  meta.kernel = {{"alpha", alpha}, {"k", k.to_json()}};
  meta.coefficient = std::move(coefficient_meta);
  meta.plan = cfg.to_json();
  meta.translation_invariant = constant;
  return NonlocalOperator(grid, std::move(w), std::move(kappa), std::move(meta));
}

}  // namespace

NonlocalOperator assemble_effective(const KTable& k, double lambda_bar, double alpha,
                                    const Grid& grid, const AssemblyConfig& cfg) {
  require(lambda_bar > 0.0 && std::isfinite(lambda_bar), ErrorCode::invalid_parameter,
          "lambda_bar must be positive");
  return effective_impl(
      k, [lambda_bar](const Point&, const Point&) { return lambda_bar; }, true, alpha, grid, cfg,
      json{{"lambda_bar", lambda_bar}});
}

NonlocalOperator assemble_effective_field(const KTable& k, const Coefficient& coeff, double alpha,
                                          const Grid& grid, const AssemblyConfig& cfg) {
  require(coeff.dimension() == grid.dimension(), ErrorCode::invalid_parameter,
          "coefficient and grid dimensions differ");
  if (coeff.constant()) return assemble_effective(k, *coeff.constant(), alpha, grid, cfg);
  const int s = cfg.field_points;
  // Certify the cheap field rule against its refinement on a fixed set of pairs.
  const std::size_t n = grid.size();
  for (int c = 0; c < cfg.field_check_pairs; ++c) {
    const std::size_t i = (std::size_t(c) * 2654435761u) % n;
    const std::size_t j = (std::size_t(c) * 40503u + n / 3) % n;
    const Point x = grid.center(i), y = grid.center(j);
    const double a = cell_average(coeff, x, y, s);
    const double b = cell_average(coeff, x, y, 2 * s);
    require(std::abs(a - b) <= cfg.field_check_tol * std::abs(b), ErrorCode::quadrature_stall,
            "Lambda_bar field rule with " + std::to_string(s) +
                " points per axis is not converged; raise field_points");
  }
  json meta = coeff.describe();
  meta["field_points"] = s;
  return effective_impl(
      k, [&coeff, s](const Point& x, const Point& y) { return cell_average(coeff, x, y, s); },
      false, alpha, grid, cfg, std::move(meta));
}

}  // namespace nlh
