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

#include "nlhomog/quadrature.hpp"

#include <algorithm>
#include <cmath>

#include <boost/math/quadrature/gauss.hpp>

namespace nlh {

const GaussRule& gauss_rule() {
  static const GaussRule rule = [] {
    using boost_rule = boost::math::quadrature::gauss<double, GaussRule::order>;
    const auto& x = boost_rule::abscissa();
    const auto& w = boost_rule::weights();
    GaussRule r{};
    // Boost stores the non-negative half of a symmetric rule.
    constexpr int half = GaussRule::order / 2;
    for (int i = 0; i < half; ++i) {
      r.nodes[half - 1 - i] = -x[i];
      r.weights[half - 1 - i] = w[i];
      r.nodes[half + i] = x[i];
      r.weights[half + i] = w[i];
    }
    return r;
  }();
  return rule;
}

double gauss_integrate(const std::function<double(double)>& f, double a, double b) {
  const auto& rule = gauss_rule();
  const double mid = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  double sum = 0.0;
  for (int k = 0; k < GaussRule::order; ++k) sum += rule.weights[k] * f(mid + half * rule.nodes[k]);
  return half * sum;
}

namespace {

std::vector<double> cut_points(double a, double b, std::span<const double> breakpoints) {
  std::vector<double> cuts{a};
  for (double p : breakpoints)
    if (p > a && p < b) cuts.push_back(p);
  std::sort(cuts.begin() + 1, cuts.end());
  cuts.push_back(b);
  return cuts;
}

}  // namespace

double panel_integrate(const std::function<double(double)>& f, double a, double b, int panels,
                       std::span<const double> breakpoints) {
  if (!(b > a)) return 0.0;
  const auto cuts = cut_points(a, b, breakpoints);
  double total = 0.0;
  for (std::size_t c = 0; c + 1 < cuts.size(); ++c) {
    const double lo = cuts[c];
    const double hi = cuts[c + 1];
    const double width = (hi - lo) / panels;
    for (int p = 0; p < panels; ++p) {
      const double pa = lo + p * width;
      const double pb = (p + 1 == panels) ? hi : lo + (p + 1) * width;
      total += gauss_integrate(f, pa, pb);
    }
  }
  return total;
}

DyadicResult dyadic_tail_integrate(const std::function<double(double)>& f, double a, double tol,
                                   int max_shells, std::span<const double> breakpoints) {
  DyadicResult result;
  const double last_break =
      breakpoints.empty() ? 0.0 : *std::max_element(breakpoints.begin(), breakpoints.end());
  int quiet = 0;
  double lo = a;
  for (int k = 0; k < max_shells; ++k) {
    const double hi = 2.0 * lo;
    const double contrib = panel_integrate(f, lo, hi, 1, breakpoints);
    result.value += contrib;
    result.shells = k + 1;
    if (std::abs(contrib) <= tol * std::abs(result.value) && lo >= last_break) {
      if (++quiet >= 2) {
        result.converged = true;
        return result;
      }
    } else {
      quiet = 0;
    }
    lo = hi;
  }
  return result;
}

std::vector<double> midpoint_nodes(int s) {
  std::vector<double> nodes(static_cast<std::size_t>(s));
  for (int k = 0; k < s; ++k) nodes[k] = (k + 0.5) / s;
  return nodes;
}

}  // namespace nlh
