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

#include <array>
#include <functional>
#include <span>
#include <vector>

namespace nlh {

/// Fixed 20-point Gauss-Legendre rule on [-1, 1].
struct GaussRule {
  static constexpr int order = 20;
  std::array<double, order> nodes;
  std::array<double, order> weights;
};

const GaussRule& gauss_rule();

/// Gauss-Legendre integral of f over [a, b].
double gauss_integrate(const std::function<double(double)>& f, double a, double b);

/// Gauss integral over [a, b] split into `panels` equal panels and at every
/// breakpoint lying strictly inside (a, b).
double panel_integrate(const std::function<double(double)>& f, double a, double b, int panels,
                       std::span<const double> breakpoints = {});

struct DyadicResult {
  double value = 0.0;
  int shells = 0;
  bool converged = false;
};

/// Integral of f over [a, inf) on geometric shells [a 2^k, a 2^{k+1}], each
/// split at breakpoints. Stops once two consecutive shells each contribute at
/// most `tol` times the running total (or exactly zero past the last
/// breakpoint). Returns converged = false after `max_shells`.
DyadicResult dyadic_tail_integrate(const std::function<double(double)>& f, double a, double tol,
                                   int max_shells, std::span<const double> breakpoints = {});

/// Midpoint nodes (k + 1/2)/s, k = 0..s-1, on the unit interval.
std::vector<double> midpoint_nodes(int s);

}  // namespace nlh
