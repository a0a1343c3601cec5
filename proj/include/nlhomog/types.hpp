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
#include <cmath>
#include <stdexcept>
#include <string>

namespace nlh {

/// Point in R^d for d <= 2. Unused trailing components are zero.
using Point = std::array<double, 2>;

inline double norm(const Point& p, int d) {
  return d == 1 ? std::abs(p[0]) : std::hypot(p[0], p[1]);
}

inline Point operator-(const Point& a, const Point& b) { return {a[0] - b[0], a[1] - b[1]}; }
inline Point operator+(const Point& a, const Point& b) { return {a[0] + b[0], a[1] + b[1]}; }
inline Point operator*(double s, const Point& a) { return {s * a[0], s * a[1]}; }

/// Surface measure of the unit sphere S^{d-1}: counting measure for d = 1.
inline double sphere_measure(int d) { return d == 1 ? 2.0 : 2.0 * M_PI; }

enum class ErrorCode {
  invalid_parameter,
  resolution_violation,
  quadrature_stall,
  grid_mismatch,
  coincident_points,
  empty_samples,
  inapplicable_structure,
  scale_separation,
  delta_out_of_range,
  config_error,
  io_error,
  max_iterations,
  internal,
};

const char* to_string(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what) : std::runtime_error(what), code_(code) {}
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) { throw Error(code, what); }

inline void require(bool cond, ErrorCode code, const std::string& what) {
  if (!cond) fail(code, what);
}

}  // namespace nlh
