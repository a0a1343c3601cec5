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
#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "nlhomog/diagnostics.hpp"

namespace nlh {

/// Parsed run configuration. Every key is optional except schema_version,
/// dimension, alpha and kernel; unknown keys are config errors.
struct ExperimentConfig {
  nlohmann::json raw;

  int dimension = 1;
  double alpha = 1.0;
  std::string kernel_name;
  nlohmann::json kernel_params = nlohmann::json::object();
  std::string coefficient_name = "constant";
  std::string coefficient_mode = "periodic";
  nlohmann::json coefficient_params = nlohmann::json::object();
  double R = 8.0;
  int N = 4096;
  std::vector<double> eps{0.25, 0.125, 0.0625, 0.03125};
  Profile f;
  SolveConfig solver;
  AssemblyConfig assembly;
  /// Constant k overriding the estimated table.
  std::optional<double> k_constant;

  std::vector<double> annular_radii;
  std::vector<double> k_n_list;
  std::vector<double> phi_r_list;
  int sectors = 8;

  std::vector<std::pair<Point, Point>> effective_samples;
  /// Empty: solve the limit problem.
  std::optional<double> solve_eps;

  std::optional<double> diag_eps;
  std::vector<double> regions{0.5, 0.25};
  std::vector<std::pair<double, double>> cubes;
  std::vector<int> translation_shifts{8, 16, 32, 64, 128, 256, 512};
  std::vector<double> exterior_n;
  Profile diag_u;
  Profile diag_phi;

  double mass_tol = 1e-6;
  double symmetry_tol = 1e-12;
  double k_agreement_tol = 0.01;
  double h4_threshold = 0.5;
  double effective_tol = 1e-9;

  std::string output_dir;

  static ExperimentConfig parse(const nlohmann::json& j);
  static ExperimentConfig parse_text(const std::string& text);

  KernelSpec kernel() const;
  Coefficient coefficient() const;
  Grid grid() const;
  HypothesisPlan hypothesis_plan(const KernelSpec& kernel) const;
  /// k_constant when set, else the table estimated with the hypothesis plan.
  KTable k_table(const KernelSpec& kernel) const;
  StudySpec study(bool keep_solutions) const;
};

struct CommandResult {
  /// 0 success, 2 hypothesis failure. Execution errors are thrown.
  int exit_code = 0;
  nlohmann::json summary;
  std::vector<std::string> files;
};

/// Runs check-kernel, effective, solve, converge or diagnose and writes its
/// artifacts (plus a copy of the config) into `out_dir`.
CommandResult run_command(const std::string& command, const ExperimentConfig& cfg,
                          const std::filesystem::path& out_dir, std::uint64_t seed);

std::vector<std::string> command_names();

}  // namespace nlh
