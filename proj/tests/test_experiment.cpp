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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <string>

#include "nlhomog/experiment.hpp"
#include "nlhomog/io.hpp"

using namespace nlh;
using nlohmann::json;

namespace {

json base() {
  return {{"schema_version", 1}, {"dimension", 1}, {"alpha", 1.0}, {"kernel", {{"name", "pareto"}}}};
}

std::string error_of(const json& j, ErrorCode* code = nullptr) {
  try {
    ExperimentConfig::parse(j);
  } catch (const Error& e) {
    if (code) *code = e.code();
    return e.what();
  }
  return "";
}

}  // namespace

TEST_CASE("defaults") {
  auto c = ExperimentConfig::parse(base());
  CHECK(c.coefficient_name == "constant");
  CHECK(c.coefficient_mode == "periodic");
  CHECK(c.N == 4096);
  CHECK(c.eps.size() == 4);
  CHECK(c.solver.m == 1.0);
  CHECK(!c.solve_eps);
  CHECK(c.cubes.size() == 2);  // 1/16 and 1/32 at delta 1/2
  CHECK(c.exterior_n == std::vector<double>{1.0, 2.0, 4.0});
}

TEST_CASE("errors name the offending key") {
  ErrorCode code{};
  auto j = base();
  j["alpha"] = 2.5;
  CHECK(error_of(j, &code).find("alpha") != std::string::npos);
  CHECK(code == ErrorCode::config_error);

  j = base();
  j["grid"] = {{"R", 8.0}, {"n", 64}};
  CHECK(error_of(j).find("grid.n") != std::string::npos);

  j = base();
  j.erase("kernel");
  CHECK(error_of(j).find("kernel") != std::string::npos);

  j = base();
  j["kernel"]["params"] = {{"r0", 1.0}, {"rzero", 2.0}};
  CHECK(error_of(j).find("rzero") != std::string::npos);

  j = base();
  j["eps"] = {0.25, 0.1};
  CHECK(error_of(j).find("dyadic") != std::string::npos);

  j = base();
  j["coefficient"] = {{"name", "sin_product"}, {"mode", "locally_periodic"}};
  CHECK(error_of(j).find("coefficient.mode") != std::string::npos);

  j = base();
  j["grid"] = {{"R", 8.0}, {"N", 64}};
  CHECK(error_of(j, &code).find("resolution") != std::string::npos);
  CHECK(code == ErrorCode::resolution_violation);

  j = base();
  j["schema_version"] = 2;
  CHECK(error_of(j).find("schema_version") != std::string::npos);

  j = base();
  j["f"] = {{"profile", "gaussian"}, {"width", 1.0}};
  CHECK(error_of(j).find("width") != std::string::npos);

  CHECK_THROWS_AS(ExperimentConfig::parse_text("{not json"), Error);
}

TEST_CASE("overrides") {
  auto j = base();
  j["coefficient"] = {{"name", "locally_periodic"}};
  j["solve"] = {{"eps", 0.125}};
  j["k"] = 0.5;
  j["diagnostics"] = {{"translation_shifts", {4, 8}}, {"u", {{"profile", "bump"}, {"radius", 0.5}}}};
  j["hypotheses"] = {{"k_n_list", {64, 128}}};
  auto c = ExperimentConfig::parse(j);
  CHECK(c.coefficient_mode == "locally_periodic");
  CHECK(c.cubes.empty());
  CHECK(*c.solve_eps == 0.125);
  CHECK(c.translation_shifts == std::vector<int>{4, 8});
  CHECK(c.diag_u.name == "bump");
  auto kernel = c.kernel();
  CHECK(c.k_table(kernel).is_constant());
  CHECK(c.hypothesis_plan(kernel).k_n_list == std::vector<double>{64, 128});
}

TEST_CASE("effective command output") {
  auto j = base();
  j["coefficient"] = {{"name", "cos_difference"}};
  const auto dir = std::filesystem::temp_directory_path() / "nlhomog_test_experiment";
  std::filesystem::remove_all(dir);
  auto res = run_command("effective", ExperimentConfig::parse(j), dir, 3);
  CHECK(res.exit_code == 0);
  auto out = json::parse(read_file(dir / "effective.json"));
  CHECK(out["lambda_bar"]["value"].get<double>() == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(out["k_source"] == "estimated");
  CHECK(out["audit"]["seed"] == 3);
  CHECK(json::parse(read_file(dir / "config.json")) == j);
  CHECK_THROWS_AS(run_command("bogus", ExperimentConfig::parse(j), dir, 0), Error);
  std::filesystem::remove_all(dir);
}
