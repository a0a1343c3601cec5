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

#include "nlhomog/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <set>

#include "nlhomog/io.hpp"

namespace nlh {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

[[noreturn]] void bad_key(const std::string& key, const std::string& what) {
  fail(ErrorCode::config_error, "key '" + key + "' " + what);
}

/// Object view that remembers its path and rejects unknown keys.
class Section {
 public:
  Section(json j, std::string path, std::set<std::string> allowed)
      : j_(std::move(j)), path_(std::move(path)) {
    if (!j_.is_object()) bad_key(path_.empty() ? "<root>" : path_, "must be an object");
    for (auto it = j_.begin(); it != j_.end(); ++it)
      if (!allowed.count(it.key())) bad_key(key(it.key()), "is not recognized");
  }

  bool has(const std::string& k) const { return j_.contains(k); }
  const json& at(const std::string& k) const { return j_.at(k); }
  std::string key(const std::string& k) const { return path_.empty() ? k : path_ + "." + k; }

  double number(const std::string& k) const {
    if (!j_.at(k).is_number()) bad_key(key(k), "must be a number");
    return j_.at(k).get<double>();
  }
  int integer(const std::string& k) const {
    if (!j_.at(k).is_number_integer()) bad_key(key(k), "must be an integer");
    return j_.at(k).get<int>();
  }
  bool boolean(const std::string& k) const {
    if (!j_.at(k).is_boolean()) bad_key(key(k), "must be true or false");
    return j_.at(k).get<bool>();
  }
  std::string string(const std::string& k) const {
    if (!j_.at(k).is_string()) bad_key(key(k), "must be a string");
    return j_.at(k).get<std::string>();
  }
  json object(const std::string& k) const {
    if (!j_.at(k).is_object()) bad_key(key(k), "must be an object");
    return j_.at(k);
  }
  std::vector<double> numbers(const std::string& k) const {
    const json& a = j_.at(k);
    if (!a.is_array()) bad_key(key(k), "must be an array of numbers");
    std::vector<double> out;
    for (const auto& v : a) {
      if (!v.is_number()) bad_key(key(k), "must be an array of numbers");
      out.push_back(v.get<double>());
    }
    return out;
  }
  std::vector<int> integers(const std::string& k) const {
    const json& a = j_.at(k);
    if (!a.is_array()) bad_key(key(k), "must be an array of integers");
    std::vector<int> out;
    for (const auto& v : a) {
      if (!v.is_number_integer()) bad_key(key(k), "must be an array of integers");
      out.push_back(v.get<int>());
    }
    return out;
  }

 private:
  json j_;
  std::string path_;
};

Point point_of(const json& v, int d, const std::string& key) {
  if (v.is_number() && d == 1) return {v.get<double>(), 0.0};
  if (v.is_array() && int(v.size()) == d && v[0].is_number() && (d == 1 || v[1].is_number()))
    return {v[0].get<double>(), d == 2 ? v[1].get<double>() : 0.0};
  bad_key(key, "must hold points with " + std::to_string(d) + " coordinates");
}

json point_json(const Point& p, int d) {
  return d == 1 ? json(p[0]) : json::array({p[0], p[1]});
}

void write(const fs::path& dir, const std::string& name, const std::string& content,
           CommandResult& res) {
  write_file_atomic(dir / name, content);
  res.files.push_back(name);
}

}  // namespace

ExperimentConfig ExperimentConfig::parse_text(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    fail(ErrorCode::config_error, std::string("config is not valid JSON: ") + e.what());
  }
  return parse(j);
}

ExperimentConfig ExperimentConfig::parse(const json& j) {
  ExperimentConfig c;
  c.raw = j;
  Section top(j, "",
              {"schema_version", "dimension", "alpha", "kernel", "coefficient", "m", "grid", "eps",
               "f", "solver", "assembly", "k", "hypotheses", "effective", "solve", "diagnostics",
               "tolerances", "output_dir"});

  for (const char* k : {"schema_version", "dimension", "alpha", "kernel"})
    if (!top.has(k)) bad_key(k, "is required");
  if (top.integer("schema_version") != 1) bad_key("schema_version", "must be 1");
  c.dimension = top.integer("dimension");
  if (c.dimension != 1 && c.dimension != 2) bad_key("dimension", "must be 1 or 2");
  c.alpha = top.number("alpha");
  if (!(c.alpha > 0.0 && c.alpha < 2.0)) bad_key("alpha", "must lie in (0, 2)");
  const int d = c.dimension;

  {
    Section k(top.object("kernel"), "kernel", {"name", "params"});
    if (!k.has("name")) bad_key("kernel.name", "is required");
    c.kernel_name = k.string("name");
    if (!KernelRegistry::instance().contains(c.kernel_name))
      bad_key("kernel.name", "names unknown kernel '" + c.kernel_name + "'");
    if (k.has("params")) c.kernel_params = k.object("params");
  }
  if (top.has("coefficient")) {
    Section k(top.object("coefficient"), "coefficient", {"name", "mode", "params"});
    if (!k.has("name")) bad_key("coefficient.name", "is required");
    c.coefficient_name = k.string("name");
    if (!CoefficientRegistry::instance().contains(c.coefficient_name))
      bad_key("coefficient.name", "names unknown coefficient '" + c.coefficient_name + "'");
    if (k.has("params")) c.coefficient_params = k.object("params");
    if (k.has("mode")) {
      c.coefficient_mode = k.string("mode");
      if (c.coefficient_mode != "periodic" && c.coefficient_mode != "locally_periodic")
        bad_key("coefficient.mode", "must be periodic or locally_periodic");
    } else {
      c.coefficient_mode = to_string(c.coefficient().mode());
    }
  }
  if (top.has("m")) {
    c.solver.m = top.number("m");
    if (!(c.solver.m > 0.0)) bad_key("m", "must be positive");
  }
  if (top.has("grid")) {
    Section g(top.object("grid"), "grid", {"R", "N"});
    if (g.has("R")) c.R = g.number("R");
    if (g.has("N")) c.N = g.integer("N");
    if (!(c.R > 0.0)) bad_key("grid.R", "must be positive");
    if (c.N < 8) bad_key("grid.N", "must be at least 8");
  }
  if (top.has("eps")) c.eps = top.numbers("eps");
  if (c.eps.empty()) bad_key("eps", "must list at least one value");
  for (std::size_t i = 0; i < c.eps.size(); ++i) {
    if (!(c.eps[i] > 0.0)) bad_key("eps", "must hold positive values");
    if (i > 0 && std::abs(c.eps[i] - 0.5 * c.eps[i - 1]) > 1e-12 * c.eps[i - 1])
      bad_key("eps", "must be dyadic-decreasing (each value half the previous one)");
  }
  if (top.has("f")) {
    try {
      c.f = Profile::from_json(top.at("f"), d);
    } catch (const Error& e) {
      fail(ErrorCode::config_error, std::string("in 'f': ") + e.what());
    }
  }
  if (top.has("solver")) {
    Section s(top.object("solver"), "solver", {"rel_tol", "max_iter", "fast_path"});
    if (s.has("rel_tol")) c.solver.rel_tol = s.number("rel_tol");
    if (s.has("max_iter")) c.solver.max_iter = s.integer("max_iter");
    if (s.has("fast_path")) c.solver.fast_path = s.boolean("fast_path");
    if (!(c.solver.rel_tol > 0.0 && c.solver.rel_tol < 1.0)) bad_key("solver.rel_tol", "must lie in (0, 1)");
    if (c.solver.max_iter < 0) bad_key("solver.max_iter", "must be >= 0");
  }
  if (top.has("assembly")) {
    Section s(top.object("assembly"), "assembly",
              {"subsample", "band", "kappa_periods_1d", "kappa_periods_2d", "field_points"});
    if (s.has("subsample")) c.assembly.subsample = s.integer("subsample");
    if (s.has("band")) c.assembly.band = s.number("band");
    if (s.has("kappa_periods_1d")) c.assembly.kappa_periods_1d = s.integer("kappa_periods_1d");
    if (s.has("kappa_periods_2d")) c.assembly.kappa_periods_2d = s.integer("kappa_periods_2d");
    if (s.has("field_points")) c.assembly.field_points = s.integer("field_points");
    if (c.assembly.subsample < 1) bad_key("assembly.subsample", "must be >= 1");
    if (c.assembly.kappa_periods_1d < 1) bad_key("assembly.kappa_periods_1d", "must be >= 1");
    if (c.assembly.kappa_periods_2d < 1) bad_key("assembly.kappa_periods_2d", "must be >= 1");
    if (c.assembly.field_points < 1) bad_key("assembly.field_points", "must be >= 1");
  }
  if (top.has("k")) {
    c.k_constant = top.number("k");
    if (!(*c.k_constant > 0.0)) bad_key("k", "must be positive");
  }
  if (top.has("hypotheses")) {
    Section s(top.object("hypotheses"), "hypotheses",
              {"annular_radii", "k_n_list", "phi_r_list", "sectors"});
    if (s.has("annular_radii")) c.annular_radii = s.numbers("annular_radii");
    if (s.has("k_n_list")) c.k_n_list = s.numbers("k_n_list");
    if (s.has("phi_r_list")) c.phi_r_list = s.numbers("phi_r_list");
    if (s.has("sectors")) c.sectors = s.integer("sectors");
    if (c.sectors < 1) bad_key("hypotheses.sectors", "must be >= 1");
  }
  if (top.has("effective")) {
    Section s(top.object("effective"), "effective", {"samples"});
    if (s.has("samples")) {
      const json& a = s.at("samples");
      if (!a.is_array()) bad_key("effective.samples", "must be an array of [x, y] pairs");
      for (const auto& pr : a) {
        if (!pr.is_array() || pr.size() != 2) bad_key("effective.samples", "must be an array of [x, y] pairs");
        c.effective_samples.push_back({point_of(pr[0], d, "effective.samples"),
                                       point_of(pr[1], d, "effective.samples")});
      }
    }
  }
  if (c.effective_samples.empty()) {
    if (d == 1)
      c.effective_samples = {{{0.0, 0.0}, {1.0, 0.0}}, {{0.5, 0.0}, {-0.5, 0.0}}, {{1.0, 0.0}, {2.0, 0.0}}};
    else
      c.effective_samples = {{{0.0, 0.0}, {1.0, 0.0}}, {{0.5, 0.5}, {-0.5, 1.0}}};
  }
  if (top.has("solve")) {
    Section s(top.object("solve"), "solve", {"eps"});
    if (s.has("eps")) {
      const json& v = s.at("eps");
      if (v.is_string() && v.get<std::string>() == "effective") {
        c.solve_eps.reset();
      } else if (v.is_number() && v.get<double>() > 0.0) {
        c.solve_eps = v.get<double>();
      } else {
        bad_key("solve.eps", "must be a positive number or \"effective\"");
      }
    }
  }

  c.diag_phi.name = "bump";
  c.diag_phi.radius = 1.0;
  c.exterior_n = {c.R / 8.0, c.R / 4.0, c.R / 2.0};
  // The cube check needs a periodic coefficient; no default otherwise.
  if (c.coefficient_mode == "periodic")
    for (double e : c.eps)
      if (e <= 0.5 / 8.0 * (1.0 + 1e-12)) c.cubes.push_back({e, 0.5});
  if (top.has("diagnostics")) {
    Section s(top.object("diagnostics"), "diagnostics",
              {"eps", "regions", "cubes", "translation_shifts", "exterior_n", "u", "phi"});
    if (s.has("eps")) c.diag_eps = s.number("eps");
    if (s.has("regions")) c.regions = s.numbers("regions");
    if (s.has("cubes")) {
      c.cubes.clear();
      const json& a = s.at("cubes");
      if (!a.is_array()) bad_key("diagnostics.cubes", "must be an array of [eps, delta] pairs");
      for (const auto& pr : a) {
        if (!pr.is_array() || pr.size() != 2 || !pr[0].is_number() || !pr[1].is_number())
          bad_key("diagnostics.cubes", "must be an array of [eps, delta] pairs");
        c.cubes.push_back({pr[0].get<double>(), pr[1].get<double>()});
      }
    }
    if (s.has("translation_shifts")) c.translation_shifts = s.integers("translation_shifts");
    if (s.has("exterior_n")) c.exterior_n = s.numbers("exterior_n");
    try {
      if (s.has("u")) c.diag_u = Profile::from_json(s.at("u"), d);
      if (s.has("phi")) c.diag_phi = Profile::from_json(s.at("phi"), d);
    } catch (const Error& e) {
      fail(ErrorCode::config_error, std::string("in 'diagnostics': ") + e.what());
    }
  }
  if (top.has("tolerances")) {
    Section s(top.object("tolerances"), "tolerances",
              {"mass", "symmetry", "k_agreement", "h4_threshold", "effective"});
    if (s.has("mass")) c.mass_tol = s.number("mass");
    if (s.has("symmetry")) c.symmetry_tol = s.number("symmetry");
    if (s.has("k_agreement")) c.k_agreement_tol = s.number("k_agreement");
    if (s.has("h4_threshold")) c.h4_threshold = s.number("h4_threshold");
    if (s.has("effective")) c.effective_tol = s.number("effective");
  }
  if (top.has("output_dir")) c.output_dir = top.string("output_dir");

  // Registry lookups validate the parameter blocks.
  (void)c.kernel();
  const Coefficient coeff = c.coefficient();
  if (c.coefficient_mode != to_string(coeff.mode()))
    bad_key("coefficient.mode", "is '" + c.coefficient_mode + "' but coefficient '" +
                                    c.coefficient_name + "' is " + to_string(coeff.mode()));
  const double h = 2.0 * c.R / c.N;
  if (h > c.eps.back() * (1.0 + 1e-12))
    fail(ErrorCode::resolution_violation,
         "resolution rule h <= min eps violated: h = 2R/N = " + format_double(h) +
             ", min eps = " + format_double(c.eps.back()));
  return c;
}

KernelSpec ExperimentConfig::kernel() const {
  return KernelRegistry::instance().make(kernel_name, dimension, alpha, kernel_params);
}

Coefficient ExperimentConfig::coefficient() const {
  return CoefficientRegistry::instance().make(coefficient_name, dimension, coefficient_params);
}

Grid ExperimentConfig::grid() const { return Grid(dimension, R, N); }

HypothesisPlan ExperimentConfig::hypothesis_plan(const KernelSpec& kernel) const {
  HypothesisPlan plan = HypothesisPlan::defaults(kernel);
  if (!annular_radii.empty()) plan.annular_radii = annular_radii;
  if (!k_n_list.empty()) plan.k_n_list = k_n_list;
  if (!phi_r_list.empty()) plan.phi_r_list = phi_r_list;
  plan.k_directions = default_direction_sets(dimension, sectors);
  plan.mass_tol = mass_tol;
  plan.symmetry_tol = symmetry_tol;
  plan.k_agreement_tol = k_agreement_tol;
  plan.h4_threshold = h4_threshold;
  return plan;
}

KTable ExperimentConfig::k_table(const KernelSpec& kernel) const {
  if (k_constant) return KTable::constant(dimension, *k_constant);
  const HypothesisPlan plan = hypothesis_plan(kernel);
  const KResult k = estimate_k(kernel, plan.k_n_list, plan.k_directions, plan.quad, k_agreement_tol);
  if (!k.pass)
    fail(ErrorCode::quadrature_stall,
         "k estimate did not settle; set 'k' explicitly or extend 'hypotheses.k_n_list'");
  return KTable::from(k, dimension);
}

StudySpec ExperimentConfig::study(bool keep_solutions) const {
  const KernelSpec k = kernel();
  StudySpec s{k, coefficient(), k_table(k), grid(), eps, f, solver, assembly};
  s.keep_solutions = keep_solutions;
  return s;
}

std::vector<std::string> command_names() {
  return {"check-kernel", "effective", "solve", "converge", "diagnose"};
}

namespace {

CommandResult cmd_check_kernel(const ExperimentConfig& cfg, const fs::path& out) {
  CommandResult res;
  const KernelSpec kernel = cfg.kernel();
  const HypothesisReport rep = check_hypotheses(kernel, cfg.hypothesis_plan(kernel));
  json j = rep.to_json();
  j["kernel"] = kernel.describe();
  write(out, "hypotheses.json", dump_json(j), res);
  res.summary = {{"verdict", rep.verdict}, {"all_pass", rep.all_pass()}};
  res.exit_code = rep.all_pass() ? 0 : 2;
  return res;
}

CommandResult cmd_effective(const ExperimentConfig& cfg, const fs::path& out, std::uint64_t seed) {
  CommandResult res;
  const KernelSpec kernel = cfg.kernel();
  const Coefficient coeff = cfg.coefficient();
  const int d = cfg.dimension;
  EffectiveQuad quad = default_effective_quad(d);
  quad.tol = cfg.effective_tol;
  json j = {{"coefficient", coeff.describe()}, {"kernel", kernel.describe()},
            {"quadrature", {{"s", quad.s}, {"tol", quad.tol}}}};
  const CoefficientAudit audit = audit_coefficient(coeff, seed);
  j["audit"] = audit.to_json();
  j["audit"]["seed"] = seed;
  if (coeff.mode() == CoefficientMode::periodic) {
    const EffectiveResult r = effective_lambda(coeff, quad);
    j["lambda_bar"] = r.to_json();
    res.summary["lambda_bar"] = r.value;
  } else {
    json field = json::array();
    for (const auto& [x, y] : cfg.effective_samples) {
      json row = effective_lambda_field(coeff, x, y, quad).to_json();
      row["x"] = point_json(x, d);
      row["y"] = point_json(y, d);
      field.push_back(row);
    }
    j["lambda_bar_field"] = field;
    res.summary["lambda_bar_field"] = field;
  }
  j["k"] = cfg.k_table(kernel).to_json();
  j["k_source"] = cfg.k_constant ? "config" : "estimated";
  write(out, "effective.json", dump_json(j), res);
  return res;
}

double symmetry_probe(const NonlocalOperator& op, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> nd(0.0, 1.0);
  GridFunction u(op.grid()), v(op.grid());
  for (double& x : u.values) x = nd(rng);
  for (double& x : v.values) x = nd(rng);
  const GridFunction lu = op.apply(u), lv = op.apply(v);
  const double a = inner(lu, v), b = inner(u, lv);
  const double scale = lu.l2_norm() * v.l2_norm();
  return scale > 0.0 ? std::abs(a - b) / scale : 0.0;
}

CommandResult cmd_solve(const ExperimentConfig& cfg, const fs::path& out, std::uint64_t seed) {
  CommandResult res;
  const KernelSpec kernel = cfg.kernel();
  const Coefficient coeff = cfg.coefficient();
  const Grid g = cfg.grid();
  json j;
  std::optional<NonlocalOperator> op;
  if (cfg.solve_eps) {
    op.emplace(assemble_eps(kernel, coeff, *cfg.solve_eps, g, cfg.assembly));
    j["target"] = "eps";
    j["eps"] = *cfg.solve_eps;
  } else {
    double lb = 0.0;
    op.emplace(assemble_limit(cfg.k_table(kernel), coeff, cfg.alpha, g, cfg.assembly, &lb));
    j["target"] = "effective";
    if (std::isfinite(lb)) j["lambda_bar"] = lb;
  }
  const GridFunction f = cfg.f.sample(g);
  const SolveReport rep = resolvent_solve(*op, f, cfg.solver);
  j["grid"] = g.to_json();
  j["f"] = cfg.f.to_json(cfg.dimension);
  j["solver_config"] = cfg.solver.to_json();
  j["report"] = rep.to_json();
  j["operator"] = op->meta().to_json();
  j["symmetry_probe"] = {{"seed", seed}, {"relative_defect", symmetry_probe(*op, seed)}};
  write(out, "solution.csv", grid_function_csv(rep.solution), res);
  write(out, "solve_report.json", dump_json(j), res);
  if (!rep.converged)
    fail(ErrorCode::max_iterations, "solve did not reach rel_tol within max_iter; see solve_report.json");
  res.summary = j["report"];
  return res;
}

CommandResult cmd_converge(const ExperimentConfig& cfg, const fs::path& out) {
  CommandResult res;
  const ConvergenceReport rep = run_convergence_study(cfg.study(false));
  write(out, "convergence.json", dump_json(rep.to_json()), res);
  write(out, "convergence.csv", rep.csv(), res);
  write(out, "error_vs_eps.dat", rep.plot_data(), res);
  json errs = json::array();
  for (const auto& r : rep.rows) errs.push_back({{"eps", r.eps}, {"l2_error", r.l2_error}});
  res.summary = {{"rows", errs}, {"strictly_decreasing", rep.strictly_decreasing()}};
  return res;
}

CommandResult cmd_diagnose(const ExperimentConfig& cfg, const fs::path& out) {
  CommandResult res;
  require(cfg.dimension == 1, ErrorCode::inapplicable_structure,
          "diagnostics are implemented for d = 1 only");
  const KernelSpec kernel = cfg.kernel();
  const Coefficient coeff = cfg.coefficient();
  const Grid g = cfg.grid();
  const GridFunction u = cfg.diag_u.sample(g);
  const GridFunction phi = cfg.diag_phi.sample(g);
  const double eps = cfg.diag_eps.value_or(cfg.eps.back());
  json j = {{"grid", g.to_json()},
            {"u", cfg.diag_u.to_json(1)},
            {"phi", cfg.diag_phi.to_json(1)},
            {"kernel", kernel.describe()},
            {"coefficient", coeff.describe()}};

  if (!cfg.regions.empty()) {
    const NonlocalOperator op = assemble_eps(kernel, coeff, eps, g, cfg.assembly);
    json rows = json::array();
    std::optional<double> prev;
    for (double delta : cfg.regions) {
      const RegionSplit r = region_split_energy(op, u, phi, delta);
      json row = r.to_json();
      if (prev && *prev != 0.0) row["g3_ratio_to_previous"] = r.g3 / *prev;
      prev = r.g3;
      rows.push_back(row);
    }
    j["regions"] = {{"eps", eps}, {"splits", rows}};
  }
  if (!cfg.cubes.empty()) {
    json rows = json::array();
    for (const auto& [ce, cd] : cfg.cubes)
      rows.push_back(cube_decomposition_check(kernel, coeff, ce, cd, u, phi).to_json());
    j["cubes"] = rows;
  }
  if (!cfg.translation_shifts.empty() || !cfg.exterior_n.empty()) {
    const ConvergenceReport study = run_convergence_study(cfg.study(true));
    const double f_norm = cfg.f.sample(g).l2_norm();
    const double ref = f_norm * f_norm / (cfg.solver.m * cfg.solver.m);
    json trans = json::array(), ext = json::array();
    for (std::size_t i = 0; i < study.rows.size(); ++i) {
      const double e = study.rows[i].eps;
      if (!cfg.translation_shifts.empty()) {
        json t = translation_energy_check(study.solutions[i], e, kernel.M(), cfg.alpha,
                                          cfg.translation_shifts)
                     .to_json();
        trans.push_back(t);
      }
      if (!cfg.exterior_n.empty()) {
        json rows = json::array();
        for (const auto& r : exterior_decay_check(study.solutions[i], cfg.exterior_n))
          rows.push_back({{"n", r.n}, {"tail", r.tail}, {"tail_over_f2_m2", r.tail / ref}});
        ext.push_back({{"eps", e}, {"rows", rows}});
      }
    }
    if (!trans.empty()) j["translation"] = {{"M", kernel.M()}, {"alpha", cfg.alpha}, {"by_eps", trans}};
    if (!ext.empty()) j["exterior"] = {{"f_norm2_over_m2", ref}, {"by_eps", ext}};
  }
  write(out, "diagnostics.json", dump_json(j), res);
  res.summary = {{"sections", json::array()}};
  for (const char* k : {"regions", "cubes", "translation", "exterior"})
    if (j.contains(k)) res.summary["sections"].push_back(k);
  return res;
}

}  // namespace

CommandResult run_command(const std::string& command, const ExperimentConfig& cfg,
                          const fs::path& out_dir, std::uint64_t seed) {
  const auto names = command_names();
  if (std::find(names.begin(), names.end(), command) == names.end())
    fail(ErrorCode::invalid_parameter, "unknown command '" + command + "'");
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec) fail(ErrorCode::io_error, "cannot create output directory " + out_dir.string() + ": " + ec.message());

  write_file_atomic(out_dir / "config.json", dump_json(cfg.raw));
  CommandResult res;
  if (command == "check-kernel") res = cmd_check_kernel(cfg, out_dir);
  else if (command == "effective") res = cmd_effective(cfg, out_dir, seed);
  else if (command == "solve") res = cmd_solve(cfg, out_dir, seed);
  else if (command == "converge") res = cmd_converge(cfg, out_dir);
  else res = cmd_diagnose(cfg, out_dir);
  res.files.insert(res.files.begin(), "config.json");
  res.summary["command"] = command;
  res.summary["exit_code"] = res.exit_code;
  res.summary["files"] = res.files;
  return res;
}

}  // namespace nlh
