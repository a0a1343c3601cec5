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

#include "nlhomog/nlhomog.h"

#include <algorithm>
#include <cstdlib>
#include <cstring>
#include <optional>
#include <string>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "nlhomog/experiment.hpp"

struct nlh_kernel {
  nlh::KernelSpec spec;
};
struct nlh_coefficient {
  nlh::Coefficient coeff;
};
struct nlh_grid {
  nlh::Grid grid;
};
struct nlh_operator {
  nlh::NonlocalOperator op;
};

namespace {

thread_local std::string last_error;

nlh_status status_of(nlh::ErrorCode code) {
  using nlh::ErrorCode;
  switch (code) {
    case ErrorCode::invalid_parameter: return NLH_ERR_INVALID_PARAMETER;
    case ErrorCode::resolution_violation: return NLH_ERR_RESOLUTION;
    case ErrorCode::quadrature_stall: return NLH_ERR_QUADRATURE_STALL;
    case ErrorCode::grid_mismatch: return NLH_ERR_GRID_MISMATCH;
    case ErrorCode::coincident_points: return NLH_ERR_COINCIDENT_POINTS;
    case ErrorCode::empty_samples: return NLH_ERR_EMPTY_SAMPLES;
    case ErrorCode::inapplicable_structure: return NLH_ERR_INAPPLICABLE;
    case ErrorCode::scale_separation: return NLH_ERR_SCALE_SEPARATION;
    case ErrorCode::delta_out_of_range: return NLH_ERR_DELTA_RANGE;
    case ErrorCode::config_error: return NLH_ERR_CONFIG;
    case ErrorCode::io_error: return NLH_ERR_IO;
    case ErrorCode::max_iterations: return NLH_ERR_MAX_ITERATIONS;
    case ErrorCode::internal: return NLH_ERR_INTERNAL;
  }
  return NLH_ERR_INTERNAL;
}

template <class F>
nlh_status guarded(F&& body) {
  try {
    last_error.clear();
    return body();
  } catch (const nlh::Error& e) {
    last_error = std::string(nlh::to_string(e.code())) + ": " + e.what();
    return status_of(e.code());
  } catch (const std::exception& e) {
    last_error = std::string("internal-error: ") + e.what();
    return NLH_ERR_INTERNAL;
  } catch (...) {
    last_error = "internal-error: unknown exception";
    return NLH_ERR_INTERNAL;
  }
}

nlh_status null_arg(const char* what) {
  last_error = std::string("null argument: ") + what;
  return NLH_ERR_NULL_ARGUMENT;
}

char* dup_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (!out) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

nlohmann::json params_of(const char* text) {
  if (!text || !*text) return nlohmann::json::object();
  try {
    return nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    nlh::fail(nlh::ErrorCode::config_error, std::string("params are not valid JSON: ") + e.what());
  }
}

nlh::Point point_of(const double* p, int d) { return {p[0], d == 2 ? p[1] : 0.0}; }

}  // namespace

extern "C" {

const char* nlh_version(void) { return "0.1.0"; }

const char* nlh_last_error(void) { return last_error.c_str(); }

const char* nlh_status_name(nlh_status status) {
  switch (status) {
    case NLH_OK: return "ok";
    case NLH_HYPOTHESIS_FAILED: return "hypothesis-failed";
    case NLH_ERR_INVALID_PARAMETER: return "invalid-parameter";
    case NLH_ERR_RESOLUTION: return "resolution-violation";
    case NLH_ERR_QUADRATURE_STALL: return "quadrature-stall";
    case NLH_ERR_GRID_MISMATCH: return "grid-mismatch";
    case NLH_ERR_COINCIDENT_POINTS: return "coincident-points";
    case NLH_ERR_EMPTY_SAMPLES: return "empty-sample-set";
    case NLH_ERR_INAPPLICABLE: return "inapplicable-structure";
    case NLH_ERR_SCALE_SEPARATION: return "scale-separation-violation";
    case NLH_ERR_DELTA_RANGE: return "delta-out-of-range";
    case NLH_ERR_CONFIG: return "config-error";
    case NLH_ERR_IO: return "io-error";
    case NLH_ERR_MAX_ITERATIONS: return "max-iterations-exceeded";
    case NLH_ERR_NULL_ARGUMENT: return "null-argument";
    case NLH_ERR_INTERNAL: return "internal-error";
  }
  return "unknown";
}

void nlh_string_free(char* s) { std::free(s); }

nlh_status nlh_set_threads(int n) {
#ifdef _OPENMP
  if (n > 0) omp_set_num_threads(n);
#else
  (void)n;
#endif
  return NLH_OK;
}

nlh_status nlh_kernel_create(const char* name, int d, double alpha, const char* params_json,
                             nlh_kernel** out) {
  if (!name) return null_arg("name");
  if (!out) return null_arg("out");
  return guarded([&] {
    *out = new nlh_kernel{
        nlh::KernelRegistry::instance().make(name, d, alpha, params_of(params_json))};
    return NLH_OK;
  });
}

void nlh_kernel_free(nlh_kernel* k) { delete k; }

nlh_status nlh_kernel_eval(const nlh_kernel* k, const double* z, double* out) {
  if (!k || !z || !out) return null_arg("kernel, z or out");
  return guarded([&] {
    *out = k->spec(point_of(z, k->spec.dimension()));
    return NLH_OK;
  });
}

nlh_status nlh_kernel_check(const nlh_kernel* k, char** report_json, int* all_pass) {
  if (!k) return null_arg("kernel");
  return guarded([&] {
    const auto rep = nlh::check_hypotheses(k->spec, nlh::HypothesisPlan::defaults(k->spec));
    if (report_json) *report_json = dup_string(rep.to_json().dump());
    if (all_pass) *all_pass = rep.all_pass() ? 1 : 0;
    return NLH_OK;
  });
}

nlh_status nlh_coefficient_create(const char* name, int d, const char* params_json,
                                  nlh_coefficient** out) {
  if (!name) return null_arg("name");
  if (!out) return null_arg("out");
  return guarded([&] {
    *out = new nlh_coefficient{
        nlh::CoefficientRegistry::instance().make(name, d, params_of(params_json))};
    return NLH_OK;
  });
}

void nlh_coefficient_free(nlh_coefficient* c) { delete c; }

nlh_status nlh_coefficient_eval(const nlh_coefficient* c, const double* x, const double* y,
                                const double* xi, const double* eta, double* out) {
  if (!c || !x || !y || !xi || !eta || !out) return null_arg("coefficient evaluation argument");
  return guarded([&] {
    const int d = c->coeff.dimension();
    *out = c->coeff(point_of(x, d), point_of(y, d), point_of(xi, d), point_of(eta, d));
    return NLH_OK;
  });
}

nlh_status nlh_effective_lambda(const nlh_coefficient* c, double* out) {
  if (!c || !out) return null_arg("coefficient or out");
  return guarded([&] {
    *out = nlh::effective_lambda(c->coeff).value;
    return NLH_OK;
  });
}

nlh_status nlh_effective_lambda_field(const nlh_coefficient* c, const double* x, const double* y,
                                      double* out) {
  if (!c || !x || !y || !out) return null_arg("coefficient, x, y or out");
  return guarded([&] {
    const int d = c->coeff.dimension();
    *out = nlh::effective_lambda_field(c->coeff, point_of(x, d), point_of(y, d)).value;
    return NLH_OK;
  });
}

nlh_status nlh_grid_create(int d, double R, int N, nlh_grid** out) {
  if (!out) return null_arg("out");
  return guarded([&] {
    *out = new nlh_grid{nlh::Grid(d, R, N)};
    return NLH_OK;
  });
}

void nlh_grid_free(nlh_grid* g) { delete g; }

size_t nlh_grid_size(const nlh_grid* g) { return g ? g->grid.size() : 0; }

double nlh_grid_spacing(const nlh_grid* g) { return g ? g->grid.spacing() : 0.0; }

nlh_status nlh_grid_center(const nlh_grid* g, size_t index, double* out) {
  if (!g || !out) return null_arg("grid or out");
  return guarded([&] {
    nlh::require(index < g->grid.size(), nlh::ErrorCode::invalid_parameter, "grid index out of range");
    const nlh::Point p = g->grid.center(index);
    out[0] = p[0];
    if (g->grid.dimension() == 2) out[1] = p[1];
    return NLH_OK;
  });
}

nlh_status nlh_operator_assemble_eps(const nlh_kernel* k, const nlh_coefficient* c, double eps,
                                     const nlh_grid* g, nlh_operator** out) {
  if (!k || !c || !g || !out) return null_arg("kernel, coefficient, grid or out");
  return guarded([&] {
    *out = new nlh_operator{nlh::assemble_eps(k->spec, c->coeff, eps, g->grid)};
    return NLH_OK;
  });
}

nlh_status nlh_operator_assemble_effective(const nlh_kernel* k, const nlh_coefficient* c,
                                           const nlh_grid* g, double k_value,
                                           nlh_operator** out) {
  if (!k || !c || !g || !out) return null_arg("kernel, coefficient, grid or out");
  return guarded([&] {
    const int d = k->spec.dimension();
    nlh::KTable table;
    if (k_value > 0.0) {
      table = nlh::KTable::constant(d, k_value);
    } else {
      const auto plan = nlh::HypothesisPlan::defaults(k->spec);
      const auto est = nlh::estimate_k(k->spec, plan.k_n_list, plan.k_directions, plan.quad,
                                       plan.k_agreement_tol);
      nlh::require(est.pass, nlh::ErrorCode::quadrature_stall, "k estimate did not settle");
      table = nlh::KTable::from(est, d);
    }
    *out = new nlh_operator{
        nlh::assemble_limit(table, c->coeff, k->spec.alpha(), g->grid, nlh::AssemblyConfig{})};
    return NLH_OK;
  });
}

void nlh_operator_free(nlh_operator* op) { delete op; }

size_t nlh_operator_size(const nlh_operator* op) { return op ? op->op.size() : 0; }

nlh_status nlh_operator_weight(const nlh_operator* op, size_t i, size_t j, double* out) {
  if (!op || !out) return null_arg("operator or out");
  return guarded([&] {
    nlh::require(i < op->op.size() && j < op->op.size(), nlh::ErrorCode::invalid_parameter,
                 "weight index out of range");
    *out = op->op.weight(i, j);
    return NLH_OK;
  });
}

nlh_status nlh_operator_kappa(const nlh_operator* op, double* out) {
  if (!op || !out) return null_arg("operator or out");
  std::copy(op->op.kappa().begin(), op->op.kappa().end(), out);
  return NLH_OK;
}

nlh_status nlh_operator_apply(const nlh_operator* op, const double* u, double* out) {
  if (!op || !u || !out) return null_arg("operator, u or out");
  return guarded([&] {
    op->op.apply(u, out);
    return NLH_OK;
  });
}

nlh_status nlh_operator_energy(const nlh_operator* op, const double* u, const double* v,
                               double* out) {
  if (!op || !u || !v || !out) return null_arg("operator, u, v or out");
  return guarded([&] {
    const std::size_t n = op->op.size();
    const nlh::GridFunction gu(op->op.grid(), std::vector<double>(u, u + n));
    const nlh::GridFunction gv(op->op.grid(), std::vector<double>(v, v + n));
    *out = op->op.energy(gu, gv);
    return NLH_OK;
  });
}

nlh_status nlh_solve(const nlh_operator* op, const double* f, double m, double rel_tol, double* u,
                     char** report_json) {
  if (!op || !f || !u) return null_arg("operator, f or u");
  return guarded([&] {
    const std::size_t n = op->op.size();
    nlh::SolveConfig cfg;
    cfg.m = m;
    cfg.rel_tol = rel_tol;
    const nlh::GridFunction gf(op->op.grid(), std::vector<double>(f, f + n));
    const nlh::SolveReport rep = nlh::resolvent_solve(op->op, gf, cfg);
    std::copy(rep.solution.values.begin(), rep.solution.values.end(), u);
    if (report_json) *report_json = dup_string(rep.to_json().dump());
    if (!rep.converged) {
      last_error = "max-iterations-exceeded: solve stopped before rel_tol";
      return NLH_ERR_MAX_ITERATIONS;
    }
    return NLH_OK;
  });
}

nlh_status nlh_run(const char* command, const char* config_json, const char* out_dir,
                   uint64_t seed, char** summary_json) {
  if (!command) return null_arg("command");
  if (!config_json) return null_arg("config_json");
  return guarded([&] {
    const nlh::ExperimentConfig cfg = nlh::ExperimentConfig::parse_text(config_json);
    std::string dir;
    if (out_dir && *out_dir)
      dir = out_dir;
    else if (!cfg.output_dir.empty())
      dir = cfg.output_dir;
    else
      dir = std::string("runs/") + command;
    const nlh::CommandResult res = nlh::run_command(command, cfg, dir, seed);
    if (summary_json) {
      nlohmann::json s = res.summary;
      s["out_dir"] = dir;
      *summary_json = dup_string(s.dump());
    }
    return res.exit_code == 2 ? NLH_HYPOTHESIS_FAILED : NLH_OK;
  });
}

}  // extern "C"
