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

#ifndef NLHOMOG_NLHOMOG_H_
#define NLHOMOG_NLHOMOG_H_

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define NLH_API __declspec(dllexport)
#else
#define NLH_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

/* Status codes. Every call returns one; details go to nlh_last_error(). */
typedef enum nlh_status {
  NLH_OK = 0,
  /* A hypothesis verdict failed; not an execution error. */
  NLH_HYPOTHESIS_FAILED = 1,
  NLH_ERR_INVALID_PARAMETER = 10,
  NLH_ERR_RESOLUTION = 11,
  NLH_ERR_QUADRATURE_STALL = 12,
  NLH_ERR_GRID_MISMATCH = 13,
  NLH_ERR_COINCIDENT_POINTS = 14,
  NLH_ERR_EMPTY_SAMPLES = 15,
  NLH_ERR_INAPPLICABLE = 16,
  NLH_ERR_SCALE_SEPARATION = 17,
  NLH_ERR_DELTA_RANGE = 18,
  NLH_ERR_CONFIG = 19,
  NLH_ERR_IO = 20,
  NLH_ERR_MAX_ITERATIONS = 21,
  NLH_ERR_NULL_ARGUMENT = 22,
  NLH_ERR_INTERNAL = 99
} nlh_status;

typedef struct nlh_kernel nlh_kernel;
typedef struct nlh_coefficient nlh_coefficient;
typedef struct nlh_grid nlh_grid;
typedef struct nlh_operator nlh_operator;

NLH_API const char* nlh_version(void);
/* Message of the last failed call on this thread; "" when none. */
NLH_API const char* nlh_last_error(void);
NLH_API const char* nlh_status_name(nlh_status status);
/* Frees strings returned through char** out-parameters. */
NLH_API void nlh_string_free(char* s);
/* OpenMP thread count for later calls; n <= 0 keeps the default. */
NLH_API nlh_status nlh_set_threads(int n);

/* Kernels. params_json may be NULL. Points are arrays of d doubles. */
NLH_API nlh_status nlh_kernel_create(const char* name, int d, double alpha,
                                     const char* params_json, nlh_kernel** out);
NLH_API void nlh_kernel_free(nlh_kernel* k);
NLH_API nlh_status nlh_kernel_eval(const nlh_kernel* k, const double* z, double* out);
/* Runs the default hypothesis plan; *all_pass is 1 when H1-H4 hold. */
NLH_API nlh_status nlh_kernel_check(const nlh_kernel* k, char** report_json, int* all_pass);

/* Coefficients. */
NLH_API nlh_status nlh_coefficient_create(const char* name, int d, const char* params_json,
                                          nlh_coefficient** out);
NLH_API void nlh_coefficient_free(nlh_coefficient* c);
NLH_API nlh_status nlh_coefficient_eval(const nlh_coefficient* c, const double* x,
                                        const double* y, const double* xi, const double* eta,
                                        double* out);
NLH_API nlh_status nlh_effective_lambda(const nlh_coefficient* c, double* out);
NLH_API nlh_status nlh_effective_lambda_field(const nlh_coefficient* c, const double* x,
                                              const double* y, double* out);

/* Grids: [-R, R]^d with N cells per axis. */
NLH_API nlh_status nlh_grid_create(int d, double R, int N, nlh_grid** out);
NLH_API void nlh_grid_free(nlh_grid* g);
NLH_API size_t nlh_grid_size(const nlh_grid* g);
NLH_API double nlh_grid_spacing(const nlh_grid* g);
/* Writes d coordinates. */
NLH_API nlh_status nlh_grid_center(const nlh_grid* g, size_t index, double* out);

/* Operators. */
NLH_API nlh_status nlh_operator_assemble_eps(const nlh_kernel* k, const nlh_coefficient* c,
                                             double eps, const nlh_grid* g, nlh_operator** out);
/* Limit operator; k_value > 0 fixes a constant angular density, otherwise
   it is estimated from the kernel. */
NLH_API nlh_status nlh_operator_assemble_effective(const nlh_kernel* k, const nlh_coefficient* c,
                                                   const nlh_grid* g, double k_value,
                                                   nlh_operator** out);
NLH_API void nlh_operator_free(nlh_operator* op);
NLH_API size_t nlh_operator_size(const nlh_operator* op);
NLH_API nlh_status nlh_operator_weight(const nlh_operator* op, size_t i, size_t j, double* out);
/* Copies the killing term into out[0..size). */
NLH_API nlh_status nlh_operator_kappa(const nlh_operator* op, double* out);
NLH_API nlh_status nlh_operator_apply(const nlh_operator* op, const double* u, double* out);
NLH_API nlh_status nlh_operator_energy(const nlh_operator* op, const double* u, const double* v,
                                       double* out);
/* Solves (m - L) u = f. report_json may be NULL. A non-converged solve still
   fills u and returns NLH_ERR_MAX_ITERATIONS. */
NLH_API nlh_status nlh_solve(const nlh_operator* op, const double* f, double m, double rel_tol,
                             double* u, char** report_json);

/* Runs a command (check-kernel, effective, solve, converge, diagnose) on a
   JSON config text. out_dir NULL falls back to the config's output_dir, then
   runs/<command>. summary_json may be NULL. */
NLH_API nlh_status nlh_run(const char* command, const char* config_json, const char* out_dir,
                           uint64_t seed, char** summary_json);

#ifdef __cplusplus
}
#endif

#endif  // NLHOMOG_NLHOMOG_H_
