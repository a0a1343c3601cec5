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

// Exercises the C API from C.

#include <math.h>
#include <stdio.h>
#include <stdlib.h>
#include <string.h>

#include "nlhomog/nlhomog.h"

static int failures = 0;

#define EXPECT(cond)                                             \
  do {                                                           \
    if (!(cond)) {                                               \
      fprintf(stderr, "%s:%d: EXPECT(%s)\n", __FILE__, __LINE__, #cond); \
      ++failures;                                                \
    }                                                            \
  } while (0)

int main(void) {
  nlh_kernel* k = NULL;
  EXPECT(nlh_kernel_create("pareto", 1, 1.0, "{\"r0\": 1.0}", &k) == NLH_OK);
  double z = 2.0, p = 0.0;
  EXPECT(nlh_kernel_eval(k, &z, &p) == NLH_OK);
  EXPECT(fabs(p - 0.5 / 4.0) < 1e-15);

  int all_pass = 0;
  char* report = NULL;
  EXPECT(nlh_kernel_check(k, &report, &all_pass) == NLH_OK);
  EXPECT(all_pass == 1);
  EXPECT(report != NULL && strstr(report, "H2-lower") != NULL);
  nlh_string_free(report);

  nlh_kernel* bad = NULL;
  EXPECT(nlh_kernel_create("pareto", 1, 2.5, NULL, &bad) == NLH_ERR_INVALID_PARAMETER);
  EXPECT(strstr(nlh_last_error(), "alpha") != NULL);
  EXPECT(nlh_kernel_create("nope", 1, 1.0, NULL, &bad) == NLH_ERR_CONFIG);
  EXPECT(nlh_kernel_create("pareto", 1, 1.0, "{\"r1\": 2}", &bad) == NLH_ERR_CONFIG);
  EXPECT(strstr(nlh_last_error(), "r1") != NULL);
  EXPECT(nlh_kernel_eval(NULL, &z, &p) == NLH_ERR_NULL_ARGUMENT);

  nlh_coefficient* c = NULL;
  EXPECT(nlh_coefficient_create("cos_difference", 1, NULL, &c) == NLH_OK);
  double lb = 0.0;
  EXPECT(nlh_effective_lambda(c, &lb) == NLH_OK);
  EXPECT(fabs(lb - 2.0) < 1e-12);
  double x = 0.0, y = 0.0, xi = 0.25, eta = 0.25, v = 0.0;
  EXPECT(nlh_coefficient_eval(c, &x, &y, &xi, &eta, &v) == NLH_OK);
  EXPECT(fabs(v - 3.0) < 1e-15);

  nlh_grid* g = NULL;
  EXPECT(nlh_grid_create(1, 4.0, 64, &g) == NLH_OK);
  EXPECT(nlh_grid_size(g) == 64);
  EXPECT(nlh_grid_spacing(g) == 0.125);
  double center = 0.0;
  EXPECT(nlh_grid_center(g, 0, &center) == NLH_OK);
  EXPECT(center == -4.0 + 0.0625);
  EXPECT(nlh_grid_center(g, 64, &center) == NLH_ERR_INVALID_PARAMETER);

  nlh_operator* op = NULL;
  EXPECT(nlh_operator_assemble_eps(k, c, 0.0625, g, &op) == NLH_ERR_RESOLUTION);
  EXPECT(nlh_operator_assemble_eps(k, c, 0.125, g, &op) == NLH_OK);
  EXPECT(nlh_operator_size(op) == 64);

  double w01 = 0.0, w10 = 0.0;
  EXPECT(nlh_operator_weight(op, 0, 10, &w01) == NLH_OK);
  EXPECT(nlh_operator_weight(op, 10, 0, &w10) == NLH_OK);
  EXPECT(w01 == w10 && w01 > 0.0);

  double f[64], u[64], lu[64], kap[64];
  for (int i = 0; i < 64; ++i) {
    nlh_grid_center(g, (size_t)i, &center);
    f[i] = exp(-2.0 * center * center);
  }
  EXPECT(nlh_operator_kappa(op, kap) == NLH_OK);
  EXPECT(kap[0] > kap[32]);
  char* solve_report = NULL;
  EXPECT(nlh_solve(op, f, 1.0, 1e-10, u, &solve_report) == NLH_OK);
  EXPECT(solve_report != NULL && strstr(solve_report, "\"converged\":true") != NULL);
  nlh_string_free(solve_report);
  // (1 - L) u = f
  EXPECT(nlh_operator_apply(op, u, lu) == NLH_OK);
  double res = 0.0, fn = 0.0;
  for (int i = 0; i < 64; ++i) {
    res += (u[i] - lu[i] - f[i]) * (u[i] - lu[i] - f[i]);
    fn += f[i] * f[i];
  }
  EXPECT(sqrt(res / fn) < 1e-9);
  double e = 0.0;
  EXPECT(nlh_operator_energy(op, u, u, &e) == NLH_OK);
  EXPECT(e > 0.0);

  nlh_operator* eff = NULL;
  EXPECT(nlh_operator_assemble_effective(k, c, g, 0.5, &eff) == NLH_OK);
  nlh_operator* eff_est = NULL;
  EXPECT(nlh_operator_assemble_effective(k, c, g, 0.0, &eff_est) == NLH_OK);
  double a = 0.0, b = 0.0;
  nlh_operator_weight(eff, 3, 9, &a);
  nlh_operator_weight(eff_est, 3, 9, &b);
  EXPECT(fabs(a - b) <= 1e-12 * a);

  EXPECT(nlh_run("converge", "{\"schema_version\": 1}", "unused", 0, NULL) == NLH_ERR_CONFIG);
  EXPECT(nlh_run("bogus", "{\"schema_version\": 1, \"dimension\": 1, \"alpha\": 1, \"kernel\": {\"name\": \"pareto\"}}",
                 "unused", 0, NULL) == NLH_ERR_INVALID_PARAMETER);
  EXPECT(strcmp(nlh_status_name(NLH_ERR_RESOLUTION), "resolution-violation") == 0);

  nlh_operator_free(eff_est);
  nlh_operator_free(eff);
  nlh_operator_free(op);
  nlh_grid_free(g);
  nlh_coefficient_free(c);
  nlh_kernel_free(k);
  if (failures) fprintf(stderr, "%d failures\n", failures);
  else printf("C API: all checks passed\n");
  return failures ? 1 : 0;
}
