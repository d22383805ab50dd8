/* Copyright 2026 The dpident Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

/* C API of the dpident privacy-auditing library.
 *
 * Every command takes a JSON configuration string and, on success, stores an
 * opaque result handle in *out_result. A result owns one JSON summary and
 * zero or more named CSV tables; both stay valid until dpident_result_free.
 * On failure the handle is untouched and dpident_last_error() returns a
 * thread-local description of what went wrong.
 */

#ifndef DPIDENT_H_
#define DPIDENT_H_

#include <stddef.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum dpident_status {
  DPIDENT_OK = 0,
  DPIDENT_ERROR_INVALID_ARGUMENT = 1, /* bad configuration or parameter */
  DPIDENT_ERROR_DATA = 2,             /* unreadable or malformed input data */
  DPIDENT_ERROR_RUNTIME = 3,          /* internal failure */
  DPIDENT_ERROR_OUT_OF_MEMORY = 4
} dpident_status;

typedef struct dpident_result dpident_result;

const char* dpident_version(void);

/* Message for the most recent failure on this thread; never NULL. */
const char* dpident_last_error(void);

/* Noise calibration for a target epsilon, rho_beta, or rho_alpha
 * (exactly one), at a given delta, sensitivity, and step count. */
dpident_status dpident_calibrate(const char* config_json,
                                 dpident_result** out_result);

/* Plot-ready (epsilon, delta, rho_beta, rho_alpha) grid. */
dpident_status dpident_bounds_table(const char* config_json,
                                    dpident_result** out_result);

/* Monte Carlo identification campaign on the scalar wage sum query. */
dpident_status dpident_synthetic_audit(const char* config_json,
                                       dpident_result** out_result);

/* DPSGD identification campaign with empirical epsilon estimation. */
dpident_status dpident_train_audit(const char* config_json,
                                   dpident_result** out_result);

/* Identification vs membership-inference advantage over an epsilon grid. */
dpident_status dpident_mi_compare(const char* config_json,
                                  dpident_result** out_result);

/* Dataset-sensitivity ranking of neighboring-dataset candidates. */
dpident_status dpident_rank_sensitivity(const char* config_json,
                                        dpident_result** out_result);

const char* dpident_result_summary_json(const dpident_result* result);
size_t dpident_result_table_count(const dpident_result* result);
/* NULL when index is out of range. */
const char* dpident_result_table_name(const dpident_result* result,
                                      size_t index);
const char* dpident_result_table_csv(const dpident_result* result,
                                     size_t index);
/* Table content by name; NULL when absent. */
const char* dpident_result_table_by_name(const dpident_result* result,
                                         const char* name);
void dpident_result_free(dpident_result* result);

#ifdef __cplusplus
}
#endif

#endif /* DPIDENT_H_ */
