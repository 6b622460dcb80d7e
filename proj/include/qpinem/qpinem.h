/* Copyright 2026 The qpinem Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *      http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

/* C interface to the qpinem simulator: joint photon-electron statistics for
 * free-electron wavepackets scattering off one quantized photon mode.
 *
 * All entry points return qpn_status; on failure qpn_last_error() carries a
 * human-readable message (thread-local, valid until the next failing call on
 * the same thread). Handles are opaque and owned by the caller through the
 * matching *_free function.
 */

#ifndef QPINEM_QPINEM_H
#define QPINEM_QPINEM_H

#ifdef __cplusplus
extern "C" {
#endif

typedef enum qpn_status {
  QPN_OK = 0,
  QPN_ERR_INVALID_ARGUMENT = 1,
  QPN_ERR_PARSE = 2,
  QPN_ERR_VALIDATION = 3,
  QPN_ERR_CUTOFF_TOO_SMALL = 4,
  QPN_ERR_SERIES_NOT_CONVERGED = 5,
  QPN_ERR_NUMERIC_OVERFLOW = 6,
  QPN_ERR_CUTOFF_BUDGET_EXCEEDED = 7,
  QPN_ERR_DIMENSION_TOO_LARGE = 8,
  QPN_ERR_UNKNOWN_AXIS = 9,
  QPN_ERR_EMPTY_SLICE = 10,
  QPN_ERR_IO = 11,
  QPN_ERR_INTERNAL = 12
} qpn_status;

typedef struct qpn_scenario qpn_scenario;
typedef struct qpn_result qpn_result;
typedef struct qpn_sweep_result qpn_sweep_result;

const char* qpn_version(void);
const char* qpn_status_name(qpn_status status);
const char* qpn_last_error(void);

/* ---- scenario configs ------------------------------------------------- */

qpn_status qpn_scenario_from_json(const char* json_text, qpn_scenario** out);
qpn_status qpn_scenario_from_file(const char* path, qpn_scenario** out);
qpn_status qpn_scenario_validate(const qpn_scenario* scenario);
/* Canonical JSON for the resolved config; caller must NOT free. Valid while
 * the scenario handle lives. */
const char* qpn_scenario_json(const qpn_scenario* scenario);
void qpn_scenario_free(qpn_scenario* scenario);

/* ---- runs ------------------------------------------------------------- */

/* out_dir may be NULL or empty to compute without writing files. */
qpn_status qpn_run(const qpn_scenario* scenario, const char* out_dir, qpn_result** out);
qpn_status qpn_sweep(const qpn_scenario* scenario, const char* out_dir, qpn_sweep_result** out);
/* Largest probability deviation between the factorized evolution, the closed
 * forms (two electrons) and the dense matrix-exponential oracle. */
qpn_status qpn_oracle_check(const qpn_scenario* scenario, double* max_abs_deviation);

qpn_status qpn_result_pcc(const qpn_result* result, double* value, int* defined);
qpn_status qpn_result_success_probability(const qpn_result* result, double* value);
qpn_status qpn_result_dropped_mass(const qpn_result* result, double* value);
const char* qpn_result_manifest_json(const qpn_result* result);
int qpn_result_file_count(const qpn_result* result);
const char* qpn_result_file_path(const qpn_result* result, int index);
void qpn_result_free(qpn_result* result);

int qpn_sweep_result_point_count(const qpn_sweep_result* result);
/* Returns the point's PCC; defined = 0 for degenerate distributions or
 * failed points (error message in *error, empty string otherwise). */
qpn_status qpn_sweep_result_point(const qpn_sweep_result* result, int index, const char** mode,
                                  double* coupling_abs, double* photon, double* pcc, int* defined,
                                  const char** error);
const char* qpn_sweep_result_manifest_json(const qpn_sweep_result* result);
void qpn_sweep_result_free(qpn_sweep_result* result);

/* ---- direct numeric surface ------------------------------------------- */

/* Two-electron S-matrix element for photon numbers n_i -> n_f and electron
 * energy gains dj, dk (in photon-energy units). */
qpn_status qpn_element_two_electron(double g1_re, double g1_im, double g2_re, double g2_im,
                                    int n_i, int n_f, int dj, int dk, double* out_re,
                                    double* out_im);
qpn_status qpn_element_single_electron(double g_re, double g_im, int n_i, int n_f,
                                       double* out_re, double* out_im);
qpn_status qpn_bessel_jn(int order, double x, double* out);
qpn_status qpn_log_factorial(int n, double* out);

#ifdef __cplusplus
}
#endif

#endif /* QPINEM_QPINEM_H */
