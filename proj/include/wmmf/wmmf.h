// Copyright 2026 The wmmf Authors
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


#ifndef WMMF_WMMF_H_
#define WMMF_WMMF_H_

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

#if defined(_WIN32)
#define WMMF_API __declspec(dllexport)
#else
#define WMMF_API __attribute__((visibility("default")))
#endif

/* Status codes. Every function returning wmmf_status leaves a message for
 * wmmf_last_error() on failure. */
typedef enum wmmf_status {
  WMMF_OK = 0,
  WMMF_ERR_INVALID_ARGUMENT = 1,
  WMMF_ERR_VALIDATION = 2,
  WMMF_ERR_PARSE = 3,
  WMMF_ERR_IO = 4,
  WMMF_ERR_DOMAIN = 5,
  WMMF_ERR_DEGENERATE_DUAL = 6,
  WMMF_ERR_NUMERICAL = 7,
  WMMF_ERR_PRECONDITION = 8,
  WMMF_ERR_SIZE = 9,
  WMMF_ERR_INTERNAL = 10
} wmmf_status;

typedef enum wmmf_algorithm {
  WMMF_ALGORITHM_WMMF = 0,
  WMMF_ALGORITHM_SISO = 1
} wmmf_algorithm;

typedef struct wmmf_scenario wmmf_scenario;
typedef struct wmmf_result wmmf_result;

typedef struct wmmf_dimensions {
  int num_tx_antennas;
  int num_groups;
  const int* users_per_group;      /* num_groups entries */
  const int* rx_antennas_per_user; /* sum of users_per_group entries */
  const int* streams_per_group;    /* NULL: min receive antennas of the group */
  const double* weights;           /* NULL: all ones */
} wmmf_dimensions;

/* Message of the last failure on the calling thread; "" if none. */
WMMF_API const char* wmmf_last_error(void);
WMMF_API const char* wmmf_status_name(wmmf_status status);
WMMF_API const char* wmmf_version(void);

/* Strings returned through char** are owned by the caller. */
WMMF_API void wmmf_string_free(char* text);

/* Scenarios */
WMMF_API wmmf_status wmmf_scenario_load(const char* path, wmmf_scenario** out);
WMMF_API wmmf_status wmmf_scenario_from_json(const char* json_text, wmmf_scenario** out);
WMMF_API wmmf_status wmmf_scenario_generate(const wmmf_dimensions* dims, double p_t_db,
                                            double sigma2, uint64_t seed, wmmf_scenario** out);
WMMF_API wmmf_status wmmf_scenario_save(const wmmf_scenario* scenario, const char* path);
WMMF_API wmmf_status wmmf_scenario_to_json(const wmmf_scenario* scenario, char** out);
WMMF_API int wmmf_scenario_num_users(const wmmf_scenario* scenario);
WMMF_API int wmmf_scenario_num_groups(const wmmf_scenario* scenario);
WMMF_API int wmmf_scenario_num_tx_antennas(const wmmf_scenario* scenario);
WMMF_API double wmmf_scenario_power_budget(const wmmf_scenario* scenario);
WMMF_API void wmmf_scenario_free(wmmf_scenario* scenario);

/* Solving. options_json is a solver object such as {"step_size": 0.01} or
 * NULL for defaults; an "algorithm" key in it is ignored in favour of the
 * argument. */
WMMF_API wmmf_status wmmf_solve(const wmmf_scenario* scenario, wmmf_algorithm algorithm,
                                const char* options_json, wmmf_result** out);

/* Scenario plus optional "solver" object from one config file. */
WMMF_API wmmf_status wmmf_solve_config(const char* config_path, wmmf_result** out);

WMMF_API double wmmf_result_common_rate(const wmmf_result* result);
WMMF_API double wmmf_result_objective(const wmmf_result* result);
WMMF_API double wmmf_result_min_sinr(const wmmf_result* result);
WMMF_API double wmmf_result_power(const wmmf_result* result);
WMMF_API double wmmf_result_max_kkt_residual(const wmmf_result* result);
WMMF_API int wmmf_result_converged(const wmmf_result* result);
WMMF_API int wmmf_result_outer_iterations(const wmmf_result* result);
WMMF_API int wmmf_result_inner_iterations(const wmmf_result* result);
WMMF_API int wmmf_result_num_groups(const wmmf_result* result);

/* Beamformer of one group, N_T x L_g, column-major with interleaved
 * (re, im) pairs. Pass data = NULL to query the shape. capacity counts
 * doubles. */
WMMF_API wmmf_status wmmf_result_beamformer(const wmmf_result* result, int group, int* rows,
                                            int* cols, double* data, size_t capacity);

WMMF_API wmmf_status wmmf_result_write_trace(const wmmf_result* result, const char* path);
WMMF_API wmmf_status wmmf_result_summary_json(const wmmf_result* result, char** out);
WMMF_API void wmmf_result_free(wmmf_result* result);

/* Exhaustive search on a tiny single-antenna instance; grid_json is a grid
 * object ({"phase_steps", "amplitude_steps", "power_steps",
 * "refinement_rounds"}) or NULL. Writes a JSON report. */
WMMF_API wmmf_status wmmf_oracle(const wmmf_scenario* scenario, const char* grid_json,
                                 char** report_json);

/* Runs an experiment file. trace_dir may be NULL. summary_json receives
 * {"output", "rows", "failed"} and may be NULL. */
WMMF_API wmmf_status wmmf_sweep_run(const char* experiment_path, const char* trace_dir,
                                    char** summary_json);

/* Re-checks a result CSV. report_text receives the printed table;
 * all_passed is set to 1 or 0. */
WMMF_API wmmf_status wmmf_validate_results(const char* csv_path, char** report_text,
                                           int* all_passed);

#ifdef __cplusplus
}
#endif

#endif /* WMMF_WMMF_H_ */
