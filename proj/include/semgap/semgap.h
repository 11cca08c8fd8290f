/* Copyright 2026 The semgap Authors

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

#ifndef SEMGAP_SEMGAP_H_
#define SEMGAP_SEMGAP_H_

/* C interface to the semgap closed-loop simulator.
 *
 * Every function returns an sg_status. On failure the message is available
 * from sg_last_error() on the calling thread until the next failing call.
 * Strings returned through char** out-parameters are owned by the caller
 * and released with sg_string_free. Handles are released with their
 * matching *_free function; passing NULL to any *_free is a no-op. */

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

#if defined(_WIN32)
#define SG_API __declspec(dllexport)
#else
#define SG_API __attribute__((visibility("default")))
#endif

typedef enum sg_status {
  SG_OK = 0,
  SG_ERR_PARSE = 1,
  SG_ERR_INVALID_ARGUMENT = 2,
  SG_ERR_NOT_FOUND = 3,
  SG_ERR_IO = 4,
  SG_ERR_NUMERIC = 5,
  SG_ERR_INCOMPLETE = 6,
  SG_ERR_INTERNAL = 99
} sg_status;

typedef struct sg_context sg_context;         /* attack profile registry */
typedef struct sg_scenario sg_scenario;       /* one parsed scenario */
typedef struct sg_report sg_report;           /* one finished run */
typedef struct sg_matrix_result sg_matrix_result;

/* Absent values in the structs below are NaN; an infinite violation
 * distance (crossed without ever stopping) is +INFINITY. */
typedef struct sg_run_summary {
  int run_index;
  uint64_t seed;
  int complete;
  int stopped;
  int violated;
  double violation_distance;
  double stop_position;
  double trip_time;
  double f_succ_10;
  double f_succ_20;
  double f_succ_30;
  double f_max_50;
  int alarms;
  int frames;
} sg_run_summary;

typedef struct sg_aggregate {
  int runs;
  int complete_runs;
  double stop_rate;
  double violation_rate;
  double violation_distance;
  int infinite_violations;
  double f_succ_10;
  double f_succ_20;
  double f_succ_30;
  double f_max_50;
  double trip_time;
  double trip_delay;
  double mean_alarms;
} sg_aggregate;

SG_API const char* sg_version(void);
SG_API const char* sg_last_error(void);
SG_API void sg_string_free(char* s);

/* ---- context ---------------------------------------------------------- */

SG_API sg_status sg_context_new(sg_context** out);
SG_API void sg_context_free(sg_context* ctx);
/* Adds every *.profile file in dir to the registry. */
SG_API sg_status sg_context_load_profiles(sg_context* ctx, const char* dir);
/* Newline-separated profile names. */
SG_API sg_status sg_context_profile_names(const sg_context* ctx, char** out);
/* Writes <name>.profile for every registered profile; count may be NULL. */
SG_API sg_status sg_profiles_export(const sg_context* ctx, const char* dir, size_t* count);

/* ---- scenarios -------------------------------------------------------- */

SG_API sg_status sg_scenario_parse(const char* text, sg_scenario** out);
SG_API sg_status sg_scenario_load(const char* path, sg_scenario** out);
SG_API void sg_scenario_free(sg_scenario* s);
SG_API sg_status sg_scenario_set_seed(sg_scenario* s, uint64_t seed);
SG_API sg_status sg_scenario_set_runs(sg_scenario* s, int runs);
SG_API sg_status sg_scenario_runs(const sg_scenario* s, int* out);
SG_API sg_status sg_scenario_render(const sg_scenario* s, char** out);

/* ---- single runs ------------------------------------------------------ */

/* Runs one closed-loop episode. An incomplete run (time limit reached) is
 * still returned with SG_OK; check sg_run_summary.complete. */
SG_API sg_status sg_run(const sg_context* ctx, const sg_scenario* s, int run_index,
                        sg_report** out);
SG_API void sg_report_free(sg_report* r);
SG_API sg_status sg_report_summary(const sg_report* r, sg_run_summary* out);
SG_API sg_status sg_report_id(const sg_report* r, char** out);
SG_API sg_status sg_report_frame_csv(const sg_report* r, char** out);
SG_API sg_status sg_report_json(const sg_report* r, char** out);
/* Writes out_dir/runs/<id>.csv and <id>.json. */
SG_API sg_status sg_report_write(const sg_report* r, const char* out_dir);

/* ---- matrices --------------------------------------------------------- */

/* All runs of one scenario as a one-row matrix. out_dir may be NULL to skip
 * writing files. */
SG_API sg_status sg_run_scenario(const sg_context* ctx, const sg_scenario* s, int jobs,
                                 const char* out_dir, sg_matrix_result** out);
/* Parses and expands a matrix file, then runs it. Parse errors abort before
 * any run starts. */
SG_API sg_status sg_run_matrix_file(const sg_context* ctx, const char* path, int jobs,
                                    const char* out_dir, sg_matrix_result** out);
SG_API void sg_matrix_result_free(sg_matrix_result* m);
SG_API sg_status sg_matrix_result_rows(const sg_matrix_result* m, size_t* out);
SG_API sg_status sg_matrix_result_incomplete(const sg_matrix_result* m, int* out);
/* Fails with SG_ERR_INCOMPLETE when no run of the row completed. */
SG_API sg_status sg_matrix_result_row(const sg_matrix_result* m, size_t row, sg_aggregate* out);
/* Per-run outcome within a row; frames counts in-range frames here. */
SG_API sg_status sg_matrix_result_run(const sg_matrix_result* m, size_t row, int run,
                                      sg_run_summary* out);
SG_API sg_status sg_matrix_result_row_label(const sg_matrix_result* m, size_t row, char** out);
SG_API sg_status sg_matrix_result_csv(const sg_matrix_result* m, char** out);
SG_API sg_status sg_matrix_result_markdown(const sg_matrix_result* m, char** out);

/* ---- fidelity --------------------------------------------------------- */

/* JSON report correlating sim_path against each physical trace. Bad
 * physical traces are reported per file; a bad simulation trace fails. */
SG_API sg_status sg_fidelity(const char* sim_path, const char* const* phys_paths, size_t count,
                             double target_hz, char** json_out);

#ifdef __cplusplus
}
#endif

#endif /* SEMGAP_SEMGAP_H_ */
