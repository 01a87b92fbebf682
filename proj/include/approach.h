/* C interface to the approachability library: opaque handles, integer status
 * codes, and a thread-local textual error message. Suitable for dlopen or for
 * binding from other languages; the bundled CLI is built entirely on top of
 * this header. */

#ifndef APPROACH_H
#define APPROACH_H

#ifdef __cplusplus
extern "C" {
#endif

typedef enum apx_status {
  APX_OK = 0,
  APX_ERR_INVALID_ARGUMENT = 1,
  APX_ERR_PARSE = 2,
  APX_ERR_IO = 3,
  APX_ERR_NUMERIC = 4,
  APX_ERR_ERGODICITY = 5,
  APX_ERR_NO_CONVERGENCE = 6,
  APX_ERR_UNSUPPORTED = 7,
  APX_ERR_INTERNAL = 8
} apx_status;

const char* apx_version(void);
const char* apx_status_name(apx_status status);

/* Message for the most recent failing call on this thread; empty if none. */
const char* apx_last_error(void);

/* ---- Convex target sets ------------------------------------------------ */

typedef struct apx_target apx_target;

/* Axis-aligned box {x : lo <= x <= hi}, dim coordinates each. */
apx_status apx_target_create_box(int dim, const double* lower, const double* upper,
                                 apx_target** out);

/* Intersection of half-spaces {x : <normal_i, x> <= offset_i}. `normals`
 * holds count*dim doubles, row-major. Normals are normalized internally.
 * `interior` may be NULL; when given it must satisfy every half-space and
 * skips the feasibility search. */
apx_status apx_target_create_polytope(int dim, int count, const double* normals,
                                      const double* offsets, const double* interior,
                                      apx_target** out);

void apx_target_destroy(apx_target* target);

int apx_target_dim(const apx_target* target);

/* Euclidean projection of `point` (dim doubles) into `out` (dim doubles). */
apx_status apx_target_project(const apx_target* target, const double* point, double* out);

apx_status apx_target_distance(const apx_target* target, const double* point, double* out);

/* Unit steering vector toward the set, or all zeros when the point is within
 * eps_proj of it. */
apx_status apx_target_steering(const apx_target* target, const double* point,
                               double eps_proj, double* out);

/* ---- Experiment configuration ------------------------------------------ */

typedef struct apx_config apx_config;

apx_status apx_config_load(const char* path, apx_config** out);

/* Default configuration (climate demo), no file needed. */
apx_status apx_config_default(apx_config** out);

/* Applies "section.key=value", same grammar as a config file line. */
apx_status apx_config_set(apx_config* config, const char* assignment);

/* Resolved canonical config text. Free with apx_string_free. */
apx_status apx_config_dump(const apx_config* config, char** out_text);

void apx_config_destroy(apx_config* config);

void apx_string_free(char* text);

/* ---- Running experiments ------------------------------------------------ */

/* Runs every seed, writes trace_seed<N>.csv (and steps_seed<N>.csv at step
 * granularity) plus summary.csv into the configured output directory.
 * `report_out` (optional) receives a human-readable summary either way.
 * Returns APX_OK only if every seed completed with no cap-flagged episode;
 * a flagged or aborted seed yields APX_ERR_NUMERIC with details. */
apx_status apx_experiment_run(const apx_config* config, char** report_out);

/* Runs the exact-oracle verification checks for a tabular config. Sets
 * *failed_out to the number of failing checks; returns APX_OK when the suite
 * executed, even with failures. */
apx_status apx_verify_run(const apx_config* config, char** report_out, int* failed_out);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* APPROACH_H */
