/* mdeopt - multipopulation differential evolution for multimodal problems
 * SPDX-License-Identifier: Apache-2.0
 *
 * C interface to the optimizers and the benchmark harness. Handles are
 * opaque; every fallible call returns an mdeopt_status and leaves a message
 * for mdeopt_last_error() on the calling thread. Strings returned through
 * `char **` parameters are owned by the caller and released with
 * mdeopt_string_free().
 */

#ifndef MDEOPT_H
#define MDEOPT_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#  if defined(MDEOPT_BUILDING_LIBRARY)
#    define MDEOPT_API __declspec(dllexport)
#  else
#    define MDEOPT_API __declspec(dllimport)
#  endif
#else
#  define MDEOPT_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum mdeopt_status {
  MDEOPT_OK = 0,
  MDEOPT_ERR_INVALID_ARGUMENT = 1, /* null handle or malformed argument */
  MDEOPT_ERR_CONFIG = 2,           /* parameter or configuration rejected */
  MDEOPT_ERR_UNKNOWN_PROBLEM = 3,
  MDEOPT_ERR_EVALUATION = 4,       /* objective returned a non-finite value */
  MDEOPT_ERR_IO = 5,
  MDEOPT_ERR_RUN_FAILED = 6,       /* report produced, but some runs failed */
  MDEOPT_ERR_INTERNAL = 7
} mdeopt_status;

typedef enum mdeopt_output {
  MDEOPT_OUT_RUNS_CSV = 0,
  MDEOPT_OUT_AGGREGATES_CSV = 1,
  MDEOPT_OUT_REPORT_JSON = 2,
  MDEOPT_OUT_TRACE_CSV = 3, /* trace of the first cell */
  MDEOPT_OUT_SWEEP_CSV = 4
} mdeopt_output;

typedef struct mdeopt_config mdeopt_config;
typedef struct mdeopt_report mdeopt_report;
typedef struct mdeopt_result mdeopt_result;

MDEOPT_API const char *mdeopt_version(void);

/* Message for the last failing call on this thread, "" if none. */
MDEOPT_API const char *mdeopt_last_error(void);

MDEOPT_API void mdeopt_string_free(char *s);

/* JSON array describing every registered benchmark and its defaults. */
MDEOPT_API mdeopt_status mdeopt_problems_json(char **out);

MDEOPT_API mdeopt_status mdeopt_problem_evaluate(const char *problem, const double *x, size_t dim,
                                                 double *value);

MDEOPT_API mdeopt_status mdeopt_config_new(mdeopt_config **out);
MDEOPT_API mdeopt_status mdeopt_config_from_json(const char *json, mdeopt_config **out);

/* Keys: problem, algo, runs, seed, anchor_mode, subpop_threads, parallel,
 * trace, out, or a parameter (np, f, cr, gmax, eps, nsp, beta, rho, tol). */
MDEOPT_API mdeopt_status mdeopt_config_set(mdeopt_config *config, const char *key,
                                           const char *value);
MDEOPT_API mdeopt_status mdeopt_config_validate(const mdeopt_config *config);
MDEOPT_API mdeopt_status mdeopt_config_to_json(const mdeopt_config *config, char **out);
MDEOPT_API void mdeopt_config_free(mdeopt_config *config);

/* On success *out is set even when some runs failed; the status is then
 * MDEOPT_ERR_RUN_FAILED and the failures are in the report. */
MDEOPT_API mdeopt_status mdeopt_run_experiment(const mdeopt_config *config, mdeopt_report **out);
MDEOPT_API mdeopt_status mdeopt_run_sweep(const mdeopt_config *base, const char *parameter,
                                          const double *values, size_t count,
                                          size_t runs_per_value, mdeopt_report **out);

MDEOPT_API mdeopt_status mdeopt_report_text(const mdeopt_report *report, mdeopt_output kind,
                                            char **out);

/* Experiments: runs.csv, aggregates.csv, report.json and trace files when
 * tracing was requested. Sweeps: sweep.csv and sweep.json. */
MDEOPT_API mdeopt_status mdeopt_report_write(const mdeopt_report *report, const char *dir);

MDEOPT_API mdeopt_status mdeopt_report_counts(const mdeopt_report *report, size_t *runs,
                                              size_t *failed);
MDEOPT_API void mdeopt_report_free(mdeopt_report *report);

/* A user objective. Returning a non-finite value aborts the run with
 * MDEOPT_ERR_EVALUATION. */
typedef double (*mdeopt_objective)(const double *x, size_t dim, void *user_data);

/* Minimizes `f` over the box [lower, upper] with "de", "mde-itmf" or "dewi".
 * Parameters start from the library defaults and take the parameter
 * overrides of `config` (may be NULL), along with its anchor mode and
 * subpop_threads settings. */
MDEOPT_API mdeopt_status mdeopt_minimize(const char *algorithm, mdeopt_objective f,
                                         void *user_data, size_t dim, const double *lower,
                                         const double *upper, const mdeopt_config *config,
                                         uint64_t seed, mdeopt_result **out);

MDEOPT_API size_t mdeopt_result_count(const mdeopt_result *result);
MDEOPT_API uint64_t mdeopt_result_evaluations(const mdeopt_result *result);

/* Copies best point `index` (dim coordinates) and its objective value. */
MDEOPT_API mdeopt_status mdeopt_result_point(const mdeopt_result *result, size_t index,
                                             double *coords, size_t dim, double *value);
MDEOPT_API void mdeopt_result_free(mdeopt_result *result);

#ifdef __cplusplus
}
#endif

#endif
