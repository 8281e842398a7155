/* C interface to the Hofer geometry laboratory. */
#ifndef HOFER_LAB_H
#define HOFER_LAB_H

#include <stddef.h>

#if defined(HOFER_LAB_BUILD)
#define HOFER_LAB_API __attribute__((visibility("default")))
#else
#define HOFER_LAB_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum {
    HOFER_OK = 0,
    HOFER_ERR_INVALID_ARGUMENT = 1,
    HOFER_ERR_UNSUPPORTED = 2,
    HOFER_ERR_NOT_CONVERGED = 3,
    HOFER_ERR_ESCAPE = 4,
    HOFER_ERR_VERIFICATION_FAILED = 5,
    HOFER_ERR_CONFIG = 6,
    HOFER_ERR_INTERNAL = 7
} hofer_status;

typedef struct hofer_report hofer_report;

/* Library version, e.g. "1.0.0". */
HOFER_LAB_API const char* hofer_version(void);

/* Message of the last failed call on this thread; "" if none. */
HOFER_LAB_API const char* hofer_last_error(void);

HOFER_LAB_API size_t hofer_experiment_count(void);

/* Fields of experiment i; NULL when i is out of range. Strings live as long as the library. */
HOFER_LAB_API const char* hofer_experiment_id(size_t i);
HOFER_LAB_API const char* hofer_experiment_module(size_t i);
HOFER_LAB_API const char* hofer_experiment_command(size_t i);
HOFER_LAB_API const char* hofer_experiment_citation(size_t i);

/* Default config of an experiment as JSON. Free with hofer_string_free. */
HOFER_LAB_API hofer_status hofer_experiment_defaults(const char* id, char** json_out);

/* Runs experiment `id` with a JSON object of overrides (NULL or "" for none). */
HOFER_LAB_API hofer_status hofer_run(const char* id, const char* config_json, hofer_report** out);

HOFER_LAB_API void hofer_report_free(hofer_report* r);

/* 1 if every verdict passed, 0 otherwise, -1 on a NULL handle. */
HOFER_LAB_API int hofer_report_passed(const hofer_report* r);

/* Process exit code for the report: 0 pass, 1 verdict failed. */
HOFER_LAB_API int hofer_report_exit_code(const hofer_report* r);

/* Exit code for a failed status: 2 for config errors, 3 for numerical ones. */
HOFER_LAB_API int hofer_status_exit_code(hofer_status s);

/* Report as JSON; include_runtime = 0 drops runtime_s. Free with hofer_string_free. */
HOFER_LAB_API hofer_status hofer_report_json(const hofer_report* r, int include_runtime, char** out);

/* Named curve as CSV; name NULL picks the experiment's default curve. */
HOFER_LAB_API hofer_status hofer_report_curve_csv(const hofer_report* r, const char* name, char** out);

/* Scalar value by name. */
HOFER_LAB_API hofer_status hofer_report_scalar(const hofer_report* r, const char* name, double* out);

HOFER_LAB_API void hofer_string_free(char* s);

#ifdef __cplusplus
}
#endif

#endif
