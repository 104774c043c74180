#ifndef AJ_FORGE_H
#define AJ_FORGE_H

/* This file is generated by cbindgen from aj-forge-ffi; do not edit by hand. */

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Job executed, property verified.
 */
#define AJ_OK 0

/**
 * Job executed, property checked and found false.
 */
#define AJ_CHECK_FAILED 1

/**
 * Job could not be executed (parse or domain error); see
 * [`aj_last_error`].
 */
#define AJ_ERROR 2

/**
 * An opaque, parsed job description.
 */
typedef struct AjJob AjJob;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Parses a JSON job config. Returns null on error; the message is
 * available through [`aj_last_error`]. The handle must be released
 * with [`aj_job_free`].
 */
struct AjJob *aj_job_parse(const char *config_json);

/**
 * Runs a parsed job. `report_json` (if non-null) receives a
 * caller-owned JSON document — the job report on status 0/1, an error
 * document on status 2.
 */
int aj_job_run(const struct AjJob *job, char **report_json);

/**
 * One-shot convenience: parse and run in a single call.
 */
int aj_run_json(const char *config_json, char **report_json);

/**
 * Releases a job handle. Null is a no-op.
 */
void aj_job_free(struct AjJob *job);

/**
 * Releases a string returned by this library. Null is a no-op.
 */
void aj_string_free(char *s);

/**
 * The last error message raised on this thread. The pointer stays
 * valid until the next failing call on the same thread; do not free.
 */
const char *aj_last_error(void);

#ifdef __cplusplus
} // extern "C"
#endif // __cplusplus

#endif /* AJ_FORGE_H */
