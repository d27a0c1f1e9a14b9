#ifndef CONSTELLATION_LAB_H
#define CONSTELLATION_LAB_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Status codes. Input and internal errors match the CLI exit codes.
 */
typedef enum ClStatus {
  CL_STATUS_OK = 0,
  CL_STATUS_INPUT_ERROR = 2,
  CL_STATUS_INTERNAL_ERROR = 3,
  CL_STATUS_NULL_POINTER = 4,
  CL_STATUS_INVALID_UTF8 = 5,
  CL_STATUS_PANIC = 6,
} ClStatus;

typedef enum ClCommand {
  CL_COMMAND_CHECK = 0,
  CL_COMMAND_GIT_CHECK = 1,
  CL_COMMAND_DERIVE_PARAMS = 2,
  CL_COMMAND_APPROX = 3,
  CL_COMMAND_CHOOSE_WINDOW = 4,
  CL_COMMAND_HILBERT_CHOW = 5,
  CL_COMMAND_ENUMERATE = 6,
  CL_COMMAND_SELFTEST = 7,
} ClCommand;

/**
 * A parsed problem.
 */
typedef struct ClProblem ClProblem;

/**
 * Run options. Optional values are disabled by their `has_*` flag or, for
 * the bound, by a zero denominator and, for the cap, by zero.
 */
typedef struct ClRunFlags {
  uint64_t seed;
  bool has_window;
  int64_t window;
  int64_t bound_numerator;
  int64_t bound_denominator;
  uint64_t cap;
  bool timing;
} ClRunFlags;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Default flags: seed 0, no window, no bound, no cap, no timing.
 */
struct ClRunFlags cl_run_flags_default(void);

/**
 * Parses problem text. On success `*out` holds a new handle.
 *
 * # Safety
 * `text` must be a NUL-terminated string and `out` a valid pointer.
 */
enum ClStatus cl_problem_parse(const char *text, struct ClProblem **out);

/**
 * Releases a handle from `cl_problem_parse`. Null is ignored.
 *
 * # Safety
 * `problem` must come from `cl_problem_parse` and not be freed twice.
 */
void cl_problem_free(struct ClProblem *problem);

/**
 * Runs a command. `problem` may be null for the self-test and `flags` may
 * be null for the defaults. On success `*out_json` holds the report.
 * A failed self-test returns `InternalError` and still sets the report.
 *
 * # Safety
 * Pointers must be null or valid; `out_json` must be valid.
 */
enum ClStatus cl_run(enum ClCommand command,
                     const struct ClProblem *problem,
                     const struct ClRunFlags *flags,
                     char **out_json);

/**
 * Releases a string returned by this library. Null is ignored.
 *
 * # Safety
 * `s` must come from this library and not be freed twice.
 */
void cl_string_free(char *s);

/**
 * Message of the last failure on this thread, or an empty string. Valid
 * until the next call into the library on the same thread.
 */
const char *cl_last_error_message(void);

/**
 * Library version as a static string.
 */
const char *cl_version(void);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* CONSTELLATION_LAB_H */
