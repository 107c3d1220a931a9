/* C interface for the unassume analyzer. */

#ifndef UNASSUME_H
#define UNASSUME_H

/* Generated by cbindgen; do not edit by hand. */

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Status codes returned by the API.
 */
typedef enum UnassumeStatus {
  /**
   * Success.
   */
  UNASSUME_STATUS_OK = 0,
  /**
   * A file could not be read or written.
   */
  UNASSUME_STATUS_IO_ERROR = 1,
  /**
   * The program or witness failed to parse.
   */
  UNASSUME_STATUS_PARSE_ERROR = 2,
  /**
   * Invalid mode/domain/strategy combination or argument value.
   */
  UNASSUME_STATUS_CONFIG_ERROR = 3,
  /**
   * A required pointer argument was NULL or not valid UTF-8.
   */
  UNASSUME_STATUS_INVALID_ARGUMENT = 4,
} UnassumeStatus;

/**
 * Opaque analysis result handle.
 */
typedef struct UnassumeReport UnassumeReport;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * The last error message recorded on this thread, or an empty string.
 * The pointer stays valid until the next failing call on this thread.
 */
const char *unassume_last_error(void);

/**
 * Analyze `program_path` (optionally guided by `witness_path`) and
 * store a new report handle in `*out`. `mode`, `domain` and `strategy`
 * accept the same values as the command-line flags; NULL or "" picks
 * the default. On error `*out` is left untouched and the message is
 * available via `unassume_last_error`.
 *
 * # Safety
 * Pointer arguments must be NULL or point to NUL-terminated strings;
 * `out` must point to writable memory for one pointer.
 */
enum UnassumeStatus unassume_analyze(const char *program_path,
                                     const char *witness_path,
                                     const char *mode,
                                     const char *domain,
                                     const char *strategy,
                                     struct UnassumeReport **out);

/**
 * The report as a JSON document; valid until the handle is freed.
 *
 * # Safety
 * `report` must be a live handle from `unassume_analyze`.
 */
const char *unassume_report_json(const struct UnassumeReport *report);

/**
 * 1 if the safety property was verified, 0 otherwise.
 *
 * # Safety
 * `report` must be a live handle from `unassume_analyze`.
 */
int32_t unassume_report_property_verified(const struct UnassumeReport *report);

/**
 * 1 if the witness was validated, 0 otherwise.
 *
 * # Safety
 * `report` must be a live handle from `unassume_analyze`.
 */
int32_t unassume_report_witness_validated(const struct UnassumeReport *report);

/**
 * Free a report handle. NULL is ignored.
 *
 * # Safety
 * `report` must be NULL or a handle from `unassume_analyze`, freed at
 * most once.
 */
void unassume_report_free(struct UnassumeReport *report);

#ifdef __cplusplus
} // extern "C"
#endif // __cplusplus

#endif /* UNASSUME_H */
