#ifndef DESCENTE_H
#define DESCENTE_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Outcome of a call. The first four values agree with the command line
 * exit codes.
 */
typedef enum DescenteStatus {
  /**
   * the call succeeded and, for judgments, the verdict is positive
   */
  DESCENTE_STATUS_OK = 0,
  /**
   * the verdict is negative, or the input failed validation
   */
  DESCENTE_STATUS_NEGATIVE = 1,
  /**
   * malformed input, unknown entity or bad argument
   */
  DESCENTE_STATUS_USAGE = 2,
  /**
   * the enumeration bound was exceeded
   */
  DESCENTE_STATUS_BOUND_EXCEEDED = 3,
  /**
   * a null pointer or invalid UTF-8 was passed
   */
  DESCENTE_STATUS_INVALID_ARGUMENT = 4,
  /**
   * the library panicked; the handle involved should be freed
   */
  DESCENTE_STATUS_INTERNAL = 5,
} DescenteStatus;

/**
 * A loaded, validated workspace.
 */
typedef struct DescenteWorkspace DescenteWorkspace;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Loads and validates workspace files.
 *
 * # Safety
 * `paths` points to `count` valid NUL-terminated strings; `out` is a valid
 * pointer. On success `*out` receives a handle to free with
 * [`descente_workspace_free`].
 */
enum DescenteStatus descente_workspace_load(const char *const *paths,
                                            size_t count,
                                            struct DescenteWorkspace **out);

/**
 * Parses and validates one workspace document held in memory.
 *
 * # Safety
 * `text` is a NUL-terminated string and `out` a valid pointer.
 */
enum DescenteStatus descente_workspace_from_json(const char *text, struct DescenteWorkspace **out);

/**
 * Frees a workspace. Null is ignored.
 *
 * # Safety
 * `ws` was returned by this library and is not used afterwards.
 */
void descente_workspace_free(struct DescenteWorkspace *ws);

/**
 * Number of sites, pseudofunctors and maps in a workspace.
 *
 * # Safety
 * `ws` is a live handle; each out pointer is valid or null.
 */
enum DescenteStatus descente_workspace_counts(const struct DescenteWorkspace *ws,
                                              size_t *sites,
                                              size_t *pseudofunctors,
                                              size_t *maps);

/**
 * Decides a judgment on a named entity. `judgment` is one of `prestack`,
 * `stack`, `fibrant` (on a pseudofunctor) or `local-fib`, `lwe` (on a map).
 * The JSON report is stored in `*report` when `report` is not null, also
 * for negative verdicts.
 *
 * # Safety
 * `ws` is a live handle, `judgment` and `name` are NUL-terminated strings and
 * `report` is valid or null.
 */
enum DescenteStatus descente_check(const struct DescenteWorkspace *ws,
                                   const char *judgment,
                                   const char *name,
                                   char **report);

/**
 * Runs a command line in process. `argv` excludes the program name. The
 * printed output (stdout, then stderr) is stored in `*output` when `output`
 * is not null. Returns the exit code.
 *
 * # Safety
 * `argv` points to `argc` NUL-terminated strings; `output` is valid or null.
 */
int descente_run(const char *const *argv, size_t argc, char **output);

/**
 * Frees a string returned by this library. Null is ignored.
 *
 * # Safety
 * `s` was returned by this library and is not used afterwards.
 */
void descente_string_free(char *s);

/**
 * Message of the last failing call on this thread, or null. Valid until the
 * next call into the library on the same thread.
 */
const char *descente_last_error(void);

/**
 * Library version as a static NUL-terminated string.
 */
const char *descente_version(void);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* DESCENTE_H */
