#ifndef UWOI_H
#define UWOI_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Outcome of a call.
 */
typedef enum UwoiStatus {
  UWOI_STATUS_OK = 0,
  /**
   * The command ran but at least one of its checks failed.
   */
  UWOI_STATUS_CHECKS_FAILED = 1,
  UWOI_STATUS_NULL_POINTER = 2,
  UWOI_STATUS_INVALID_UTF8 = 3,
  UWOI_STATUS_INVALID_INPUT = 4,
  UWOI_STATUS_SIZE_MISMATCH = 5,
  UWOI_STATUS_SINGULAR = 6,
  UWOI_STATUS_NOT_IN_ORBIT = 7,
  UWOI_STATUS_NOT_ADJACENT = 8,
  UWOI_STATUS_SINGULAR_DIRECTION = 9,
  UWOI_STATUS_DIVERGENCE = 10,
  UWOI_STATUS_POLE = 11,
  UWOI_STATUS_BOUNDARY = 12,
  UWOI_STATUS_UNSUPPORTED = 13,
  UWOI_STATUS_INTERNAL = 14,
  UWOI_STATUS_PANIC = 15,
} UwoiStatus;

/**
 * A nilpotent orbit of GL(n) together with its Richardson data.
 */
typedef struct UwoiOrbit UwoiOrbit;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Creates an orbit from a partition such as `"3,2,1"`.
 *
 * # Safety
 * `partition` must be a valid C string and `out` a valid pointer.
 */
enum UwoiStatus uwoi_orbit_new(const char *partition, struct UwoiOrbit **out);

/**
 * Releases a handle from [`uwoi_orbit_new`]. Null is ignored.
 *
 * # Safety
 * `h` must come from [`uwoi_orbit_new`] and not have been freed.
 */
void uwoi_orbit_free(struct UwoiOrbit *h);

/**
 * Rank `n` of the ambient group.
 *
 * # Safety
 * `h` must be a live handle and `out` a valid pointer.
 */
enum UwoiStatus uwoi_orbit_rank(const struct UwoiOrbit *h, size_t *out);

/**
 * Whether every part size from 1 up to the largest part occurs.
 *
 * # Safety
 * `h` must be a live handle and `out` a valid pointer.
 */
enum UwoiStatus uwoi_orbit_is_simple(const struct UwoiOrbit *h, bool *out);

/**
 * Number of Richardson parabolics of the orbit with the standard Levi.
 *
 * # Safety
 * `h` must be a live handle and `out` a valid pointer.
 */
enum UwoiStatus uwoi_orbit_richardson_count(const struct UwoiOrbit *h, uint64_t *out);

/**
 * The constant `c_X` at `backend`: `"global"`, `"inf"`, `"C"` or `"pQ"`.
 * The global backend reports [`UwoiStatus::Divergence`] for non-simple orbits.
 *
 * # Safety
 * `h` must be a live handle, `backend` a C string and `out` a valid pointer.
 */
enum UwoiStatus uwoi_orbit_c_constant(const struct UwoiOrbit *h, const char *backend, double *out);

/**
 * Solves `Y = n⁻¹ X n` for `n` in the unipotent radical. `y` and the
 * result use the `"a,b;c,d"` matrix text format with exact rationals.
 *
 * # Safety
 * `h` must be a live handle, `y` a C string and `out` a valid pointer.
 */
enum UwoiStatus uwoi_orbit_solve_in_n(const struct UwoiOrbit *h, const char *y, char **out);

/**
 * Runs one `uwoi` command (`argv` without the program name) and returns
 * its JSON report. The status is [`UwoiStatus::ChecksFailed`] when the
 * report has failing checks; a report is still written in that case and
 * when a library error occurs.
 *
 * # Safety
 * `argv` must point to `argc` valid C strings and `out` must be valid.
 */
enum UwoiStatus uwoi_run(const char *const *argv, size_t argc, char **out);

/**
 * Message of the latest failure on this thread, or null. The caller
 * owns the returned string.
 */
char *uwoi_last_error(void);

/**
 * Releases a string returned by this library. Null is ignored.
 *
 * # Safety
 * `s` must come from this library and not have been freed.
 */
void uwoi_string_free(char *s);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* UWOI_H */
