#ifndef RICCATI_KYP_H
#define RICCATI_KYP_H

/* Generated by cbindgen from src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result codes. `Ok` is zero; the remaining values match the library's
 * error codes.
 */
typedef enum RkStatus {
  RK_STATUS_OK = 0,
  RK_STATUS_NULL_POINTER = 1,
  RK_STATUS_DIMENSION_MISMATCH = 2,
  RK_STATUS_INVALID_ARGUMENT = 3,
  RK_STATUS_NOT_HERMITIAN = 4,
  RK_STATUS_NON_FINITE = 5,
  RK_STATUS_NOT_PSD = 6,
  RK_STATUS_NOT_PD = 7,
  RK_STATUS_NOT_NONNEG = 8,
  RK_STATUS_RANGE_VIOLATION = 9,
  RK_STATUS_SINGULAR_RESOLVENT = 10,
  RK_STATUS_POLE_ON_CIRCLE = 11,
  RK_STATUS_DELTA_NOT_PSD = 12,
  RK_STATUS_C3_VIOLATION = 13,
  RK_STATUS_INCONSISTENT_ROUTES = 14,
  RK_STATUS_NOT_IN_RI = 15,
  RK_STATUS_NOT_SCALAR = 16,
  RK_STATUS_NO_CONVERGENCE = 17,
  RK_STATUS_DELTA_SINGULAR_PATH = 18,
  RK_STATUS_ITERATION_DIVERGED = 19,
  RK_STATUS_CERTIFICATE_FAILED = 20,
  RK_STATUS_NOT_MINIMAL = 21,
  RK_STATUS_TOO_LARGE = 22,
  RK_STATUS_PARSE = 23,
  RK_STATUS_IO = 24,
  RK_STATUS_PANIC = 99,
} RkStatus;

typedef enum RkUniqueness {
  RK_UNIQUENESS_UNKNOWN = 0,
  RK_UNIQUENESS_SINGLETON_INNER = 1,
  RK_UNIQUENESS_SINGLETON_CO_INNER = 2,
  RK_UNIQUENESS_SINGLETON_SCALAR_MODULUS_ONE = 3,
} RkUniqueness;

/**
 * Opaque handle to a set of Riccati-equality solutions.
 */
typedef struct RkSolutionSet RkSolutionSet;

/**
 * Opaque system handle.
 */
typedef struct RkSystem RkSystem;

typedef struct RkMembership {
  bool in_ri;
  bool in_re;
  bool in_ri_circ;
  /**
   * Set when the two membership routes disagreed inside the boundary band.
   */
  bool boundary_disagreement;
  double delta_min_eig;
  double lmi_min_eig;
  /**
   * NaN when the surplus is undefined.
   */
  double equality_residual;
} RkMembership;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the most recent failure on this thread, or NULL. The pointer
 * stays valid until the next failing call on the same thread.
 */
const char *rk_last_error_message(void);

/**
 * Creates a system from interleaved row-major matrices `A (n x n)`,
 * `B (n x m)`, `C (p x n)` and `D (p x m)`.
 *
 * # Safety
 * Each matrix pointer must reference `2 * rows * cols` readable doubles and
 * `out` must be a valid pointer.
 */
enum RkStatus rk_system_new(size_t n,
                            size_t m,
                            size_t p,
                            const double *a,
                            const double *b,
                            const double *c_mat,
                            const double *d,
                            struct RkSystem **out);

/**
 * Creates a system from a JSON system document.
 *
 * # Safety
 * `json` must be a NUL-terminated string and `out` a valid pointer.
 */
enum RkStatus rk_system_from_json(const char *json, struct RkSystem **out);

/**
 * # Safety
 * `sys` must be NULL or a handle from `rk_system_new`/`rk_system_from_json`
 * that has not been freed.
 */
void rk_system_free(struct RkSystem *sys);

/**
 * # Safety
 * `sys` must be a live handle; the output pointers may be NULL.
 */
enum RkStatus rk_system_dims(const struct RkSystem *sys, size_t *n, size_t *m, size_t *p);

/**
 * Evaluates the transfer function at `lambda = re + i im` into
 * `out` (`2 p m` doubles).
 *
 * # Safety
 * `sys` must be a live handle and `out` must have room for `2 p m` doubles.
 */
enum RkStatus rk_transfer_eval(const struct RkSystem *sys, double re, double im, double *out);

/**
 * # Safety
 * `sys` must be a live handle and `out` a valid pointer.
 */
enum RkStatus rk_is_passive(const struct RkSystem *sys, double tol, bool *out);

/**
 * # Safety
 * `sys` must be a live handle and `out` a valid pointer.
 */
enum RkStatus rk_is_minimal(const struct RkSystem *sys, double tol, bool *out);

/**
 * Membership of the `n x n` candidate `h` in RI, RE and RI°. A
 * non-positive `tol` selects the library defaults.
 *
 * # Safety
 * `sys` must be a live handle, `h` must reference `2 n n` doubles and
 * `out` must be valid.
 */
enum RkStatus rk_membership(const struct RkSystem *sys,
                            const double *h,
                            double tol,
                            struct RkMembership *out);

/**
 * Norm of the Schur complement of `I - M(sigma_H)* M(sigma_H)`; zero
 * exactly on RE.
 *
 * # Safety
 * As for [`rk_membership`].
 */
enum RkStatus rk_equality_gap(const struct RkSystem *sys, const double *h, double tol, double *out);

/**
 * Minimal element of RI°, written to `out` (`2 n n` doubles).
 *
 * # Safety
 * `sys` must be a live handle and `out` must have room for `2 n n` doubles.
 */
enum RkStatus rk_minimal_solution(const struct RkSystem *sys,
                                  double tol,
                                  uint64_t seed,
                                  double *out);

/**
 * Maximal element of RI°, written to `out` (`2 n n` doubles).
 *
 * # Safety
 * As for [`rk_minimal_solution`].
 */
enum RkStatus rk_maximal_solution(const struct RkSystem *sys,
                                  double tol,
                                  uint64_t seed,
                                  double *out);

/**
 * Solutions of the Riccati equality (closed form for scalar systems,
 * multi-start search otherwise).
 *
 * # Safety
 * `sys` must be a live handle and `out` a valid pointer.
 */
enum RkStatus rk_solve_re(const struct RkSystem *sys,
                          double tol,
                          uint64_t seed,
                          struct RkSolutionSet **out);

/**
 * # Safety
 * `set` must be a live handle.
 */
size_t rk_solution_set_len(const struct RkSolutionSet *set);

/**
 * Copies member `index` into `out` (`2 n n` doubles).
 *
 * # Safety
 * `set` must be a live handle and `out` must have room for `2 n n` doubles.
 */
enum RkStatus rk_solution_set_get(const struct RkSolutionSet *set, size_t index, double *out);

/**
 * Index of the member below (`maximal == false`) or above all others, or
 * -1 when there is none.
 *
 * # Safety
 * `set` must be a live handle.
 */
ptrdiff_t rk_solution_set_extreme_index(const struct RkSolutionSet *set, bool maximal);

/**
 * # Safety
 * `set` must be NULL or a handle from [`rk_solve_re`] that has not been
 * freed.
 */
void rk_solution_set_free(struct RkSolutionSet *set);

/**
 * Singleton certificate for RI° from a circle grid of `grid_steps` points.
 *
 * # Safety
 * `sys` must be a live handle and `out` a valid pointer.
 */
enum RkStatus rk_uniqueness_certificate(const struct RkSystem *sys,
                                        size_t grid_steps,
                                        double tol,
                                        enum RkUniqueness *out);

/**
 * Full JSON report (the CLI `report` command without timings). The string
 * is written to `out` and must be released with [`rk_string_free`].
 *
 * # Safety
 * `sys` must be a live handle and `out` a valid pointer.
 */
enum RkStatus rk_report_json(const struct RkSystem *sys, uint64_t seed, char **out);

/**
 * # Safety
 * `s` must be NULL or a string returned by this library, not yet freed.
 */
void rk_string_free(char *s);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* RICCATI_KYP_H */
