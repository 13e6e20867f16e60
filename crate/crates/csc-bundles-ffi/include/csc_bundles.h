/* C interface for the csc-bundles toolkit. Generated by cbindgen; do not edit. */

#ifndef CSC_BUNDLES_H
#define CSC_BUNDLES_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Status code returned by every entry point.
 */
typedef enum CscStatus {
  /**
   * The call succeeded.
   */
  CSC_STATUS_OK = 0,
  /**
   * A parameter violated a precondition.
   */
  CSC_STATUS_INVALID_ARGUMENT = 1,
  /**
   * The squared modulus lies outside the admissible interval of the
   * requested branch.
   */
  CSC_STATUS_INADMISSIBLE_MODULUS = 2,
  /**
   * A numerical procedure failed to converge.
   */
  CSC_STATUS_NUMERIC = 3,
  /**
   * A required pointer was null.
   */
  CSC_STATUS_NULL_POINTER = 4,
} CscStatus;

/**
 * Result of a radial solution count.
 */
typedef struct CscCountReport CscCountReport;

/**
 * One solved warping profile over a base of scalar curvature `base_scal`.
 */
typedef struct CscJoinSolution CscJoinSolution;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Version of the underlying library as a static NUL-terminated string.
 */
const char *csc_version(void);

/**
 * Message describing the most recent failure on this thread. Never null;
 * empty before the first failure.
 */
const char *csc_last_error_message(void);

/**
 * Quarter period K(k) of the elliptic functions with modulus `k`.
 */
enum CscStatus csc_quarter_period(double k, double *out);

/**
 * Jacobi elliptic sn, cn, dn at argument `t` and modulus `k`. Individual
 * out-pointers may be null to skip that component.
 */
enum CscStatus csc_jacobi(double t, double k, double *sn, double *cn, double *dn);

/**
 * Solve for the warping profiles with the given squared modulus on the
 * branch selected by the fiber data (k1, k2, a1, a2).
 */
enum CscStatus csc_join_solution_elliptic(double base_scal,
                                          uint32_t k1,
                                          uint32_t k2,
                                          double a1,
                                          double a2,
                                          double modulus_sq,
                                          struct CscJoinSolution **out);

/**
 * Solve for trigonometric profiles (modulus zero) with the given frequency;
 * requires a1 == a2.
 */
enum CscStatus csc_join_solution_flat(double base_scal,
                                      uint32_t k1,
                                      uint32_t k2,
                                      double a1,
                                      double a2,
                                      double gamma,
                                      struct CscJoinSolution **out);

/**
 * Read the frequency gamma, the profile half-period T and the total scalar
 * curvature R from a solution handle. Null outputs are skipped.
 */
enum CscStatus csc_join_solution_info(const struct CscJoinSolution *handle,
                                      double *gamma,
                                      double *span,
                                      double *scal);

/**
 * Re-evaluate the scalar curvature of the stored profiles on `grid`
 * interior points and report the largest deviation from the stored R.
 */
enum CscStatus csc_join_solution_verify(const struct CscJoinSolution *handle,
                                        uint32_t grid,
                                        double *out);

/**
 * Release a solution handle.
 */
void csc_join_solution_free(struct CscJoinSolution *handle);

/**
 * Number of one-parameter solution families for the given fiber data.
 */
enum CscStatus csc_family_count(uint32_t k1, uint32_t k2, double a1, double a2, uint32_t *out);

/**
 * Count positive radial solutions of the subcritical equation on the
 * d-sphere of the given radius inside dimension n at curvature `scal`.
 * `n_scan` = 0 selects the default scan resolution.
 */
enum CscStatus csc_count_radial(uint32_t n,
                                double scal,
                                uint32_t d,
                                double radius,
                                uint32_t n_scan,
                                struct CscCountReport **out);

/**
 * Number of distinct solutions found.
 */
enum CscStatus csc_count_report_count(const struct CscCountReport *handle, uint32_t *out);

/**
 * Number of solutions after identifying reflection pairs.
 */
enum CscStatus csc_count_report_collapsed(const struct CscCountReport *handle, uint32_t *out);

/**
 * Lower bound on the count guaranteed by the eigenvalue criterion.
 */
enum CscStatus csc_count_report_lower_bound(const struct CscCountReport *handle, uint32_t *out);

/**
 * Central value of the `index`-th solution (sorted by value).
 */
enum CscStatus csc_count_report_alpha(const struct CscCountReport *handle,
                                      uint32_t index,
                                      double *out);

/**
 * Release a count report handle.
 */
void csc_count_report_free(struct CscCountReport *handle);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* CSC_BUNDLES_H */
