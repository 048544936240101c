/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#ifndef CLONER_LAB_H
#define CLONER_LAB_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum ClStatus {
  CL_STATUS_OK = 0,
  CL_STATUS_NULL_POINTER = 1,
  CL_STATUS_INVALID_ARGUMENT = 2,
  CL_STATUS_PARSE_ERROR = 3,
  CL_STATUS_NOT_CONVERGED = 4,
  CL_STATUS_INVALID_CHOI = 5,
  CL_STATUS_INTERNAL = 6,
} ClStatus;

typedef enum ClAncilla {
  CL_ANCILLA_PURE_ZERO = 0,
  CL_ANCILLA_MAXIMALLY_MIXED = 1,
} ClAncilla;

typedef struct ClChoi ClChoi;

typedef struct ClEnsemble ClEnsemble;

typedef struct ClSolution ClSolution;

typedef struct ClMetricsRow {
  double f_c;
  double f_p;
  double c;
  double h_clone;
  double h_out;
} ClMetricsRow;

typedef struct ClCertifyReport {
  /**
   * 1 when certified, 0 otherwise.
   */
  int32_t certified;
  double achieved;
  double optimum;
  double gap;
  double tp_residual;
  double min_eigenvalue;
} ClCertifyReport;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread, or NULL. Valid until the
 * next failing call on the same thread.
 */
const char *cl_last_error_message(void);

/**
 * # Safety
 * `s` must come from a `cl_*_to_json` call and not be freed already.
 */
void cl_string_free(char *s);

/**
 * # Safety
 * `json` must be a NUL-terminated string; `out` must be writable.
 */
enum ClStatus cl_ensemble_from_json(const char *json, struct ClEnsemble **out);

/**
 * # Safety
 * `ens` must be NULL or a handle from `cl_ensemble_from_json`.
 */
void cl_ensemble_free(struct ClEnsemble *ens);

/**
 * Solves the design program. On non-convergence `*out` still receives the best iterate.
 *
 * # Safety
 * `ens` must be a live ensemble handle; `out` must be writable.
 */
enum ClStatus cl_design(const struct ClEnsemble *ens, double tol, struct ClSolution **out);

/**
 * # Safety
 * `sol` must be a live solution handle.
 */
double cl_solution_f_star(const struct ClSolution *sol);

/**
 * # Safety
 * `sol` must be a live solution handle.
 */
double cl_solution_gap(const struct ClSolution *sol);

/**
 * # Safety
 * `sol` must be a live solution handle.
 */
size_t cl_solution_iterations(const struct ClSolution *sol);

/**
 * Copies the optimal Choi matrix into a new handle.
 *
 * # Safety
 * `sol` must be a live solution handle; `out` must be writable.
 */
enum ClStatus cl_solution_choi(const struct ClSolution *sol, struct ClChoi **out);

/**
 * Solution JSON; release with `cl_string_free`.
 *
 * # Safety
 * `sol` must be a live solution handle; `out` must be writable.
 */
enum ClStatus cl_solution_to_json(const struct ClSolution *sol, char **out);

/**
 * # Safety
 * `sol` must be NULL or a handle from `cl_design`.
 */
void cl_solution_free(struct ClSolution *sol);

/**
 * # Safety
 * `name` must be a NUL-terminated string; `out` must be writable.
 */
enum ClStatus cl_choi_load_fixture(const char *name, struct ClChoi **out);

/**
 * # Safety
 * `json` must be a NUL-terminated string; `out` must be writable.
 */
enum ClStatus cl_choi_from_json(const char *json, struct ClChoi **out);

/**
 * # Safety
 * `choi` must be a live handle; `out` must be writable.
 */
enum ClStatus cl_choi_to_json(const struct ClChoi *choi, char **out);

/**
 * # Safety
 * `choi` must be NULL or a live handle.
 */
void cl_choi_free(struct ClChoi *choi);

/**
 * Metrics of the channel fed with `|ψ(θ, φ)> ⊗ ancilla`.
 *
 * # Safety
 * `choi` must be a live handle; `out` must be writable.
 */
enum ClStatus cl_choi_metrics(const struct ClChoi *choi,
                              enum ClAncilla ancilla,
                              double theta,
                              double phi,
                              struct ClMetricsRow *out);

/**
 * # Safety
 * `out` must be writable.
 */
enum ClStatus cl_ucqc_metrics(double theta, double phi, struct ClMetricsRow *out);

/**
 * Checks that `choi` is a valid channel and optimal for `ens`. A failed
 * certification is reported through `out->certified`, not the status.
 *
 * # Safety
 * `choi` and `ens` must be live handles; `out` must be writable.
 */
enum ClStatus cl_certify(const struct ClChoi *choi,
                         const struct ClEnsemble *ens,
                         struct ClCertifyReport *out);

/**
 * Certifies one of the built-in reference channels against its own design target.
 *
 * # Safety
 * `name` must be a NUL-terminated string; `out` must be writable.
 */
enum ClStatus cl_certify_fixture(const char *name, struct ClCertifyReport *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* CLONER_LAB_H */
