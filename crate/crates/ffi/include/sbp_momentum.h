#ifndef SBP_MOMENTUM_H
#define SBP_MOMENTUM_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum SbpmLabel {
  SBPM_LABEL_PHYSICAL = 0,
  SBPM_LABEL_UNPHYSICAL = 1,
  SBPM_LABEL_WALL = 2,
  SBPM_LABEL_UNPAIRED = 3,
} SbpmLabel;

typedef enum SbpmStatus {
  SBPM_STATUS_OK = 0,
  SBPM_STATUS_NULL_POINTER = 1,
  SBPM_STATUS_INVALID_ARGUMENT = 2,
  SBPM_STATUS_LENGTH_MISMATCH = 3,
  SBPM_STATUS_NO_CONVERGENCE = 4,
  SBPM_STATUS_UNSUPPORTED = 5,
  SBPM_STATUS_PANIC = 6,
} SbpmStatus;

/**
 * Momentum operator `-i hbar D` on a uniform grid.
 */
typedef struct SbpmOperator SbpmOperator;

/**
 * Solved particle-in-a-well spectrum.
 */
typedef struct SbpmWell SbpmWell;

typedef struct SbpmPowerLawFit {
  double exponent;
  double prefactor;
  double rms_log_residual;
} SbpmPowerLawFit;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread, or NULL. The pointer
 * stays valid until the next call into this library on the same thread.
 */
const char *sbpm_last_error_message(void);

/**
 * Creates the momentum operator on `n_points` points spanning `[a, b]`.
 *
 * # Safety
 * `out` must be a valid pointer to writable storage for one handle.
 */
enum SbpmStatus sbpm_operator_new(double a,
                                  double b,
                                  size_t n_points,
                                  double hbar,
                                  struct SbpmOperator **out);

/**
 * # Safety
 * `op` must be NULL or a handle from [`sbpm_operator_new`] not yet freed.
 */
void sbpm_operator_free(struct SbpmOperator *op);

/**
 * Number of grid points, or 0 for NULL.
 *
 * # Safety
 * `op` must be NULL or a live handle.
 */
size_t sbpm_operator_len(const struct SbpmOperator *op);

/**
 * `out = P psi`. `im` may be NULL for a real input.
 *
 * # Safety
 * `op` must be a live handle; every non-NULL array must hold `len` doubles.
 */
enum SbpmStatus sbpm_operator_apply(const struct SbpmOperator *op,
                                    const double *re,
                                    const double *im,
                                    size_t len,
                                    double *re_out,
                                    double *im_out);

/**
 * Real derivative `out = D u`.
 *
 * # Safety
 * `op` must be a live handle; `u` and `out` must hold `len` doubles.
 */
enum SbpmStatus sbpm_operator_derivative(const struct SbpmOperator *op,
                                         const double *u,
                                         size_t len,
                                         double *out);

/**
 * H-weighted inner product `<psi, chi>`, conjugate-linear in `psi`.
 *
 * # Safety
 * `op` must be a live handle; non-NULL arrays must hold `len` doubles and
 * `re_out`, `im_out` must be writable.
 */
enum SbpmStatus sbpm_operator_inner_product(const struct SbpmOperator *op,
                                            const double *psi_re,
                                            const double *psi_im,
                                            const double *chi_re,
                                            const double *chi_im,
                                            size_t len,
                                            double *re_out,
                                            double *im_out);

/**
 * Closed-form momentum eigenvalues, `len` equal to the grid size (even only).
 *
 * # Safety
 * `op` must be a live handle; `out` must hold `len` doubles.
 */
enum SbpmStatus sbpm_momentum_eigenvalues(const struct SbpmOperator *op, double *out, size_t len);

/**
 * Closed-form eigenvector for index `l` in `1..=N-2`, H-normalized.
 *
 * # Safety
 * `op` must be a live handle; `re_out`, `im_out` must hold `len` doubles and
 * `eigenvalue_out` must be writable.
 */
enum SbpmStatus sbpm_momentum_eigenvector(const struct SbpmOperator *op,
                                          size_t l,
                                          double *re_out,
                                          double *im_out,
                                          size_t len,
                                          double *eigenvalue_out);

/**
 * Solves the well Hamiltonian with walls of height `wall` at both ends.
 *
 * # Safety
 * `out` must be a valid pointer to writable storage for one handle.
 */
enum SbpmStatus sbpm_well_solve(double a,
                                double b,
                                size_t n_points,
                                double mass,
                                double hbar,
                                double wall,
                                struct SbpmWell **out);

/**
 * # Safety
 * `well` must be NULL or a handle from [`sbpm_well_solve`] not yet freed.
 */
void sbpm_well_free(struct SbpmWell *well);

/**
 * Number of states, or 0 for NULL.
 *
 * # Safety
 * `well` must be NULL or a live handle.
 */
size_t sbpm_well_len(const struct SbpmWell *well);

/**
 * Energies of all stored states in ascending solver order.
 *
 * # Safety
 * `well` must be a live handle; `out` must hold `len` doubles.
 */
enum SbpmStatus sbpm_well_energies(const struct SbpmWell *well, double *out, size_t len);

/**
 * Classification of each stored state.
 *
 * # Safety
 * `well` must be a live handle; `out` must hold `len` labels.
 */
enum SbpmStatus sbpm_well_labels(const struct SbpmWell *well, enum SbpmLabel *out, size_t len);

/**
 * Energy and H-normalized state of the `n`-th physical level (1-based).
 *
 * # Safety
 * `well` must be a live handle; `state_out` must hold `len` doubles and
 * `energy_out` must be writable.
 */
enum SbpmStatus sbpm_well_physical_level(const struct SbpmWell *well,
                                         size_t n,
                                         double *energy_out,
                                         double *state_out,
                                         size_t len);

/**
 * Continuum infinite-well energy of level `n` for a box of `length`.
 *
 * # Safety
 * `out` must be writable.
 */
enum SbpmStatus sbpm_continuum_energy(size_t n,
                                      double length,
                                      double mass,
                                      double hbar,
                                      double *out);

/**
 * Least-squares fit of `err = c dx^nu` in log-log space.
 *
 * # Safety
 * `dx` and `err` must hold `len` doubles; `out` must be writable.
 */
enum SbpmStatus sbpm_fit_power_law(const double *dx,
                                   const double *err,
                                   size_t len,
                                   struct SbpmPowerLawFit *out);

#ifdef __cplusplus
} // extern "C"
#endif // __cplusplus

#endif /* SBP_MOMENTUM_H */
