#ifndef KERRLINE_H
#define KERRLINE_H

/* Generated by cbindgen from the kerrline-ffi crate; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result of every fallible call.
 */
typedef enum {
  KlOk = 0,
  /**
   * A required pointer argument was null.
   */
  KlNullArgument = 1,
  /**
   * Parameters outside the model's domain.
   */
  KlInvalidArgument = 2,
  /**
   * The spectrum solver or eigensolver failed to converge.
   */
  KlSolverFailure = 3,
  /**
   * The retained mode set fails the truncation gate.
   */
  KlNotConverged = 4,
  /**
   * Mode index past the end of the set.
   */
  KlOutOfRange = 5,
  /**
   * An internal panic was caught; the handle stays valid.
   */
  KlPanic = 6,
} KlStatus;

/**
 * Opaque device handle.
 */
typedef struct KlDevice KlDevice;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Build a device from the circuit parameters and solve its lowest `n_modes`
 * modes. On success `*out` owns the handle; free it with `kl_device_free`.
 *
 * # Safety
 * `out` must be a valid pointer to writable storage for one pointer.
 */
KlStatus kl_device_new(double l,
                       double c,
                       double length,
                       double c_j,
                       double i_c,
                       double c_c,
                       size_t n_modes,
                       KlDevice **out);

/**
 * Release a handle returned by `kl_device_new`. A null pointer is a no-op.
 *
 * # Safety
 * `dev` must be null or a pointer returned by `kl_device_new` that has not
 * been freed yet.
 */
void kl_device_free(KlDevice *dev);

/**
 * Number of solved modes.
 *
 * # Safety
 * `dev` must be a live handle; `out` must be writable.
 */
KlStatus kl_mode_count(const KlDevice *dev, size_t *out);

/**
 * Eigenfrequency of mode `index` (0-based), rad/s.
 *
 * # Safety
 * `dev` must be a live handle; `out` must be writable.
 */
KlStatus kl_mode_frequency(const KlDevice *dev, size_t index, double *out);

/**
 * Relative residual of the spectrum equation at mode `index`.
 *
 * # Safety
 * `dev` must be a live handle; `out` must be writable.
 */
KlStatus kl_mode_residual(const KlDevice *dev, size_t index, double *out);

/**
 * Zero-point junction phase amplitude of mode `index` (signed).
 *
 * # Safety
 * `dev` must be a live handle; `out` must be writable.
 */
KlStatus kl_mode_lambda(const KlDevice *dev, size_t index, double *out);

/**
 * Effective capacitance of mode `index`, farads.
 *
 * # Safety
 * `dev` must be a live handle; `out` must be writable.
 */
KlStatus kl_mode_eta(const KlDevice *dev, size_t index, double *out);

/**
 * Kerr parameters of the fundamental: frequency pull, self-Kerr and product
 * factor, each optional (pass null to skip). Fails with `KlNotConverged` when
 * the retained modes miss too much junction phase weight.
 *
 * # Safety
 * `dev` must be a live handle; non-null outputs must be writable.
 */
KlStatus kl_kerr(const KlDevice *dev,
                 double *out_shift,
                 double *out_self_kerr,
                 double *out_product_factor);

/**
 * RMS junction current with `n_photons` (0..=2) in the fundamental, amps.
 *
 * # Safety
 * `dev` must be a live handle; `out` must be writable.
 */
KlStatus kl_junction_current_variance(const KlDevice *dev, size_t n_photons, double *out);

/**
 * Library version as a static NUL-terminated string.
 */
const char *kl_version(void);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* KERRLINE_H */
