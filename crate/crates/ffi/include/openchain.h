#ifndef OPENCHAIN_H
#define OPENCHAIN_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result code of every fallible call.
 */
typedef enum OcStatus {
  OC_STATUS_OK = 0,
  OC_STATUS_NULL_POINTER = 1,
  OC_STATUS_INVALID_ARGUMENT = 2,
  OC_STATUS_COMPUTATION_FAILED = 3,
  OC_STATUS_BUFFER_TOO_SMALL = 4,
  OC_STATUS_PANIC = 5,
} OcStatus;

/**
 * Which max-term argument a threshold temperature is the root of.
 */
typedef enum OcRootTerm {
  OC_ROOT_TERM_SWAP = 0,
  OC_ROOT_TERM_SQUARED_MOMENT = 1,
  OC_ROOT_TERM_SINGLET = 2,
} OcRootTerm;

typedef enum OcSpin {
  OC_SPIN_HALF = 1,
  OC_SPIN_ONE = 2,
} OcSpin;

/**
 * Opaque handle to a diagonalized chain.
 */
typedef struct OcChain OcChain;

/**
 * Two-site expectation values `<S_i.S_j>`, `<(S_i.S_j)^2>` and `<P_ij>`.
 */
typedef struct OcBondExpectations {
  double heisenberg;
  double heisenberg_sq;
  double swap;
  /**
   * Concurrence for spin 1/2, negativity for spin 1.
   */
  double entanglement;
} OcBondExpectations;

typedef struct OcThreshold {
  /**
   * Midpoint of the final bracket.
   */
  double temperature;
  double bracket_lo;
  double bracket_hi;
  size_t iterations;
  enum OcRootTerm term;
} OcThreshold;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Builds and diagonalizes an open chain. `spin` is an [`OcSpin`] value. On
 * success `*out` owns a new handle that must be released with
 * [`oc_chain_free`].
 *
 * # Safety
 * `out` must be valid for a pointer write.
 */
enum OcStatus oc_chain_new(uint32_t spin, size_t length, double coupling, struct OcChain **out);

/**
 * Releases a handle. Null is ignored.
 *
 * # Safety
 * `chain` must be null or a handle from [`oc_chain_new`] not yet freed.
 */
void oc_chain_free(struct OcChain *chain);

/**
 * Number of distinct energy levels.
 *
 * # Safety
 * `chain` must be a live handle and `out` valid for a write.
 */
enum OcStatus oc_chain_level_count(const struct OcChain *chain, size_t *out);

/**
 * Energy and degeneracy of level `level`. Either output may be null.
 *
 * # Safety
 * `chain` must be a live handle; non-null outputs must be valid for writes.
 */
enum OcStatus oc_chain_level(const struct OcChain *chain,
                             size_t level,
                             double *energy,
                             size_t *degeneracy);

/**
 * Bond expectations in the equal mixture over level `level`.
 *
 * # Safety
 * `chain` must be a live handle and `out` valid for a write.
 */
enum OcStatus oc_chain_bond_expectations(const struct OcChain *chain,
                                         size_t level,
                                         size_t i,
                                         size_t j,
                                         struct OcBondExpectations *out);

/**
 * Nearest-neighbour entanglement profile of level `level`: `L - 1` values,
 * bond `(k, k+1)` at index `k - 1`. `*written` always receives the required
 * length; if `capacity` is smaller nothing is copied and
 * `OC_STATUS_BUFFER_TOO_SMALL` is returned. `values` may be null when
 * `capacity` is 0.
 *
 * # Safety
 * `chain` must be a live handle, `values` valid for `capacity` writes and
 * `written` valid for a write.
 */
enum OcStatus oc_chain_profile(const struct OcChain *chain,
                               size_t level,
                               double *values,
                               size_t capacity,
                               size_t *written);

/**
 * Thermal concurrence (spin 1/2) or negativity (spin 1) of pair `(i, j)`.
 *
 * # Safety
 * `chain` must be a live handle and `out` valid for a write.
 */
enum OcStatus oc_chain_thermal_measure(const struct OcChain *chain,
                                       size_t i,
                                       size_t j,
                                       double temperature,
                                       double *out);

/**
 * Temperature above which pair `(i, j)` is no longer entangled, bisected to
 * bracket width `tol`.
 *
 * # Safety
 * `chain` must be a live handle and `out` valid for a write.
 */
enum OcStatus oc_chain_threshold(const struct OcChain *chain,
                                 size_t i,
                                 size_t j,
                                 double tol,
                                 struct OcThreshold *out);

/**
 * Copies the calling thread's last error message into `buf` as a
 * nul-terminated string, truncating to fit. Returns the full message length
 * in bytes excluding the terminator, or 0 if there is none. `buf` may be null
 * when `capacity` is 0.
 *
 * # Safety
 * `buf` must be valid for `capacity` writes.
 */
size_t oc_last_error_message(char *buf, size_t capacity);

/**
 * Library version as a static nul-terminated string.
 */
const char *oc_version(void);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* OPENCHAIN_H */
