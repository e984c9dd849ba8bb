#ifndef DEFECTCHAIN_H
#define DEFECTCHAIN_H

/* Generated by cbindgen from src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Boundary condition of the defect chain.
 */
typedef enum DcBoundary {
  /**
   * `*` on both outer edges.
   */
  DC_BOUNDARY_FIXED_STAR = 0,
  /**
   * Both alternation sectors.
   */
  DC_BOUNDARY_FREE = 1,
  /**
   * Free chain whose outer edges are `*`.
   */
  DC_BOUNDARY_FREE_STAR = 2,
  /**
   * Free chain whose outer edges are group labels.
   */
  DC_BOUNDARY_FREE_CATEGORY = 3,
} DcBoundary;

/**
 * Result of every fallible call.
 */
typedef enum DcStatus {
  DC_STATUS_OK = 0,
  DC_STATUS_NULL_POINTER = 1,
  DC_STATUS_INVALID_ARGUMENT = 2,
  DC_STATUS_UNSUPPORTED = 3,
  DC_STATUS_NUMERICAL = 4,
  DC_STATUS_INTERNAL = 5,
} DcStatus;

/**
 * Number of identity terms in the reference Ising Hamiltonian.
 */
typedef enum DcTfimConvention {
  /**
   * 2n-1 terms, spectrally equal to the defect chain with 2n+1 edges.
   */
  DC_TFIM_CONVENTION_MATCH_DEFECT_CHAIN = 0,
  /**
   * One term per site.
   */
  DC_TFIM_CONVENTION_PER_SITE = 1,
} DcTfimConvention;

/**
 * Fusion category.
 */
typedef struct DcCategory DcCategory;

/**
 * Sparse Hermitian chain Hamiltonian.
 */
typedef struct DcOperator DcOperator;

/**
 * Sorted eigenvalues.
 */
typedef struct DcSpectrum DcSpectrum;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the last failed call on this thread, or NULL. The pointer
 * stays valid until the next call into the library on the same thread.
 */
const char *dc_last_error_message(void);

/**
 * Library version as a static NUL-terminated string.
 */
const char *dc_version(void);

/**
 * Vec(Z/pZ) with trivial associator.
 *
 * # Safety
 * `out` must be a valid pointer to writable storage for one handle.
 */
enum DcStatus dc_category_vec_zp(size_t p, struct DcCategory **out);

/**
 * The Ising category with Frobenius–Schur sign `kappa` (±1).
 *
 * # Safety
 * `out` must be a valid pointer to writable storage for one handle.
 */
enum DcStatus dc_category_ising(int32_t kappa, struct DcCategory **out);

/**
 * Fusion data of Vec(Z/2Z) extended by the F1 defect, computed from the
 * tube algebra.
 *
 * # Safety
 * `out` must be a valid pointer to writable storage for one handle.
 */
enum DcStatus dc_category_derive(int32_t kappa, struct DcCategory **out);

/**
 * Parse a category from its JSON form.
 *
 * # Safety
 * `json` must be a NUL-terminated string; `out` must be writable.
 */
enum DcStatus dc_category_from_json(const char *json, struct DcCategory **out);

/**
 * # Safety
 * `cat` must be NULL or a handle from this library not yet freed.
 */
void dc_category_free(struct DcCategory *cat);

/**
 * # Safety
 * `cat` must be a live handle and `out` writable.
 */
enum DcStatus dc_category_n_labels(const struct DcCategory *cat, size_t *out);

/**
 * Number of violated pentagon equations (0 for consistent data).
 *
 * # Safety
 * `cat` must be a live handle and `out` writable.
 */
enum DcStatus dc_category_pentagon_violations(const struct DcCategory *cat, size_t *out);

/**
 * `F^{abc}_{d;e,f}` as a complex number; zero for inadmissible labels.
 * Labels are indices into the category's label list.
 *
 * # Safety
 * `cat` must be a live handle, `labels` must point to six readable
 * indices, and `re` and `im` must be writable.
 */
enum DcStatus dc_category_fsymbol(const struct DcCategory *cat,
                                  const size_t *labels,
                                  double *re,
                                  double *im);

/**
 * Whether two categories carry identical labels, fusion rules and
 * F-symbols (exact comparison).
 *
 * # Safety
 * Both handles must be live and `out` writable.
 */
enum DcStatus dc_category_same_data(const struct DcCategory *a,
                                    const struct DcCategory *b,
                                    bool *out);

/**
 * Defect-chain Hamiltonian on `n_edges` edges. `cat` must hold the Ising
 * labels, e.g. from [`dc_category_derive`].
 *
 * # Safety
 * `cat` must be a live handle; `out` writable.
 */
enum DcStatus dc_defect_chain_new(const struct DcCategory *cat,
                                  size_t n_edges,
                                  enum DcBoundary boundary,
                                  struct DcOperator **out);

/**
 * Open transverse-field Ising chain on `n_qubits` at the critical point.
 *
 * # Safety
 * `out` must be writable.
 */
enum DcStatus dc_tfim_new(size_t n_qubits,
                          enum DcTfimConvention convention,
                          struct DcOperator **out);

/**
 * # Safety
 * `op` must be NULL or a handle from this library not yet freed.
 */
void dc_operator_free(struct DcOperator *op);

/**
 * # Safety
 * `op` must be a live handle and `out` writable.
 */
enum DcStatus dc_operator_dim(const struct DcOperator *op, size_t *out);

/**
 * # Safety
 * `op` must be a live handle and `out` writable.
 */
enum DcStatus dc_operator_nnz(const struct DcOperator *op, size_t *out);

/**
 * Full spectrum by dense diagonalization of each connected block.
 *
 * # Safety
 * `op` must be a live handle and `out` writable.
 */
enum DcStatus dc_diagonalize_dense(const struct DcOperator *op, struct DcSpectrum **out);

/**
 * # Safety
 * `spec` must be NULL or a handle from this library not yet freed.
 */
void dc_spectrum_free(struct DcSpectrum *spec);

/**
 * # Safety
 * `spec` must be a live handle and `out` writable.
 */
enum DcStatus dc_spectrum_len(const struct DcSpectrum *spec, size_t *out);

/**
 * Copy the ascending eigenvalues into `buf`, which holds `len` doubles.
 * Fails unless `len` is at least the spectrum length.
 *
 * # Safety
 * `spec` must be a live handle and `buf` valid for `len` writes.
 */
enum DcStatus dc_spectrum_copy(const struct DcSpectrum *spec, double *buf, size_t len);

/**
 * Number of levels within the degeneracy tolerance of the lowest one.
 *
 * # Safety
 * `spec` must be a live handle and `out` writable.
 */
enum DcStatus dc_spectrum_ground_degeneracy(const struct DcSpectrum *spec, size_t *out);

/**
 * Ground energy of the open critical Ising chain on `n` sites (one
 * identity term per site), from its free-fermion solution.
 *
 * # Safety
 * `out` must be writable.
 */
enum DcStatus dc_free_fermion_energy(size_t n, double *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* DEFECTCHAIN_H */
