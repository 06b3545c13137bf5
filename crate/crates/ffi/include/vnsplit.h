#ifndef VNSPLIT_H
#define VNSPLIT_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum VnStatus {
  VN_STATUS_OK = 0,
  VN_STATUS_NULL_POINTER = 1,
  VN_STATUS_INVALID_ARGUMENT = 2,
  VN_STATUS_DIMENSION_MISMATCH = 3,
  VN_STATUS_NOT_ISOMETRY = 4,
  VN_STATUS_PRECONDITION_FAILED = 5,
  VN_STATUS_INVALID_CHANNEL = 6,
  VN_STATUS_UNKNOWN_FIXTURE = 7,
  VN_STATUS_NUMERICAL = 8,
  VN_STATUS_PANIC = 9,
} VnStatus;

typedef enum VnSide {
  VN_SIDE_LEFT = 0,
  VN_SIDE_RIGHT = 1,
} VnSide;

typedef struct VnAlgebra VnAlgebra;

typedef struct VnChannel VnChannel;

typedef struct VnMatrix VnMatrix;

typedef struct VnSplit VnSplit;

/**
 * Tolerances and seed; pass NULL wherever accepted for the defaults.
 */
typedef struct VnSettings {
  double absolute;
  double relative_rank;
  uint64_t seed;
} VnSettings;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failure on this thread, or NULL. Valid until the
 * next failing call on the same thread.
 */
const char *vn_last_error_message(void);

struct VnSettings vn_settings_default(void);

/**
 * Matrix from `2 * rows * cols` interleaved doubles.
 *
 * # Safety
 * `data` must point to `2 * rows * cols` readable doubles.
 */
enum VnStatus vn_matrix_new(size_t rows, size_t cols, const double *data, struct VnMatrix **out);

/**
 * # Safety
 * `m` must be a live handle or NULL.
 */
size_t vn_matrix_rows(const struct VnMatrix *m);

/**
 * # Safety
 * `m` must be a live handle or NULL.
 */
size_t vn_matrix_cols(const struct VnMatrix *m);

/**
 * Copies the entries into `out`, which holds `len` doubles.
 *
 * # Safety
 * `out` must point to `len` writable doubles.
 */
enum VnStatus vn_matrix_copy_data(const struct VnMatrix *m, double *out, size_t len);

/**
 * # Safety
 * `m` must be a handle from this library, freed at most once, or NULL.
 */
void vn_matrix_free(struct VnMatrix *m);

/**
 * Smallest unital *-algebra containing the generators.
 *
 * # Safety
 * `generators` must point to `n` live matrix handles.
 */
enum VnStatus vn_algebra_generate(const struct VnMatrix *const *generators,
                                  size_t n,
                                  size_t dim,
                                  const struct VnSettings *s,
                                  struct VnAlgebra **out);

/**
 * # Safety
 * `a` must be a live handle or NULL.
 */
size_t vn_algebra_dim(const struct VnAlgebra *a);

/**
 * # Safety
 * `a` must be a live handle or NULL.
 */
size_t vn_algebra_dim_space(const struct VnAlgebra *a);

/**
 * # Safety
 * Handles must be live; `out` must be writable.
 */
enum VnStatus vn_algebra_commutant(const struct VnAlgebra *a,
                                   const struct VnSettings *s,
                                   struct VnAlgebra **out);

/**
 * # Safety
 * Handles must be live; `out` must be writable.
 */
enum VnStatus vn_algebra_center(const struct VnAlgebra *a,
                                const struct VnSettings *s,
                                struct VnAlgebra **out);

/**
 * Block shape of the Artin-Wedderburn decomposition. Writes up to
 * `capacity` pairs into `d_left`/`d_right` and the block count into
 * `count`; fails with `DimensionMismatch` if `capacity` is too small.
 *
 * # Safety
 * `d_left` and `d_right` must hold `capacity` writable entries.
 */
enum VnStatus vn_algebra_aw_blocks(const struct VnAlgebra *a,
                                   const struct VnSettings *s,
                                   size_t *d_left,
                                   size_t *d_right,
                                   size_t capacity,
                                   size_t *count);

/**
 * # Safety
 * `a` must be a handle from this library, freed at most once, or NULL.
 */
void vn_algebra_free(struct VnAlgebra *a);

/**
 * Validated splitting map `C^{cols(v)} → C^{d_left} ⊗ C^{d_right}`.
 *
 * # Safety
 * Handles must be live; `out` must be writable.
 */
enum VnStatus vn_split_new(const struct VnMatrix *v,
                           size_t d_left,
                           size_t d_right,
                           const struct VnSettings *s,
                           struct VnSplit **out);

/**
 * Named splitting-map fixture, e.g. "chi-oplus".
 *
 * # Safety
 * `name` must be a NUL-terminated string.
 */
enum VnStatus vn_split_fixture(const char *name, struct VnSplit **out);

/**
 * # Safety
 * Handles must be live; `out` must be writable.
 */
enum VnStatus vn_split_isometry(const struct VnSplit *chi, struct VnMatrix **out);

/**
 * # Safety
 * Handles must be live; `out` must be writable.
 */
enum VnStatus vn_split_is_balanced(const struct VnSplit *chi,
                                   const struct VnSettings *s,
                                   bool *out);

/**
 * # Safety
 * Handles must be live; `out` must be writable.
 */
enum VnStatus vn_split_is_lean(const struct VnSplit *chi, const struct VnSettings *s, bool *out);

/**
 * Strictly local algebra on one leg.
 *
 * # Safety
 * Handles must be live; `out` must be writable.
 */
enum VnStatus vn_split_stloc(const struct VnSplit *chi,
                             enum VnSide leg,
                             const struct VnSettings *s,
                             struct VnAlgebra **out);

/**
 * Canonical splitting map of an algebra.
 *
 * # Safety
 * Handles must be live; `out` must be writable.
 */
enum VnStatus vn_split_canonical(const struct VnAlgebra *a,
                                 const struct VnSettings *s,
                                 struct VnSplit **out);

/**
 * # Safety
 * `chi` must be a handle from this library, freed at most once, or NULL.
 */
void vn_split_free(struct VnSplit *chi);

/**
 * Validated channel from `n` Kraus operators of shape `d_out × d_in`.
 *
 * # Safety
 * `kraus` must point to `n` live matrix handles.
 */
enum VnStatus vn_channel_new(const struct VnMatrix *const *kraus,
                             size_t n,
                             size_t d_in,
                             size_t d_out,
                             const struct VnSettings *s,
                             struct VnChannel **out);

/**
 * # Safety
 * Handles must be live; `out` must be writable.
 */
enum VnStatus vn_channel_apply(const struct VnChannel *e,
                               const struct VnMatrix *rho,
                               struct VnMatrix **out);

/**
 * Schroedinger semi-causality from the commutant side `chi_a` to `chi_b`.
 *
 * # Safety
 * Handles must be live; `out` must be writable.
 */
enum VnStatus vn_channel_semicausal(const struct VnChannel *e,
                                    const struct VnSplit *chi_a,
                                    const struct VnSplit *chi_b,
                                    const struct VnSettings *s,
                                    bool *out);

/**
 * Builds a semi-localisation and reports whether it verifies.
 *
 * # Safety
 * Handles must be live; `out` must be writable.
 */
enum VnStatus vn_channel_semilocalise(const struct VnChannel *e,
                                      const struct VnSplit *chi_a,
                                      const struct VnSplit *chi_b,
                                      const struct VnSettings *s,
                                      bool *verified);

/**
 * # Safety
 * `e` must be a handle from this library, freed at most once, or NULL.
 */
void vn_channel_free(struct VnChannel *e);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* VNSPLIT_H */
