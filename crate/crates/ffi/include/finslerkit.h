#ifndef FINSLERKIT_H
#define FINSLERKIT_H

/* Generated by cbindgen. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum FkStatus {
  FK_STATUS_OK = 0,
  FK_STATUS_NULL_POINTER = 1,
  FK_STATUS_INVALID_INPUT = 2,
  FK_STATUS_DEGENERATE = 3,
  FK_STATUS_INDETERMINATE = 4,
  FK_STATUS_PANIC = 5,
} FkStatus;

/**
 * Opaque base vector field.
 */
typedef struct FkField FkField;

/**
 * Opaque Finsler structure.
 */
typedef struct FkStructure FkStructure;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread, or null. Valid until the
 * next failing call on the same thread.
 */
const char *fk_last_error(void);

/**
 * # Safety
 * `s` must come from a finslerkit call returning a string, or be null.
 */
void fk_string_free(char *s);

/**
 * Creates a structure from `builtin:<name>?k=v,...` or `expr:<F>`.
 *
 * # Safety
 * `spec` must be a NUL-terminated string and `out` writable.
 */
enum FkStatus fk_structure_new(const char *spec, uintptr_t dim, struct FkStructure **out);

/**
 * # Safety
 * `s` must come from [`fk_structure_new`] or be null.
 */
void fk_structure_free(struct FkStructure *s);

/**
 * # Safety
 * `s` must be a live handle, `out` writable.
 */
enum FkStatus fk_structure_dim(const struct FkStructure *s, uintptr_t *out);

/**
 * Energy `E = F²/2` at `(x, y)`.
 *
 * # Safety
 * `x` and `y` must hold `dim` values and `out` be writable.
 */
enum FkStatus fk_energy(const struct FkStructure *s, const double *x, const double *y, double *out);

/**
 * Spray coefficients `G` (`dim` values) and connection coefficients `N`
 * (`dim * dim` values, row-major). `nonlinear` may be null.
 *
 * # Safety
 * Buffers must have the stated lengths.
 */
enum FkStatus fk_spray(const struct FkStructure *s,
                       const double *x,
                       const double *y,
                       double *spray,
                       double *nonlinear);

/**
 * Density of the Dazord volume in coordinates `(x, y)`.
 *
 * # Safety
 * `x` and `y` must hold `dim` values and `out` be writable.
 */
enum FkStatus fk_volume_density(const struct FkStructure *s,
                                const double *x,
                                const double *y,
                                double *out);

/**
 * Creates a base vector field from `builtin:<name>?k=v,...` or
 * `expr:[X1, ..., Xn]`.
 *
 * # Safety
 * `spec` must be a NUL-terminated string and `out` writable.
 */
enum FkStatus fk_field_new(const char *spec, uintptr_t dim, struct FkField **out);

/**
 * # Safety
 * `f` must come from [`fk_field_new`] or be null.
 */
void fk_field_free(struct FkField *f);

/**
 * Classification report as JSON, with the default sample plan and
 * tolerances. Release `out_json` with [`fk_string_free`].
 *
 * # Safety
 * Handles must be live and `out_json` writable.
 */
enum FkStatus fk_classify_json(const struct FkStructure *s,
                               const struct FkField *f,
                               uint64_t seed,
                               char **out_json);

/**
 * Identity battery report as JSON. Release `out_json` with
 * [`fk_string_free`].
 *
 * # Safety
 * `s` must be live and `out_json` writable.
 */
enum FkStatus fk_identities_json(const struct FkStructure *s, uint64_t seed, char **out_json);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* FINSLERKIT_H */
