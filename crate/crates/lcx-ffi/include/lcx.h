#ifndef LCX_H
#define LCX_H

/* Generated by cbindgen from the lcx-ffi crate; do not edit by hand. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

// Status codes returned by every fallible call.
typedef enum LcxStatus {
  LCX_STATUS_OK = 0,
  LCX_STATUS_INTERNAL = 1,
  LCX_STATUS_USAGE = 2,
  LCX_STATUS_DOMAIN = 3,
  LCX_STATUS_PRECONDITION = 4,
  LCX_STATUS_NULL_POINTER = 5,
} LcxStatus;

// Opaque sampled-function handle.
typedef struct LcxFunction LcxFunction;

// Opaque grid handle.
typedef struct LcxGrid LcxGrid;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message for the most recent error on this thread, or NULL. The pointer
// stays valid until the next failing call on the same thread.
const char *lcx_last_error_message(void);

// Frees a string returned by a `*_json` call.
//
// # Safety
// `s` must have been returned by this library and not freed already.
void lcx_string_free(char *s);

// Creates a 1-D uniform grid. `norm` is 1, 2 or 0 (0 means the max norm).
//
// # Safety
// `out` must be a valid pointer.
enum LcxStatus lcx_grid_new_1d(double lower,
                               double upper,
                               size_t nodes,
                               int norm,
                               struct LcxGrid **out);

// Creates a 2-D uniform grid.
//
// # Safety
// `out` must be a valid pointer.
enum LcxStatus lcx_grid_new_2d(double lower_x,
                               double lower_y,
                               double upper_x,
                               double upper_y,
                               size_t nodes_x,
                               size_t nodes_y,
                               int norm,
                               struct LcxGrid **out);

// # Safety
// `grid` must be a handle from `lcx_grid_new_*`, not freed twice.
void lcx_grid_free(struct LcxGrid *grid);

// Number of nodes of the grid.
//
// # Safety
// `grid` must be a valid handle.
size_t lcx_grid_node_count(const struct LcxGrid *grid);

// Samples a gallery function (by id) on a grid.
//
// # Safety
// `id` must be a NUL-terminated string; `grid` and `out` valid pointers.
enum LcxStatus lcx_gallery_sample(const char *id,
                                  const struct LcxGrid *grid,
                                  struct LcxFunction **out);

// Builds a sampled function from raw values (row-major, one per node).
// IEEE +inf encodes +infinity; -inf and NaN are rejected.
//
// # Safety
// `values` must point to `len` readable doubles; `grid`, `out` valid.
enum LcxStatus lcx_function_from_values(const struct LcxGrid *grid,
                                        const double *values,
                                        size_t len,
                                        struct LcxFunction **out);

// # Safety
// `f` must be a handle from this library, not freed twice.
void lcx_function_free(struct LcxFunction *f);

// Copies the node values into a caller buffer of length >= node count.
//
// # Safety
// `out` must point to at least node-count writable doubles.
enum LcxStatus lcx_function_values(const struct LcxFunction *f, double *out, size_t len);

// Serializes the function to its JSON wire format. Free with
// `lcx_string_free`.
//
// # Safety
// `f` and `out` must be valid pointers.
enum LcxStatus lcx_function_json(const struct LcxFunction *f, char **out);

// Greatest k-Lipschitz minorant (lower envelope) as a new function.
//
// # Safety
// `f` and `out` must be valid pointers.
enum LcxStatus lcx_lower_envelope(const struct LcxFunction *f, double k, struct LcxFunction **out);

// Least k-Lipschitz majorant (upper envelope) as a new function.
//
// # Safety
// `f` and `out` must be valid pointers.
enum LcxStatus lcx_upper_envelope(const struct LcxFunction *f, double k, struct LcxFunction **out);

// Grid Lipschitz modulus.
//
// # Safety
// `f` and `out` must be valid pointers.
enum LcxStatus lcx_lipschitz_modulus(const struct LcxFunction *f, double *out);

// Calmness modulus at a node (+inf when f takes -inf somewhere).
//
// # Safety
// `f` and `out` must be valid pointers.
enum LcxStatus lcx_calmness_modulus(const struct LcxFunction *f, size_t node, double *out);

// Checks the cone candidate with the given slope at a node:
// writes 1/0 into `passes` and the worst slack into `worst_slack`.
//
// # Safety
// All pointers must be valid.
enum LcxStatus lcx_check_cone_subgradient(const struct LcxFunction *f,
                                          size_t node,
                                          double slope,
                                          double tol,
                                          int *passes,
                                          double *worst_slack);

// Maximal-lifting LP from a seed (values buffer, one per node).
// `pin` is a node index or SIZE_MAX for the unpinned variant. On success
// writes the optimizer into `out_values` (length >= node count), the
// objective gap over the seed into `gap`, and 1 into `seed_was_maximal`
// when the seed could not be improved.
//
// # Safety
// Buffers must match the grid's node count.
enum LcxStatus lcx_maximal_minorant(const struct LcxFunction *f,
                                    const double *seed_values,
                                    size_t seed_len,
                                    double lipschitz_budget,
                                    size_t pin,
                                    double *out_values,
                                    size_t out_len,
                                    double *gap,
                                    int *seed_was_maximal);

// Ekeland refinement from a minorant given as a values buffer. Writes the
// support point index into `x_delta` and the supporting minorant values
// into `support_out`.
//
// # Safety
// Buffers must match the grid's node count.
enum LcxStatus lcx_ekeland_refine(const struct LcxFunction *f,
                                  const double *minorant_values,
                                  size_t minorant_len,
                                  double minorant_lipschitz,
                                  size_t x_bar,
                                  double epsilon,
                                  double delta,
                                  size_t *x_delta,
                                  double *support_out,
                                  size_t support_len);

// Global-minimum certificate at a node: writes 1/0 into `holds`.
//
// # Safety
// `f` and `holds` must be valid pointers.
enum LcxStatus lcx_global_min_holds(const struct LcxFunction *f, size_t node, int *holds);

// Runs the subdifferentiability oracle for a gallery function and returns
// the certificate as JSON. Free with `lcx_string_free`.
//
// # Safety
// `id` must be NUL-terminated; `grid`, `x_bar_coords` (length = grid dim)
// and `out` must be valid.
enum LcxStatus lcx_calmness_oracle_json(const char *id,
                                        const struct LcxGrid *grid,
                                        const double *x_bar_coords,
                                        size_t levels,
                                        double k_cap,
                                        char **out);

#ifdef __cplusplus
} // extern "C"
#endif // __cplusplus

#endif /* LCX_H */
