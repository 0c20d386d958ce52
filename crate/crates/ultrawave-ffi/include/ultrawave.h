#ifndef ULTRAWAVE_H
#define ULTRAWAVE_H

/* Generated by cbindgen from ultrawave-ffi; do not edit by hand. */

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

// Status code of every fallible call.
typedef enum {
  // Success.
  UW_STATUS_OK = 0,
  // A required pointer argument was null.
  UW_STATUS_NULL_ARGUMENT = 1,
  // A string argument was not valid UTF-8.
  UW_STATUS_INVALID_UTF8 = 2,
  // The operation rejected its input; see `uw_last_error_message`.
  UW_STATUS_INVALID_ARGUMENT = 3,
  // An output buffer was too small; the reported length is required.
  UW_STATUS_BUFFER_TOO_SMALL = 4,
  // An internal panic was caught at the boundary.
  UW_STATUS_PANIC = 5,
} UwStatus;

// Opaque kernel handle; retains the tree it was built on.
typedef struct UwKernel UwKernel;

// Opaque tree handle.
typedef struct UwTree UwTree;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Library version as a static C string.
const char *uw_version(void);

// Copy the last error message of this thread into `buf`; returns the number
// of bytes required including the NUL terminator. Call with a null `buf` to
// query the length first.
uintptr_t uw_last_error_message(char *buf, uintptr_t cap);

// Build a tree from the spec JSON accepted by the CLI, e.g.
// `{"homogeneous":{"p":2,"depth":3},"top_measure":"3/2"}`.
UwStatus uw_tree_from_spec_json(const char *spec_json, UwTree **out_tree);

// Release a tree handle. Null is ignored.
void uw_tree_free(UwTree *tree);

// Number of leaves `N`; 0 for a null handle.
uint64_t uw_tree_leaf_count(const UwTree *tree);

uint64_t uw_tree_vertex_count(const UwTree *tree);

uint64_t uw_tree_internal_count(const UwTree *tree);

uint32_t uw_tree_depth(const UwTree *tree);

// Number of wavelet coefficients, `N - 1`.
uint64_t uw_tree_coefficient_count(const UwTree *tree);

// Address string of the `leaf_index`-th leaf in lexicographic order.
UwStatus uw_tree_leaf_address(const UwTree *tree,
                              uint64_t leaf_index,
                              char *buf,
                              uintptr_t cap,
                              uintptr_t *written);

// Address string of the `index`-th internal vertex in canonical order (the
// vertex order of spectrum arrays).
UwStatus uw_tree_internal_address(const UwTree *tree,
                                  uint64_t index,
                                  char *buf,
                                  uintptr_t cap,
                                  uintptr_t *written);

// Vertex address and frequency of coefficient slot `slot`.
UwStatus uw_tree_coefficient_address(const UwTree *tree,
                                     uint64_t slot,
                                     char *buf,
                                     uintptr_t cap,
                                     uintptr_t *written,
                                     uint32_t *frequency);

// Fill `out` (length `len == leaf count`) with the leaf ball measures.
UwStatus uw_tree_leaf_measures(const UwTree *tree, double *out, uintptr_t len);

// Ultrametric distance between the points addressed by `x` and `y`
// (as a double; the library computes it exactly in rationals).
UwStatus uw_tree_distance(const UwTree *tree, const char *x, const char *y, double *out);

// Measure of the ball at `vertex` (as a double).
UwStatus uw_tree_ball_measure(const UwTree *tree, const char *vertex, double *out);

// Fill `out` (length `len == leaf count`) with the change-of-variable images
// of the leaves, in leaf order.
UwStatus uw_tree_rho_values(const UwTree *tree, double *out, uintptr_t len);

// Forward wavelet transform. `in_re`/`in_im` hold `n == leaf count` values
// in leaf order; `coeff_re`/`coeff_im` receive `coeff_len == n - 1` values
// in canonical order; the mean coefficient lands in `mean_re`/`mean_im`.
UwStatus uw_forward(const UwTree *tree,
                    const double *in_re,
                    const double *in_im,
                    uintptr_t n,
                    double *coeff_re,
                    double *coeff_im,
                    uintptr_t coeff_len,
                    double *mean_re,
                    double *mean_im);

// Inverse wavelet transform from a full canonical coefficient vector plus
// the mean coefficient.
UwStatus uw_inverse(const UwTree *tree,
                    const double *coeff_re,
                    const double *coeff_im,
                    uintptr_t coeff_len,
                    double mean_re,
                    double mean_im,
                    double *out_re,
                    double *out_im,
                    uintptr_t n);

// Constant kernel `T = c` (c must be nonnegative).
UwStatus uw_kernel_constant(const UwTree *tree, double c, UwKernel **out_kernel);

// Power-law kernel `T(I) = μ(D_I)^{-(1+alpha)}`.
UwStatus uw_kernel_power_law(const UwTree *tree, double alpha, UwKernel **out_kernel);

// Release a kernel handle. Null is ignored.
void uw_kernel_free(UwKernel *kernel);

// Apply the operator by direct `O(N²)` quadrature.
UwStatus uw_kernel_apply_dense(const UwKernel *kernel,
                               const double *in_re,
                               const double *in_im,
                               double *out_re,
                               double *out_im,
                               uintptr_t n);

// Apply the operator spectrally through the wavelet transform.
UwStatus uw_kernel_apply_spectral(const UwKernel *kernel,
                                  const double *in_re,
                                  const double *in_im,
                                  double *out_re,
                                  double *out_im,
                                  uintptr_t n);

// Fill `out` (length `len == internal vertex count`) with the eigenvalues
// λ_I in canonical vertex order (see [`uw_tree_internal_address`]).
UwStatus uw_kernel_spectrum(const UwKernel *kernel, double *out, uintptr_t len);

// Eigenvalue at `vertex` by the ancestor-sum formula.
UwStatus uw_kernel_eigenvalue_series(const UwKernel *kernel, const char *vertex, double *out);

// Eigenvalue at `vertex` by the integral formula; agrees with the series
// form up to roundoff.
UwStatus uw_kernel_eigenvalue_integral(const UwKernel *kernel, const char *vertex, double *out);

// Evaluate the wavelet at (`vertex`, `j`) on the point addressed by `x`.
UwStatus uw_wavelet_evaluate(const UwTree *tree,
                             const char *vertex,
                             uint32_t j,
                             const char *x,
                             double *out_re,
                             double *out_im);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* ULTRAWAVE_H */
