#ifndef GHZ_ENTANGLE_H
#define GHZ_ENTANGLE_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

#define GHZ_PHASE_PAPER 0

#define GHZ_PHASE_PLUS 1

#define GHZ_FORMAT_TABLE 0

#define GHZ_FORMAT_CSV 1

#define GHZ_FORMAT_JSON 2

#define GHZ_VERDICT_SEPARABLE 0

#define GHZ_VERDICT_NONSEPARABLE 1

#define GHZ_VERDICT_UNDECIDED 2

typedef enum GhzStatus {
  GHZ_STATUS_OK = 0,
  GHZ_STATUS_NULL_POINTER = 1,
  GHZ_STATUS_INVALID_ARGUMENT = 2,
  GHZ_STATUS_CAP_EXCEEDED = 3,
  GHZ_STATUS_DIMENSION_MISMATCH = 4,
  GHZ_STATUS_NUMERICAL = 5,
  GHZ_STATUS_IO = 6,
  GHZ_STATUS_PANIC = 7,
} GhzStatus;

/*
 Opaque density matrix.
 */
typedef struct GhzDensityMatrix GhzDensityMatrix;

/*
 Closed-form measures for one `(n, epsilon)` point. Entanglement values are
 in units of the requested logarithm base.
 */
typedef struct GhzMeasureReport {
  size_t n;
  double epsilon;
  double x;
  double lambda;
  double fidelity;
  double threshold;
  /*
   One of the `GHZ_VERDICT_*` constants.
   */
  int32_t verdict;
  double e_ls;
  double e_eq10;
  /*
   Zero when `n` is odd, in which case `e_bipartite_avg` is meaningless.
   */
  int32_t has_bipartite_avg;
  double e_bipartite_avg;
  double e_teleport;
  double e_opnorm;
  double log_base;
} GhzMeasureReport;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/*
 Message of the last failed call on this thread, or null. The pointer stays
 valid until the next failing call on the same thread.
 */
const char *ghz_last_error(void);

/*
 Dense `n`-qubit pseudo-pure GHZ state with purity `epsilon`.

 # Safety
 `out` must be null or valid for writes.
 */
enum GhzStatus ghz_density_pseudo_pure(size_t n,
                                       double epsilon,
                                       uint32_t phase,
                                       struct GhzDensityMatrix **out);

/*
 Two-qubit Werner state with singlet weight `x`.

 # Safety
 `out` must be null or valid for writes.
 */
enum GhzStatus ghz_density_werner(double x, struct GhzDensityMatrix **out);

/*
 Releases a handle. Null is ignored.

 # Safety
 `m` must be null or a handle from this library not yet freed.
 */
void ghz_density_free(struct GhzDensityMatrix *m);

/*
 # Safety
 `m` must be a live handle; `out` must be valid for writes.
 */
enum GhzStatus ghz_density_dim(const struct GhzDensityMatrix *m, size_t *out);

/*
 Entry `(row, col)` as real and imaginary parts.

 # Safety
 `m` must be a live handle; `re` and `im` must be valid for writes.
 */
enum GhzStatus ghz_density_entry(const struct GhzDensityMatrix *m,
                                 size_t row,
                                 size_t col,
                                 double *re,
                                 double *im);

/*
 `<GHZ| rho |GHZ>` with the GHZ state on as many qubits as `m` has.

 # Safety
 `m` must be a live handle; `out` must be valid for writes.
 */
enum GhzStatus ghz_density_fidelity_with_ghz(const struct GhzDensityMatrix *m,
                                             uint32_t phase,
                                             double *out);

/*
 Smallest eigenvalue of the partial transpose over the qubits in
 `part_a[0..len]`.

 # Safety
 `m` must be a live handle, `part_a` valid for `len` reads, `out` valid for writes.
 */
enum GhzStatus ghz_density_ppt_min_eigenvalue(const struct GhzDensityMatrix *m,
                                              const size_t *part_a,
                                              size_t len,
                                              double *out);

/*
 Renormalized projection of `m` onto the four-vector singlet-form subspace.
 The result is a 4x4 handle.

 # Safety
 `m` must be a live handle; `out` must be valid for writes.
 */
enum GhzStatus ghz_density_project_singlet_form(const struct GhzDensityMatrix *m,
                                                uint32_t phase,
                                                struct GhzDensityMatrix **out);

/*
 Von Neumann entropy in logarithm base `base`.

 # Safety
 `m` must be a live handle; `out` must be valid for writes.
 */
enum GhzStatus ghz_density_entropy(const struct GhzDensityMatrix *m, double base, double *out);

/*
 Purity above which the `n`-qubit pseudo-pure state is nonseparable.
 Returns NaN for `n < 2`.
 */
double ghz_purity_threshold(size_t n);

/*
 Werner weight of the projected `n`-qubit pseudo-pure state.

 # Safety
 `out` must be valid for writes.
 */
enum GhzStatus ghz_x_of(size_t n, double epsilon, double *out);

/*
 # Safety
 `out` must be valid for writes.
 */
enum GhzStatus ghz_measure_report(size_t n,
                                  double epsilon,
                                  double base,
                                  struct GhzMeasureReport *out);

/*
 Renders the sweep `n_min..=n_max` by `eps_start:eps_stop:eps_step` in the
 given `GHZ_FORMAT_*`. A zero `eps_step` selects the single point
 `eps_start`. Release `*out` with [`ghz_string_free`].

 # Safety
 `out` must be valid for writes.
 */
enum GhzStatus ghz_report_string(size_t n_min,
                                 size_t n_max,
                                 double eps_start,
                                 double eps_stop,
                                 double eps_step,
                                 double base,
                                 uint32_t format,
                                 char **out);

/*
 Runs the four-ion reproduction check. Writes 1 or 0 to `all_passed` and,
 when `text` is not null, the rendered table (release with
 [`ghz_string_free`]).

 # Safety
 `all_passed` must be valid for writes; `text` must be null or valid for writes.
 */
enum GhzStatus ghz_reproduce_paper(double base, int32_t *all_passed, char **text);

/*
 Releases a string returned by this library. Null is ignored.

 # Safety
 `s` must be null or a string from this library not yet freed.
 */
void ghz_string_free(char *s);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* GHZ_ENTANGLE_H */
