#ifndef NILFLOW_H
#define NILFLOW_H

#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>

typedef enum NilflowStatus {
  NILFLOW_STATUS_OK = 0,
  NILFLOW_STATUS_NULL_POINTER = 1,
  NILFLOW_STATUS_INVALID_ARGUMENT = 2,
  NILFLOW_STATUS_DIMENSION_MISMATCH = 3,
  NILFLOW_STATUS_NOT_LIE = 4,
  NILFLOW_STATUS_NOT_CLOSED = 5,
  NILFLOW_STATUS_NOT_NILPOTENT = 6,
  NILFLOW_STATUS_SINGULAR = 7,
  NILFLOW_STATUS_NOT_POSITIVE_DEFINITE = 8,
  // Blowup, structure drift or an exhausted step budget.
  NILFLOW_STATUS_NUMERICAL = 9,
  NILFLOW_STATUS_IO = 10,
  NILFLOW_STATUS_PARSE = 11,
  // An internal panic was caught at the boundary.
  NILFLOW_STATUS_PANIC = 12,
} NilflowStatus;

// Choice of φ for bracket flows.
typedef enum NilflowPhi {
  NILFLOW_PHI_RIC = 0,
  NILFLOW_PHI_RIC_MINUS_QUARTER_H2 = 1,
} NilflowPhi;

// Lie bracket with optional metric, 3-form and 1-form.
typedef struct NilflowProblem NilflowProblem;

// Time samples and packed states of a flow.
typedef struct NilflowTrajectory NilflowTrajectory;

// Integrator controls; start from [`nilflow_controls_default`].
typedef struct NilflowControls {
  double rtol;
  double atol;
  // First trial step; 0 selects the default.
  double h_init;
  double h_max;
  // Constant step; 0 selects adaptive control.
  double fixed_step;
  size_t max_steps;
  double magnitude_limit;
  double step_floor;
} NilflowControls;

typedef struct NilflowCheck {
  size_t dim;
  double jacobi_residual;
  double closedness_residual;
  // Nilpotency step, or -1 if the bracket is not nilpotent (or not Lie).
  int32_t nilpotency_step;
  bool is_lie;
  bool is_closed;
} NilflowCheck;

typedef struct NilflowSoliton {
  double lambda;
  double sym_residual;
  double skew_residual;
  double residual_norm;
  bool is_soliton;
} NilflowSoliton;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message of the last failed call on this thread, or null after a success.
// The pointer stays valid until the next call into this library.
const char *nilflow_last_error(void);

struct NilflowControls nilflow_controls_default(void);

// Loads a built-in fixture (such as `heisenberg3+H(1)`) or a JSON problem file.
//
// # Safety
// `spec` must be a nul-terminated string and `out` a valid pointer.
enum NilflowStatus nilflow_problem_load(const char *spec, struct NilflowProblem **out);

// Creates a problem from a dense `dim³` bracket tensor, with the identity
// metric and no forms.
//
// # Safety
// `tensor` must point to `dim³` values and `out` must be valid.
enum NilflowStatus nilflow_problem_from_bracket(size_t dim,
                                                const double *tensor,
                                                struct NilflowProblem **out);

// Sets the metric from a row-major `dim × dim` array.
//
// # Safety
// `p` must be a live handle and `g` must point to `dim²` values.
enum NilflowStatus nilflow_problem_set_metric(struct NilflowProblem *p, const double *g);

// Sets the 3-form from `len = C(dim, 3)` packed coefficients.
//
// # Safety
// `p` must be a live handle and `coeffs` must point to `len` values.
enum NilflowStatus nilflow_problem_set_h(struct NilflowProblem *p,
                                         const double *coeffs,
                                         size_t len);

// Sets the 1-form from `len = dim` coefficients.
//
// # Safety
// `p` must be a live handle and `coeffs` must point to `len` values.
enum NilflowStatus nilflow_problem_set_theta(struct NilflowProblem *p,
                                             const double *coeffs,
                                             size_t len);

// Dimension of the problem, or 0 for a null handle.
//
// # Safety
// `p` must be null or a live handle.
size_t nilflow_problem_dim(const struct NilflowProblem *p);

// # Safety
// `p` must be null or a handle not yet freed.
void nilflow_problem_free(struct NilflowProblem *p);

// Jacobi, nilpotency and closedness report.
//
// # Safety
// `p` must be a live handle and `out` valid.
enum NilflowStatus nilflow_check(const struct NilflowProblem *p, struct NilflowCheck *out);

// Ricci tensor of the metric, written row-major to `out` (`dim²` values).
//
// # Safety
// `p` must be a live handle and `out` must hold `dim²` values.
enum NilflowStatus nilflow_ricci(const struct NilflowProblem *p, double *out);

// Generalized Ricci tensor `Rc⁺`, written row-major to `out`.
//
// # Safety
// `p` must be a live handle and `out` must hold `dim²` values.
enum NilflowStatus nilflow_generalized_ricci(const struct NilflowProblem *p,
                                             int32_t orientation_sign,
                                             double *out);

// Least-squares soliton fit. `d_out` (`dim²`, row-major) and `omega_out`
// (`C(dim, 2)` packed) may be null.
//
// # Safety
// `p` must be a live handle; non-null output pointers must be large enough.
enum NilflowStatus nilflow_soliton_fit(const struct NilflowProblem *p,
                                       int32_t orientation_sign,
                                       struct NilflowSoliton *out,
                                       double *d_out,
                                       double *omega_out);

// Integrates the generalized bracket flow of `(mu, H)`. `controls` may be
// null for defaults.
//
// # Safety
// `p` must be a live handle, `controls` null or valid, `out` valid.
enum NilflowStatus nilflow_bracket_flow(const struct NilflowProblem *p,
                                        enum NilflowPhi phi,
                                        double t_start,
                                        double t_end,
                                        const struct NilflowControls *controls_in,
                                        struct NilflowTrajectory **out);

// Integrates the gauge-fixed generalized Ricci flow of `(g, H)`.
//
// # Safety
// `p` must be a live handle, `controls` null or valid, `out` valid.
enum NilflowStatus nilflow_ricci_flow(const struct NilflowProblem *p,
                                      int32_t orientation_sign,
                                      double t_start,
                                      double t_end,
                                      const struct NilflowControls *controls_in,
                                      struct NilflowTrajectory **out);

// End of the maximal generalized Ricci flow solution from `t = 0` in
// `direction` (+1 or -1), searched up to `|t| = horizon`. On success
// `found` tells whether a blowup occurred and `time` holds its time.
//
// # Safety
// `p` must be a live handle, `controls` null or valid, outputs valid.
enum NilflowStatus nilflow_blowup_time(const struct NilflowProblem *p,
                                       int32_t orientation_sign,
                                       int32_t direction,
                                       double horizon,
                                       const struct NilflowControls *controls_in,
                                       bool *found,
                                       double *time);

// Number of stored time samples, or 0 for a null handle.
//
// # Safety
// `t` must be null or a live handle.
size_t nilflow_trajectory_len(const struct NilflowTrajectory *t);

// Number of state columns, or 0 for a null handle.
//
// # Safety
// `t` must be null or a live handle.
size_t nilflow_trajectory_width(const struct NilflowTrajectory *t);

// Label of state column `col`, or null when out of range. Owned by the handle.
//
// # Safety
// `t` must be null or a live handle.
const char *nilflow_trajectory_label(const struct NilflowTrajectory *t, size_t col);

// Copies the `len` sample times into `out`.
//
// # Safety
// `t` must be a live handle and `out` must hold `len` values.
enum NilflowStatus nilflow_trajectory_times(const struct NilflowTrajectory *t, double *out);

// Copies the states row by row (`len × width` values) into `out`.
//
// # Safety
// `t` must be a live handle and `out` must hold `len × width` values.
enum NilflowStatus nilflow_trajectory_states(const struct NilflowTrajectory *t, double *out);

// Writes the trajectory as CSV.
//
// # Safety
// `t` must be a live handle and `path` a nul-terminated string.
enum NilflowStatus nilflow_trajectory_write_csv(const struct NilflowTrajectory *t,
                                                const char *path);

// # Safety
// `t` must be null or a handle not yet freed.
void nilflow_trajectory_free(struct NilflowTrajectory *t);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* NILFLOW_H */
