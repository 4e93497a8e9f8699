#ifndef TSSR_H
#define TSSR_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result codes.
 */
typedef enum TssrStatus {
  TSSR_STATUS_OK = 0,
  TSSR_STATUS_NULL_POINTER = 1,
  TSSR_STATUS_SHAPE_ERROR = 2,
  TSSR_STATUS_VALUE_ERROR = 3,
  TSSR_STATUS_ARGUMENT_ERROR = 4,
  TSSR_STATUS_UNSUPPORTED = 5,
  TSSR_STATUS_NUMERIC_OVERFLOW = 6,
  TSSR_STATUS_MISSING_DATA = 7,
  TSSR_STATUS_PARSE_ERROR = 8,
  TSSR_STATUS_IO_ERROR = 9,
  TSSR_STATUS_UTF8_ERROR = 10,
} TssrStatus;

/**
 * Stability verdict.
 */
typedef enum TssrStability {
  TSSR_STABILITY_STABLE = 0,
  TSSR_STABILITY_MARGINAL = 1,
  TSSR_STABILITY_UNSTABLE = 2,
} TssrStability;

/**
 * Opaque handle to a linear system file: system, initial state and input.
 */
typedef struct TssrModel TssrModel;

/**
 * Opaque multirate system handle.
 */
typedef struct TssrMultirate TssrMultirate;

/**
 * Opaque tensor handle.
 */
typedef struct TssrTensor TssrTensor;

/**
 * Opaque trajectory handle.
 */
typedef struct TssrTrajectory TssrTrajectory;

/**
 * Analysis results. Ranks are -1 when the system lacks `B` (controllability)
 * or `C` (observability); `max_real_part` is NaN for discrete systems.
 */
typedef struct TssrReport {
  uintptr_t state_dim;
  double spectral_radius;
  double max_real_part;
  enum TssrStability stability;
  int64_t controllability_rank;
  int64_t observability_rank;
} TssrReport;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failure on this thread, or NULL. The pointer stays
 * valid until the next failing call on the same thread.
 */
const char *tssr_last_error_message(void);

/**
 * Releases a string returned by this library.
 */
void tssr_string_free(char *s);

/**
 * Creates a tensor from `order` mode sizes and `len` row-major values.
 */
enum TssrStatus tssr_tensor_new(const uintptr_t *shape,
                                uintptr_t order,
                                const double *data,
                                uintptr_t len,
                                struct TssrTensor **out);

void tssr_tensor_free(struct TssrTensor *t);

/**
 * Order of a tensor, 0 for NULL.
 */
uintptr_t tssr_tensor_order(const struct TssrTensor *t);

/**
 * Number of entries, 0 for NULL.
 */
uintptr_t tssr_tensor_len(const struct TssrTensor *t);

/**
 * Copies the mode sizes into `out`, which must hold `tssr_tensor_order` entries.
 */
enum TssrStatus tssr_tensor_shape(const struct TssrTensor *t, uintptr_t *out, uintptr_t capacity);

/**
 * Copies the row-major data into `out`, which must hold `tssr_tensor_len` entries.
 */
enum TssrStatus tssr_tensor_data(const struct TssrTensor *t, double *out, uintptr_t capacity);

enum TssrStatus tssr_outer_product(const struct TssrTensor *a,
                                   const struct TssrTensor *b,
                                   struct TssrTensor **out);

enum TssrStatus tssr_contract_pair(const struct TssrTensor *t,
                                   uintptr_t axis_a,
                                   uintptr_t axis_b,
                                   struct TssrTensor **out);

enum TssrStatus tssr_contract_last(const struct TssrTensor *a,
                                   const struct TssrTensor *x,
                                   struct TssrTensor **out);

enum TssrStatus tssr_unfold(const struct TssrTensor *t,
                            uintptr_t row_modes,
                            struct TssrTensor **out);

/**
 * Parses a linear system from JSON text in the system file format.
 */
enum TssrStatus tssr_model_from_json(const char *json, struct TssrModel **out);

/**
 * Serializes a model back to JSON. Free the result with `tssr_string_free`.
 */
char *tssr_model_to_json(const struct TssrModel *model);

void tssr_model_free(struct TssrModel *model);

/**
 * Product of the state mode sizes.
 */
uintptr_t tssr_model_state_dim(const struct TssrModel *model);

enum TssrStatus tssr_model_simulate_discrete(const struct TssrModel *model,
                                             uintptr_t steps,
                                             struct TssrTrajectory **out);

/**
 * Continuous simulation. `h <= 0` selects the default `t_end/1000`;
 * `exact` non-zero selects the matrix exponential path, zero selects RK4.
 */
enum TssrStatus tssr_model_simulate_continuous(const struct TssrModel *model,
                                               double t_end,
                                               double h,
                                               int32_t exact,
                                               struct TssrTrajectory **out);

void tssr_trajectory_free(struct TssrTrajectory *t);

/**
 * Number of samples, 0 for NULL.
 */
uintptr_t tssr_trajectory_len(const struct TssrTrajectory *t);

/**
 * Time stamp (step index for discrete systems) of sample `i`.
 */
enum TssrStatus tssr_trajectory_time(const struct TssrTrajectory *t, uintptr_t i, double *out);

/**
 * Copies the state of sample `i` out as a new tensor handle.
 */
enum TssrStatus tssr_trajectory_state(const struct TssrTrajectory *t,
                                      uintptr_t i,
                                      struct TssrTensor **out);

/**
 * Copies the output of sample `i` out as a new tensor handle.
 */
enum TssrStatus tssr_trajectory_output(const struct TssrTrajectory *t,
                                       uintptr_t i,
                                       struct TssrTensor **out);

/**
 * Trajectory in the CLI's CSV format. Free with `tssr_string_free`.
 */
char *tssr_trajectory_to_csv(const struct TssrTrajectory *t, int32_t emit_output);

/**
 * Analyzes a time-invariant model. `rank_tolerance` and `stability_margin`
 * values <= 0 select the defaults (1e-12 and 1e-9).
 */
enum TssrStatus tssr_model_analyze(const struct TssrModel *model,
                                   double rank_tolerance,
                                   double stability_margin,
                                   struct TssrReport *out);

/**
 * Writes `lcm(clocks)` to `period` and `period / clocks[i]` to `factors[i]`.
 */
enum TssrStatus tssr_global_clock(const uint64_t *clocks,
                                  uintptr_t len,
                                  uint64_t *period,
                                  uint64_t *factors);

/**
 * Parses a multirate system from JSON text in the system file format.
 */
enum TssrStatus tssr_multirate_from_json(const char *json, struct TssrMultirate **out);

void tssr_multirate_free(struct TssrMultirate *m);

/**
 * `x_process(n)`.
 */
enum TssrStatus tssr_multirate_eval(const struct TssrMultirate *m,
                                    uintptr_t process,
                                    int64_t n,
                                    double *out);

/**
 * Fills `out` (row-major, `(horizon + 1) × processes`) with the states at
 * global ticks `k·d`, `k = 0..=horizon`.
 */
enum TssrStatus tssr_multirate_grid(const struct TssrMultirate *m,
                                    uint64_t horizon,
                                    double *out,
                                    uintptr_t capacity);

/**
 * Number of coupled processes, 0 for NULL.
 */
uintptr_t tssr_multirate_processes(const struct TssrMultirate *m);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* TSSR_H */
