#ifndef GREENJSP_H
#define GREENJSP_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stddef.h>
#include <stdint.h>

/**
 * Number of features written by `gj_features`.
 */
#define GJ_N_FEATURES 17

typedef enum GjClock {
  GJ_CLOCK_WALL = 0,
  GJ_CLOCK_WORK = 1,
} GjClock;

typedef enum GjSolveStatus {
  GJ_SOLVE_STATUS_OPTIMAL = 0,
  GJ_SOLVE_STATUS_SATISFIED = 1,
  GJ_SOLVE_STATUS_UNRESOLVED = 2,
} GjSolveStatus;

typedef enum GjSolver {
  GJ_SOLVER_BNB = 0,
  GJ_SOLVER_GLS = 1,
  GJ_SOLVER_SA = 2,
} GjSolver;

typedef enum GjStatus {
  GJ_STATUS_OK = 0,
  GJ_STATUS_NULL_POINTER = 1,
  GJ_STATUS_INVALID_UTF8 = 2,
  GJ_STATUS_IO = 3,
  GJ_STATUS_PARSE = 4,
  GJ_STATUS_INVALID_INSTANCE = 5,
  GJ_STATUS_DIMENSION_MISMATCH = 6,
  GJ_STATUS_BUFFER_TOO_SMALL = 7,
  GJ_STATUS_INVALID_ARGUMENT = 8,
  GJ_STATUS_PANIC = 9,
} GjStatus;

/**
 * Opaque instance handle.
 */
typedef struct GjInstance GjInstance;

/**
 * Opaque trained-model handle.
 */
typedef struct GjModel GjModel;

/**
 * Result of one solver run. Objective fields are meaningful only when
 * `has_solution` is non-zero.
 */
typedef struct GjOutcome {
  enum GjSolver solver;
  enum GjSolveStatus status;
  uint8_t has_solution;
  int64_t makespan;
  int64_t energy;
  int64_t tardiness;
  double scalarized;
  uint64_t solve_time_ms;
  uint64_t budget_ms;
} GjOutcome;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread; empty after a success.
 * The pointer stays valid until the next call on the same thread.
 */
const char *gj_last_error_message(void);

/**
 * Parses an instance document. The instance is validated.
 *
 * # Safety
 * `json` must be a NUL-terminated string; `out` must be writable.
 */
enum GjStatus gj_instance_from_json(const char *json, struct GjInstance **out);

/**
 * Reads an instance file.
 *
 * # Safety
 * `path` must be a NUL-terminated string; `out` must be writable.
 */
enum GjStatus gj_instance_read(const char *path, struct GjInstance **out);

/**
 * Releases an instance. Null is ignored.
 *
 * # Safety
 * `inst` must come from this library and not be used afterwards.
 */
void gj_instance_free(struct GjInstance *inst);

/**
 * # Safety
 * `inst` must be a live handle; the output pointers must be writable.
 */
enum GjStatus gj_instance_dims(const struct GjInstance *inst,
                               size_t *n_jobs,
                               size_t *n_machines,
                               size_t *n_speeds);

/**
 * Allocated time budget in milliseconds.
 *
 * # Safety
 * `inst` must be a live handle; `out_ms` must be writable.
 */
enum GjStatus gj_budget_ms(const struct GjInstance *inst, uint64_t *out_ms);

/**
 * Writes the `GJ_N_FEATURES` features into `out`.
 *
 * # Safety
 * `inst` must be a live handle; `out` must hold `len` doubles.
 */
enum GjStatus gj_features(const struct GjInstance *inst, double *out, size_t len);

/**
 * Runs one solver under a budget of `budget_ms`.
 *
 * # Safety
 * `inst` must be a live handle; `out` must be writable.
 */
enum GjStatus gj_solve(const struct GjInstance *inst,
                       enum GjSolver solver,
                       uint64_t budget_ms,
                       enum GjClock clock,
                       uint64_t seed,
                       struct GjOutcome *out);

/**
 * Reads a trained model file.
 *
 * # Safety
 * `path` must be a NUL-terminated string; `out` must be writable.
 */
enum GjStatus gj_model_read(const char *path, struct GjModel **out);

/**
 * Parses a trained model document.
 *
 * # Safety
 * `json` must be a NUL-terminated string; `out` must be writable.
 */
enum GjStatus gj_model_from_json(const char *json, struct GjModel **out);

/**
 * Releases a model. Null is ignored.
 *
 * # Safety
 * `model` must come from this library and not be used afterwards.
 */
void gj_model_free(struct GjModel *model);

/**
 * Predicts the solver for a raw feature vector of length `len`.
 *
 * # Safety
 * `model` must be a live handle; `features` must hold `len` doubles;
 * `out` must be writable.
 */
enum GjStatus gj_model_predict(const struct GjModel *model,
                               const double *features,
                               size_t len,
                               enum GjSolver *out);

/**
 * Extracts the instance features and predicts a solver.
 *
 * # Safety
 * Both handles must be live; `out` must be writable.
 */
enum GjStatus gj_select(const struct GjModel *model,
                        const struct GjInstance *inst,
                        enum GjSolver *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* GREENJSP_H */
