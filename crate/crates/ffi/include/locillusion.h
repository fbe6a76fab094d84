#ifndef LOCILLUSION_H
#define LOCILLUSION_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum LiStatus {
  LI_STATUS_OK = 0,
  LI_STATUS_NULL_POINTER = 1,
  LI_STATUS_INVALID_UTF8 = 2,
  LI_STATUS_INVALID_SCENARIO = 3,
  LI_STATUS_SOLVER_FAILURE = 4,
  LI_STATUS_IO = 5,
  LI_STATUS_OUT_OF_RANGE = 6,
  /**
   * The readings have no consistent position.
   */
  LI_STATUS_IMPLAUSIBLE = 7,
} LiStatus;

typedef enum LiProducerMode {
  LI_PRODUCER_MODE_LQR = 0,
  LI_PRODUCER_MODE_MPC = 1,
} LiProducerMode;

typedef enum LiTermination {
  LI_TERMINATION_GOAL_REACHED = 0,
  LI_TERMINATION_IMPLAUSIBLE_I_STATE = 1,
  LI_TERMINATION_MAX_STAGES = 2,
} LiTermination;

/**
 * Opaque scenario handle.
 */
typedef struct LiScenario LiScenario;

/**
 * Opaque trajectory handle.
 */
typedef struct LiTrajectory LiTrajectory;

/**
 * One logged stage. `iota` and `e` are meaningful only when `plausible`.
 */
typedef struct LiStageRecord {
  size_t stage;
  double omega_r[2];
  double iota[2];
  double e[2];
  double u_r[2];
  double u_p[2];
  double intensities[3];
  double observation[3];
  bool plausible;
  bool illusion;
} LiStageRecord;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the most recent failure on this thread, or NULL. The pointer
 * stays valid until the next failing call on the same thread.
 */
const char *li_last_error_message(void);

/**
 * The built-in two-experiment scenario (LQR producer).
 */
struct LiScenario *li_scenario_default(void);

/**
 * Parses a scenario from JSON text. Validation happens in [`li_run`] and
 * [`li_scenario_validate`].
 *
 * # Safety
 * `json` must be a NUL-terminated string and `out` a valid pointer.
 */
enum LiStatus li_scenario_from_json(const char *json, struct LiScenario **out);

/**
 * JSON form of a scenario; release with [`li_string_free`]. NULL on a null
 * handle.
 *
 * # Safety
 * `scenario` must be a live handle or NULL.
 */
char *li_scenario_to_json(const struct LiScenario *scenario);

/**
 * Switches the producer mode; an implicit receiver variant follows it.
 *
 * # Safety
 * `scenario` must be a live handle or NULL.
 */
enum LiStatus li_scenario_set_mode(struct LiScenario *scenario, enum LiProducerMode mode);

/**
 * # Safety
 * `scenario` must be a live handle or NULL.
 */
enum LiStatus li_scenario_validate(const struct LiScenario *scenario);

/**
 * # Safety
 * `scenario` must come from this library and not be used afterwards.
 */
void li_scenario_free(struct LiScenario *scenario);

/**
 * # Safety
 * `s` must come from this library and not be used afterwards.
 */
void li_string_free(char *s);

/**
 * LQR producer gain, row-major 2×4 into `out_gain`, and the Riccati
 * residual into `out_residual` (may be NULL).
 *
 * # Safety
 * `out_gain` must point to 8 writable doubles.
 */
enum LiStatus li_lqr_gain(const struct LiScenario *scenario,
                          double *out_gain,
                          double *out_residual);

/**
 * Validates and runs a scenario. On success `*out` receives a trajectory
 * handle, also when the run ends with an implausible estimate (check
 * [`li_trajectory_termination`]).
 *
 * # Safety
 * `scenario` must be a live handle and `out` a valid pointer.
 */
enum LiStatus li_run(const struct LiScenario *scenario, struct LiTrajectory **out);

/**
 * Number of logged stages; 0 for NULL.
 *
 * # Safety
 * `traj` must be a live handle or NULL.
 */
size_t li_trajectory_len(const struct LiTrajectory *traj);

/**
 * Stage at which the run stopped; 0 for NULL.
 *
 * # Safety
 * `traj` must be a live handle or NULL.
 */
size_t li_trajectory_terminated_at(const struct LiTrajectory *traj);

/**
 * # Safety
 * `traj` must be a live handle and `out` a valid pointer.
 */
enum LiStatus li_trajectory_termination(const struct LiTrajectory *traj, enum LiTermination *out);

/**
 * Copies the stage at zero-based `index` into `out`.
 *
 * # Safety
 * `traj` must be a live handle and `out` a valid pointer.
 */
enum LiStatus li_trajectory_stage(const struct LiTrajectory *traj,
                                  size_t index,
                                  struct LiStageRecord *out);

/**
 * Writes the trajectory CSV to `path`.
 *
 * # Safety
 * `traj` must be a live handle and `path` a NUL-terminated string.
 */
enum LiStatus li_trajectory_write_csv(const struct LiTrajectory *traj, const char *path);

/**
 * # Safety
 * `traj` must come from this library and not be used afterwards.
 */
void li_trajectory_free(struct LiTrajectory *traj);

/**
 * Position consistent with three readings. `tower_positions` holds
 * x1,y1,x2,y2,x3,y3. Returns `Implausible` when no position matches.
 *
 * # Safety
 * Pointers must reference 6, 3, 3 and 2 doubles respectively.
 */
enum LiStatus li_trilaterate(const double *tower_positions,
                             const double *calibration,
                             const double *readings,
                             double *out_position);

/**
 * Source intensities that make a receiver at `true_position` perceive
 * itself at `target`.
 *
 * # Safety
 * Pointers must reference 6, 3, 2, 2 and 3 doubles respectively.
 */
enum LiStatus li_synthesize_intensities(const double *tower_positions,
                                        const double *calibration,
                                        const double *true_position,
                                        const double *target,
                                        double *out_intensities);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* LOCILLUSION_H */
