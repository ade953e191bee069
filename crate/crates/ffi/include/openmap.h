#ifndef OPENMAP_H
#define OPENMAP_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum OmStatus {
  OM_STATUS_OK = 0,
  OM_STATUS_NULL_POINTER = 1,
  OM_STATUS_INVALID_ARGUMENT = 2,
  OM_STATUS_NUMERICAL = 3,
  OM_STATUS_UNSUPPORTED = 4,
  OM_STATUS_OUT_OF_RANGE = 5,
  OM_STATUS_PANIC = 6,
} OmStatus;

/**
 * Which qubit of a two-qubit state is measured by [`om_discord`].
 */
typedef enum OmMeasured {
  OM_MEASURED_SYSTEM = 0,
  OM_MEASURED_ENVIRONMENT = 1,
} OmMeasured;

/**
 * Per-sample results of running a scenario.
 */
typedef struct OmResult OmResult;

/**
 * A validated scenario.
 */
typedef struct OmScenario OmScenario;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Error message from the most recent call on this thread, empty after a
 * success. The pointer stays valid until the next call on the same thread.
 */
const char *om_last_error_message(void);

/**
 * Library version as a static NUL-terminated string.
 */
const char *om_version(void);

/**
 * Parses a JSON scenario, in the same format the CLI accepts.
 *
 * # Safety
 * `json` must be a NUL-terminated string and `out` a valid pointer.
 */
enum OmStatus om_scenario_from_json(const char *json, struct OmScenario **out);

/**
 * Looks up a named preset.
 *
 * # Safety
 * `name` must be a NUL-terminated string and `out` a valid pointer.
 */
enum OmStatus om_scenario_preset(const char *name, struct OmScenario **out);

/**
 * Replaces the time grid with `steps` points on `[start, end]`.
 *
 * # Safety
 * `scenario` must come from one of the constructors and not be freed.
 */
enum OmStatus om_scenario_set_grid(struct OmScenario *scenario,
                                   double start,
                                   double end,
                                   size_t steps);

/**
 * # Safety
 * `scenario` must be null or a handle that has not been freed.
 */
void om_scenario_free(struct OmScenario *scenario);

/**
 * Evolves the scenario and extracts the map at every grid time.
 *
 * # Safety
 * `scenario` must be a live handle and `out` a valid pointer.
 */
enum OmStatus om_scenario_run(const struct OmScenario *scenario, struct OmResult **out);

/**
 * # Safety
 * `result` must be null or a handle that has not been freed.
 */
void om_result_free(struct OmResult *result);

/**
 * Number of grid samples.
 *
 * # Safety
 * `result` must be a live handle and `len` a valid pointer.
 */
enum OmStatus om_result_len(const struct OmResult *result, size_t *len);

/**
 * Time of sample `index`.
 *
 * # Safety
 * `result` must be a live handle and `t` a valid pointer.
 */
enum OmStatus om_result_time(const struct OmResult *result, size_t index, double *t);

/**
 * Bloch vector `(x, y, z)` of the impurity at sample `index`.
 *
 * # Safety
 * `result` must be a live handle and `xyz` must point to 3 doubles.
 */
enum OmStatus om_result_bloch(const struct OmResult *result, size_t index, double *xyz);

/**
 * Map eigenvalues at sample `index`, in descending order. Returns
 * `Unsupported` when the initial state is outside the templated family.
 *
 * # Safety
 * `result` must be a live handle and `values` must point to 4 doubles.
 */
enum OmStatus om_result_map_eigenvalues(const struct OmResult *result,
                                        size_t index,
                                        double *values);

/**
 * Correlation `g2` at sample `index`.
 *
 * # Safety
 * `result` must be a live handle and `g2` a valid pointer.
 */
enum OmStatus om_result_g2(const struct OmResult *result, size_t index, double *g2);

/**
 * Closed-form spectrum of the tilted template, as `[lo1, hi1, lo2, hi2]`.
 *
 * # Safety
 * `values` must point to 4 doubles.
 */
enum OmStatus om_closed_form_eigs(double a1, double b1, double b2, double b3, double *values);

/**
 * Quantum discord in bits of a two-qubit density matrix given as 16
 * row-major real and imaginary parts.
 *
 * # Safety
 * `re` and `im` must each point to 16 doubles and `value` must be valid.
 */
enum OmStatus om_discord(const double *re,
                         const double *im,
                         enum OmMeasured measured,
                         double *value);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* OPENMAP_H */
