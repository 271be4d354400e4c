#ifndef CRIPS_H
#define CRIPS_H

#include <stddef.h>
#include <stdint.h>

// Result of a call across the C boundary.
typedef enum CripsStatus {
  CRIPS_STATUS_OK = 0,
  CRIPS_STATUS_NULL_POINTER = 1,
  CRIPS_STATUS_CONFIG = 2,
  CRIPS_STATUS_IO = 3,
  CRIPS_STATUS_ARGUMENT = 4,
  CRIPS_STATUS_PANIC = 5,
} CripsStatus;

// Accumulated `key = value` settings. Opaque to C.
typedef struct CripsConfig CripsConfig;

// A completed run. Opaque to C.
typedef struct CripsTrace CripsTrace;

// One iteration of a run as seen from C.
typedef struct CripsRecord {
  uint64_t iteration;
  double best_fitness;
  double metric;
  double omega;
  double alpha1;
  double alpha2;
} CripsRecord;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message describing the last failed call on this thread, or null if none.
// The pointer stays valid until the next failing call on the same thread.
const char *crips_last_error(void);

// Creates an empty configuration. Free it with [`crips_config_free`].
struct CripsConfig *crips_config_new(void);

// # Safety
// `config` must come from [`crips_config_new`] and not be used afterwards.
void crips_config_free(struct CripsConfig *config);

// Records one setting. Keys are checked when the configuration is used,
// except that unknown keys are rejected immediately.
//
// # Safety
// `config` must be a live handle; `key` and `value` NUL-terminated strings.
enum CripsStatus crips_config_set(struct CripsConfig *config, const char *key, const char *value);

// Validates the configuration without running anything.
//
// # Safety
// `config` must be a live handle.
enum CripsStatus crips_config_validate(const struct CripsConfig *config);

// Runs the first configured algorithm once, seeded with the `seed` setting,
// and stores the trace in `*out`. Free it with [`crips_trace_free`].
//
// # Safety
// `config` must be a live handle and `out` a valid pointer.
enum CripsStatus crips_run(const struct CripsConfig *config, struct CripsTrace **out);

// Runs the whole experiment and writes traces and `summary.json` to the
// configured output directory.
//
// # Safety
// `config` must be a live handle.
enum CripsStatus crips_run_experiment(const struct CripsConfig *config);

// # Safety
// `trace` must come from [`crips_run`] and not be used afterwards.
void crips_trace_free(struct CripsTrace *trace);

// Number of recorded iterations; 0 for a null handle.
//
// # Safety
// `trace` must be null or a live handle.
uintptr_t crips_trace_len(const struct CripsTrace *trace);

// Number of improvement events; 0 for a null handle.
//
// # Safety
// `trace` must be null or a live handle.
uintptr_t crips_trace_event_count(const struct CripsTrace *trace);

// 1 if the run ended early because a swarm update overflowed, else 0.
//
// # Safety
// `trace` must be null or a live handle.
int32_t crips_trace_diverged(const struct CripsTrace *trace);

// Copies record `index` into `*out`.
//
// # Safety
// `trace` must be a live handle and `out` a valid pointer.
enum CripsStatus crips_trace_record(const struct CripsTrace *trace,
                                    uintptr_t index,
                                    struct CripsRecord *out);

// Evaluates the named objective at the `n` coordinates in `x`.
//
// # Safety
// `name` must be a NUL-terminated string, `x` must point to `n` doubles and
// `out` must be valid for writing.
enum CripsStatus crips_objective_evaluate(const char *name,
                                          const double *x,
                                          uintptr_t n,
                                          double *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* CRIPS_H */
