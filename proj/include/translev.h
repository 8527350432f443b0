/* C API for the translev library: configuration-driven simulation of
 * Levy-driven SDEs and their translation-invariant SPDE counterparts in
 * truncated Hermite-Sobolev spaces.
 *
 * All entry points are thread-compatible: distinct experiment handles may
 * be used from distinct threads. Error details for the calling thread are
 * available via translev_last_error().
 */
#ifndef TRANSLEV_H
#define TRANSLEV_H

#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum translev_status {
  TRANSLEV_OK = 0,
  TRANSLEV_ERR_TOLERANCE = 1, /* a configured tolerance failed */
  TRANSLEV_ERR_CONFIG = 2,    /* configuration invalid */
  TRANSLEV_ERR_INVALID = 3,   /* invalid argument */
  TRANSLEV_ERR_NUMERIC = 4,   /* numerical blowup */
  TRANSLEV_ERR_IO = 5,        /* file i/o failure */
  TRANSLEV_ERR_UNSUPPORTED = 6,
  TRANSLEV_ERR_INTERNAL = 7
} translev_status;

typedef struct translev_experiment translev_experiment;

const char* translev_version(void);

/* Parse a JSON experiment configuration. On success *out owns the
 * experiment and must be released with translev_experiment_free. */
translev_status translev_experiment_create(const char* config_json, translev_experiment** out);
translev_status translev_experiment_create_from_file(const char* path, translev_experiment** out);
void translev_experiment_free(translev_experiment* experiment);

/* Content hash of the canonical configuration (embedded in every output);
 * the returned string lives as long as the experiment. */
const char* translev_experiment_hash(const translev_experiment* experiment);

translev_status translev_experiment_set_seed(translev_experiment* experiment, uint64_t seed);
translev_status translev_experiment_set_threads(translev_experiment* experiment, int threads);

/* Commands. Outputs (CSV trajectories, JSONL noise replay, JSON reports)
 * are written under out_dir; re-running with an identical configuration
 * and seed reproduces them byte for byte, independent of thread count. */
translev_status translev_run_simulate(translev_experiment* experiment, const char* out_dir);
/* suite: "correspondence" | "ito" | "uniqueness" | "all" */
translev_status translev_run_verify(translev_experiment* experiment, const char* suite,
                                    const char* out_dir);
translev_status translev_run_inequalities(translev_experiment* experiment, const char* out_dir);
translev_status translev_run_hypotheses(translev_experiment* experiment, const char* out_dir);

/* Message for the most recent failure on this thread ("" if none). */
const char* translev_last_error(void);

#ifdef __cplusplus
}
#endif

#endif /* TRANSLEV_H */
