/*
 * C interface to the BeWARE recommendation simulator.
 *
 * Objects are opaque handles created by a constructor function and
 * released with the matching _free function. Every fallible call returns a
 * beware_status; on failure a description of the most recent error on the
 * calling thread is available from beware_last_error().
 */
#ifndef BEWARE_BEWARE_H
#define BEWARE_BEWARE_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#  if defined(BEWARE_BUILDING_LIBRARY)
#    define BEWARE_API __declspec(dllexport)
#  else
#    define BEWARE_API __declspec(dllimport)
#  endif
#else
#  define BEWARE_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum beware_status {
  BEWARE_OK = 0,
  BEWARE_ERR_INVALID_ARGUMENT = 1,
  BEWARE_ERR_INDEX_OUT_OF_RANGE = 2,
  BEWARE_ERR_DUPLICATE_OBSERVATION = 3,
  BEWARE_ERR_DIMENSION_MISMATCH = 4,
  BEWARE_ERR_SINGULAR_SYSTEM = 5,
  BEWARE_ERR_EMPTY_ALLOWED_SET = 6,
  BEWARE_ERR_UNAVAILABLE = 7,
  BEWARE_ERR_PARSE = 8,
  BEWARE_ERR_IO = 9,
  BEWARE_ERR_INSUFFICIENT_DATA = 10,
  BEWARE_ERR_LENGTH_MISMATCH = 11,
  BEWARE_ERR_INTERNAL = 99
} beware_status;

typedef enum beware_policy {
  BEWARE_POLICY_GREEDY_ALS = 0,
  BEWARE_POLICY_GREEDY_ALS_WR = 1,
  BEWARE_POLICY_UCB_ALL_USERS = 2,
  BEWARE_POLICY_BEWARE_USER = 3,
  BEWARE_POLICY_BEWARE_ALS_USER = 4,
  BEWARE_POLICY_BEWARE_ITEM = 5,
  BEWARE_POLICY_BEWARE_ALS_ITEM = 6,
  BEWARE_POLICY_ORACLE = 7,
  BEWARE_POLICY_RANDOM = 8
} beware_policy;

typedef struct beware_dataset beware_dataset;
typedef struct beware_curve beware_curve;
typedef struct beware_trace beware_trace;

/* Synthetic block model. */
typedef struct beware_block_params {
  size_t n_users;
  size_t n_items;
  size_t genres;
  size_t types;
  uint64_t seed;
} beware_block_params;

typedef struct beware_episode_params {
  beware_policy policy;
  size_t rank;
  double lambda;
  double alpha;
  size_t max_sweeps;          /* cold fits */
  double objective_tolerance;
  size_t refit_sweeps;        /* warm refits */
  size_t refit_every;
  size_t full_refit_every;    /* 0 = never */
  double warmup_fraction;
  double noise_sigma;         /* standard deviation */
  uint64_t seed;
} beware_episode_params;

BEWARE_API const char* beware_version(void);
BEWARE_API const char* beware_status_string(beware_status status);
/* Message of the last failed call on this thread; "" if none. */
BEWARE_API const char* beware_last_error(void);

/* Fills defaults: k=5, lambda=0.05, alpha=0.12, 20 cold sweeps, tolerance
 * 1e-6, 2 refit sweeps, refit every step, noise sigma 0.5. */
BEWARE_API void beware_episode_params_default(beware_episode_params* params);
BEWARE_API void beware_block_params_default(beware_block_params* params);

/* Case-insensitive, e.g. "BeWARE.Item", "Greedy.ALS-WR", "UCBAllUsers". */
BEWARE_API beware_status beware_policy_parse(const char* name, beware_policy* out);
BEWARE_API const char* beware_policy_name(beware_policy policy);

/* Dataset whose ground truth is regenerated for every run (seed + run). */
BEWARE_API beware_status beware_dataset_synthetic(const beware_block_params* params,
                                                  beware_dataset** out);
/* Loads user,item,rating CSV and keeps the densest top_users x top_items block. */
BEWARE_API beware_status beware_dataset_load_csv(const char* path, size_t top_users,
                                                 size_t top_items, beware_dataset** out);
BEWARE_API void beware_dataset_free(beware_dataset* dataset);

/* Shape of the ground truth used by `run` (0 for a fixed dataset). */
BEWARE_API beware_status beware_dataset_shape(const beware_dataset* dataset, size_t run,
                                              size_t* n_users, size_t* n_items,
                                              double* fill_rate);
BEWARE_API beware_status beware_dataset_rating(const beware_dataset* dataset, size_t run,
                                               size_t user, size_t item, double* rating);
BEWARE_API beware_status beware_dataset_write_csv(const beware_dataset* dataset, size_t run,
                                                  const char* path);

/* Single episode on the ground truth of run `run`, using params->seed as is. */
BEWARE_API beware_status beware_run_episode(const beware_dataset* dataset, size_t run,
                                            const beware_episode_params* params,
                                            beware_trace** out);
BEWARE_API size_t beware_trace_length(const beware_trace* trace);
BEWARE_API beware_status beware_trace_step(const beware_trace* trace, size_t index,
                                           size_t* user, size_t* item, double* reward,
                                           double* immediate_regret, double* cumulative_regret);
BEWARE_API void beware_trace_free(beware_trace* trace);

/* `runs` episodes with seeds params->seed + r, aggregated. threads = 0 uses
 * every hardware thread. */
BEWARE_API beware_status beware_run_experiment(const beware_dataset* dataset,
                                               const beware_episode_params* params, size_t runs,
                                               size_t threads, beware_curve** out);
BEWARE_API size_t beware_curve_length(const beware_curve* curve);
BEWARE_API size_t beware_curve_runs(const beware_curve* curve);
BEWARE_API beware_status beware_curve_point(const beware_curve* curve, size_t step_index,
                                            double* mean_cumulative_regret, double* std_error);
/* Appends policy,step,mean_cum_regret,stderr rows; header written when
 * write_header != 0 (the file is truncated first in that case). */
BEWARE_API beware_status beware_curve_write_csv(const beware_curve* curve, const char* policy,
                                                const char* path, int write_header);
BEWARE_API void beware_curve_free(beware_curve* curve);

#ifdef __cplusplus
}
#endif

#endif /* BEWARE_BEWARE_H */
