/*
 * Copyright 2026 The tsalink Authors
 *
 * This software is licensed under the terms of the Apache Licence Version 2.0
 * which can be obtained at http://www.apache.org/licenses/LICENSE-2.0.
 */
#ifndef TSALINK_TSALINK_H
#define TSALINK_TSALINK_H

/* C interface to the tsalink linkage library. Angles are radians, times are
 * in the unit of the configured mode (days heliocentric, seconds
 * geocentric). Every call returns a tsl_status; on failure
 * tsl_last_error() describes the problem (per thread). */

#include <stddef.h>

#if defined(_WIN32)
#if defined(TSALINK_BUILDING)
#define TSL_API __declspec(dllexport)
#else
#define TSL_API __declspec(dllimport)
#endif
#else
#define TSL_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum tsl_status {
  TSL_OK = 0,
  TSL_ERR_INVALID_ARGUMENT = 1,
  TSL_ERR_PARSE = 2,
  TSL_ERR_DOMAIN = 3,
  TSL_ERR_DEGENERATE = 4,
  TSL_ERR_NUMERIC = 5,
  TSL_ERR_IO = 6,
  TSL_ERR_NO_PAIRS = 7,
  TSL_ERR_ALGEBRA = 8,
  TSL_ERR_INTERNAL = 99
} tsl_status;

typedef enum tsl_mode { TSL_MODE_HELIOCENTRIC = 0, TSL_MODE_GEOCENTRIC = 1 } tsl_mode;

enum {
  TSL_FLAG_J2 = 1u,
  TSL_FLAG_NO_PREFILTER = 2u
};

enum {
  TSL_SOL_NEGATIVE_RANGE = 1u,
  TSL_SOL_OUT_OF_RANGE = 2u,
  TSL_SOL_UNBOUNDED = 4u,
  TSL_SOL_SPURIOUS_INTERSYS = 8u,
  TSL_SOL_SPURIOUS_FULLSYS = 16u,
  TSL_SOL_INDETERMINATE = 32u,
  TSL_SOL_COVARIANCE_UNAVAILABLE = 64u,
  TSL_SOL_PROPAGATION_FAILED = 128u
};

typedef struct tsl_config tsl_config;
typedef struct tsl_linkage tsl_linkage;
typedef struct tsl_batch tsl_batch;

typedef struct tsl_observation {
  double t;
  double ra;
  double dec;
  double sigma_ra;  /* on-sky (ra * cos dec); <= 0 selects the default */
  double sigma_dec;
} tsl_observation;

typedef struct tsl_attributable {
  double alpha, delta, alphadot, deltadot;
  double epoch;
  double covariance[16]; /* row-major, (alpha, delta, alphadot, deltadot) */
  int num_obs;
} tsl_attributable;

typedef struct tsl_observer {
  double q[3];
  double qdot[3];
  double epoch;
} tsl_observer;

typedef struct tsl_solution {
  double rho1, rhodot1, rho2, rhodot2;
  double r1[3], v1[3], r2[3], v2[3];
  double energy1, energy2;
  double penalty; /* Mahalanobis attributable mismatch; +inf if unavailable */
  unsigned flags; /* TSL_SOL_* */
  int accepted;
  int has_elements;
  double elements1[6]; /* a, e, I, Omega, omega, mean anomaly */
  double elements2[6];
} tsl_solution;

TSL_API const char* tsl_version(void);
TSL_API const char* tsl_last_error(void);

TSL_API tsl_status tsl_config_create_default(tsl_mode mode, tsl_config** out);
TSL_API tsl_status tsl_config_load(const char* path, tsl_config** out);
TSL_API void tsl_config_destroy(tsl_config* cfg);

TSL_API tsl_status tsl_fit_attributable(const tsl_observation* obs, size_t n, tsl_attributable* out);

TSL_API tsl_status tsl_prefilter(const tsl_config* cfg, const tsl_attributable* a1, const tsl_attributable* a2,
                                 const tsl_observer* o1, const tsl_observer* o2, int* accept);

TSL_API tsl_status tsl_link(const tsl_config* cfg, const tsl_attributable* a1, const tsl_attributable* a2,
                            const tsl_observer* o1, const tsl_observer* o2, unsigned flags,
                            tsl_linkage** out);
TSL_API size_t tsl_linkage_count(const tsl_linkage* lk);
TSL_API tsl_status tsl_linkage_solution(const tsl_linkage* lk, size_t index, tsl_solution* out);
/* JSON text of the pair report; release with tsl_string_free. */
TSL_API tsl_status tsl_linkage_to_json(const tsl_linkage* lk, char** out);
TSL_API void tsl_linkage_destroy(tsl_linkage* lk);
TSL_API void tsl_string_free(char* s);

/* states_path may be NULL when builtin_ephemeris is nonzero; pairs_path may
 * be NULL for all unordered pairs. */
TSL_API tsl_status tsl_batch_load(const tsl_config* cfg, const char* obs_path, const char* states_path,
                                  int builtin_ephemeris, const char* pairs_path, tsl_batch** out);
TSL_API size_t tsl_batch_pair_count(const tsl_batch* b);
/* TSL_ERR_NO_PAIRS when nothing can be run. */
TSL_API tsl_status tsl_batch_run(tsl_batch* b, unsigned flags);
TSL_API tsl_status tsl_batch_write_report(const tsl_batch* b, const char* path);
TSL_API tsl_status tsl_batch_write_plots(const tsl_batch* b, const char* dir);
TSL_API void tsl_batch_destroy(tsl_batch* b);

#ifdef __cplusplus
}
#endif

#endif /* TSALINK_TSALINK_H */
