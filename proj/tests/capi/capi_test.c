/*
 * Copyright 2026 The tsalink Authors
 *
 * This software is licensed under the terms of the Apache Licence Version 2.0
 * which can be obtained at http://www.apache.org/licenses/LICENSE-2.0.
 */
/* Exercises the C interface from C, using the CLI fixture files. */

#include <math.h>
#include <stdio.h>
#include <stdlib.h>
#include <string.h>

#include "tsalink/tsalink.h"

static int failures = 0;

#define EXPECT(cond)                                                  \
  do {                                                                \
    if (!(cond)) {                                                    \
      fprintf(stderr, "%s:%d: check failed: %s\n", __FILE__, __LINE__, #cond); \
      ++failures;                                                     \
    }                                                                 \
  } while (0)

static char path_buf[4][1024];

static const char* in_dir(int slot, const char* dir, const char* name) {
  snprintf(path_buf[slot], sizeof path_buf[slot], "%s/%s", dir, name);
  return path_buf[slot];
}

/* Rows of one arc from obs.csv plus the matching observer rows of
   states.csv, averaged to the mean epoch (good enough for a smoke test). */
static int load_arc(const char* dir, const char* arc, tsl_observation* obs, tsl_observer* o) {
  const double deg = 3.14159265358979323846 / 180.0;
  char line[1024];
  int n = 0, k;
  double mjd[16];
  FILE* f = fopen(in_dir(3, dir, "obs.csv"), "r");
  if (!f) return 0;
  if (!fgets(line, sizeof line, f)) {
    fclose(f);
    return 0;
  }
  while (fgets(line, sizeof line, f) && n < 16) {
    char id[64], st[64];
    double t, ra, dec, sra, sdec;
    if (sscanf(line, "%63[^,],%63[^,],%lf,%lf,%lf,%lf,%lf", id, st, &t, &ra, &dec, &sra, &sdec) != 7) continue;
    if (strcmp(id, arc) != 0) continue;
    obs[n].t = t;
    obs[n].ra = ra * deg;
    obs[n].dec = dec * deg;
    obs[n].sigma_ra = sra * deg / 3600.0;
    obs[n].sigma_dec = sdec * deg / 3600.0;
    mjd[n++] = t;
  }
  fclose(f);

  memset(o, 0, sizeof *o);
  f = fopen(in_dir(3, dir, "states.csv"), "r");
  if (!f) return 0;
  if (!fgets(line, sizeof line, f)) {
    fclose(f);
    return 0;
  }
  while (fgets(line, sizeof line, f)) {
    char st[64];
    double t, s[6];
    if (sscanf(line, "%63[^,],%lf,%lf,%lf,%lf,%lf,%lf,%lf", st, &t, &s[0], &s[1], &s[2], &s[3], &s[4], &s[5]) != 8)
      continue;
    for (k = 0; k < n; ++k) {
      if (t == mjd[k]) {
        int i;
        for (i = 0; i < 3; ++i) {
          o->q[i] += s[i] / n;
          o->qdot[i] += s[i + 3] / n;
        }
      }
    }
  }
  fclose(f);
  return n;
}

int main(int argc, char** argv) {
  const char* dir;
  tsl_config* cfg = NULL;
  tsl_batch* batch = NULL;
  tsl_linkage* lk = NULL;
  tsl_observation obs1[16], obs2[16];
  tsl_observer o1, o2;
  tsl_attributable a1, a2;
  int n1, n2, accept = -1;
  size_t i, count;
  char* json = NULL;

  if (argc != 2) {
    fprintf(stderr, "usage: tsalink_capi_test FIXTURE_DIR\n");
    return 1;
  }
  dir = argv[1];

  EXPECT(tsl_version() != NULL && strlen(tsl_version()) > 0);
  EXPECT(tsl_config_create_default(TSL_MODE_HELIOCENTRIC, NULL) == TSL_ERR_INVALID_ARGUMENT);
  EXPECT(tsl_config_create_default(TSL_MODE_HELIOCENTRIC, &cfg) == TSL_OK);
  EXPECT(tsl_fit_attributable(NULL, 0, &a1) == TSL_ERR_INVALID_ARGUMENT);

  /* errors map to codes and leave a message behind */
  {
    tsl_config* bad = NULL;
    EXPECT(tsl_config_load(in_dir(0, dir, "bad_config.json"), &bad) == TSL_ERR_PARSE);
    EXPECT(bad == NULL);
    EXPECT(strstr(tsl_last_error(), "rho_maximum") != NULL);
    EXPECT(tsl_config_load(in_dir(0, dir, "missing.json"), &bad) == TSL_ERR_IO);
  }
  {
    tsl_batch* bad = NULL;
    EXPECT(tsl_batch_load(cfg, in_dir(0, dir, "bad_obs.csv"), NULL, 1, NULL, &bad) == TSL_ERR_PARSE);
    EXPECT(bad == NULL);
  }

  /* single pair */
  n1 = load_arc(dir, "o0a", obs1, &o1);
  n2 = load_arc(dir, "o0b", obs2, &o2);
  EXPECT(n1 == 4 && n2 == 4);
  EXPECT(tsl_fit_attributable(obs1, (size_t)n1, &a1) == TSL_OK);
  EXPECT(tsl_fit_attributable(obs2, (size_t)n2, &a2) == TSL_OK);
  EXPECT(a1.num_obs == 4);
  EXPECT(fabs(a1.epoch - 0.25 * (obs1[0].t + obs1[1].t + obs1[2].t + obs1[3].t)) < 1e-9);
  EXPECT(a1.covariance[1] == a1.covariance[4]);
  o1.epoch = a1.epoch;
  o2.epoch = a2.epoch;

  EXPECT(tsl_prefilter(cfg, &a1, &a2, &o1, &o2, &accept) == TSL_OK);
  EXPECT(accept == 1);
  EXPECT(tsl_link(cfg, &a1, &a2, &o1, &o2, 0u, &lk) == TSL_OK);
  count = tsl_linkage_count(lk);
  EXPECT(count > 0);
  for (i = 0; i < count; ++i) {
    tsl_solution s;
    EXPECT(tsl_linkage_solution(lk, i, &s) == TSL_OK);
    EXPECT(s.accepted == ((s.flags & 63u) == 0u));
  }
  {
    tsl_solution s;
    EXPECT(tsl_linkage_solution(lk, count, &s) == TSL_ERR_INVALID_ARGUMENT);
  }
  EXPECT(tsl_linkage_to_json(lk, &json) == TSL_OK);
  EXPECT(json != NULL && strstr(json, "\"solutions\"") != NULL);
  tsl_string_free(json);
  tsl_linkage_destroy(lk);

  /* batch with states and a pair list */
  EXPECT(tsl_batch_load(cfg, in_dir(0, dir, "obs.csv"), in_dir(1, dir, "states.csv"), 0,
                        in_dir(2, dir, "pairs.csv"), &batch) == TSL_OK);
  EXPECT(tsl_batch_pair_count(batch) == 3);
  EXPECT(tsl_batch_run(batch, 0u) == TSL_OK);
  EXPECT(tsl_batch_write_report(batch, in_dir(0, dir, "capi_report.json")) == TSL_OK);
  tsl_batch_destroy(batch);

  /* only self pairs: nothing runnable */
  batch = NULL;
  EXPECT(tsl_batch_load(cfg, in_dir(0, dir, "obs.csv"), NULL, 1, in_dir(2, dir, "self_pairs.csv"), &batch) ==
         TSL_OK);
  EXPECT(tsl_batch_run(batch, 0u) == TSL_ERR_NO_PAIRS);
  tsl_batch_destroy(batch);

  tsl_config_destroy(cfg);
  if (failures) {
    fprintf(stderr, "%d check(s) failed\n", failures);
    return 1;
  }
  printf("capi: all checks passed\n");
  return 0;
}
