/*
 * Copyright 2026 The tsalink Authors
 *
 * This software is licensed under the terms of the Apache Licence Version 2.0
 * which can be obtained at http://www.apache.org/licenses/LICENSE-2.0.
 */
#include "tsalink/tsalink.h"

#include <cstring>
#include <fstream>
#include <new>
#include <string>

#include "tsalink/error.hpp"
#include "tsalink/pipeline.hpp"
#include "tsalink/version.hpp"

struct tsl_config {
  tsalink::RunConfig cfg;
};

struct tsl_linkage {
  tsalink::PairReport report;
  tsalink::RunConfig cfg;
};

struct tsl_batch {
  tsalink::RunConfig cfg;
  std::vector<tsalink::Arc> arcs;
  tsalink::PairList pairs;
  std::vector<tsalink::PairReport> reports;
};

namespace {

thread_local std::string g_last_error;

tsl_status fail(tsl_status s, const std::string& msg) {
  g_last_error = msg;
  return s;
}

tsl_status status_of(tsalink::ErrorCode c) {
  switch (c) {
    case tsalink::ErrorCode::InvalidArgument: return TSL_ERR_INVALID_ARGUMENT;
    case tsalink::ErrorCode::Parse: return TSL_ERR_PARSE;
    case tsalink::ErrorCode::Domain: return TSL_ERR_DOMAIN;
    case tsalink::ErrorCode::Degenerate: return TSL_ERR_DEGENERATE;
    case tsalink::ErrorCode::Numeric: return TSL_ERR_NUMERIC;
    case tsalink::ErrorCode::Io: return TSL_ERR_IO;
    case tsalink::ErrorCode::NoPairs: return TSL_ERR_NO_PAIRS;
    case tsalink::ErrorCode::Algebra: return TSL_ERR_ALGEBRA;
  }
  return TSL_ERR_INTERNAL;
}

template <class F>
tsl_status guarded(F&& f) {
  try {
    g_last_error.clear();
    return f();
  } catch (const tsalink::Error& e) {
    return fail(status_of(e.code()), e.what());
  } catch (const std::bad_alloc&) {
    return fail(TSL_ERR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return fail(TSL_ERR_INTERNAL, e.what());
  }
}

tsalink::Attributable from_c(const tsl_attributable& a) {
  tsalink::Attributable out;
  out.alpha = a.alpha;
  out.delta = a.delta;
  out.alphadot = a.alphadot;
  out.deltadot = a.deltadot;
  out.epoch = a.epoch;
  out.num_obs = a.num_obs;
  for (int i = 0; i < 4; ++i) {
    for (int j = 0; j < 4; ++j) out.gamma(i, j) = a.covariance[4 * i + j];
  }
  return out;
}

tsalink::ObserverState from_c(const tsl_observer& o) {
  return tsalink::ObserverState{tsalink::Vec3(o.q[0], o.q[1], o.q[2]),
                                tsalink::Vec3(o.qdot[0], o.qdot[1], o.qdot[2]), o.epoch};
}

void copy3(const tsalink::Vec3& v, double* out) {
  for (int k = 0; k < 3; ++k) out[k] = v[k];
}

void copy_elements(const tsalink::KeplerianElements& el, double* out) {
  out[0] = el.a;
  out[1] = el.e;
  out[2] = el.I;
  out[3] = el.Omega;
  out[4] = el.omega;
  out[5] = el.ell;
}

char* dup_string(const std::string& s) {
  char* out = new char[s.size() + 1];
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

tsalink::BatchOptions options_of(unsigned flags) {
  tsalink::BatchOptions o;
  o.j2 = (flags & TSL_FLAG_J2) != 0;
  o.prefilter = (flags & TSL_FLAG_NO_PREFILTER) == 0;
  return o;
}

}  // namespace

extern "C" {

const char* tsl_version(void) { return tsalink::kVersion; }

const char* tsl_last_error(void) { return g_last_error.c_str(); }

tsl_status tsl_config_create_default(tsl_mode mode, tsl_config** out) {
  return guarded([&] {
    if (out == nullptr) return fail(TSL_ERR_INVALID_ARGUMENT, "out is null");
    if (mode != TSL_MODE_HELIOCENTRIC && mode != TSL_MODE_GEOCENTRIC) {
      return fail(TSL_ERR_INVALID_ARGUMENT, "unknown mode");
    }
    *out = new tsl_config{tsalink::default_config(mode == TSL_MODE_GEOCENTRIC ? tsalink::Mode::Geocentric
                                                                                : tsalink::Mode::Heliocentric)};
    return TSL_OK;
  });
}

tsl_status tsl_config_load(const char* path, tsl_config** out) {
  return guarded([&] {
    if (path == nullptr || out == nullptr) return fail(TSL_ERR_INVALID_ARGUMENT, "null argument");
    *out = new tsl_config{tsalink::load_config(path)};
    return TSL_OK;
  });
}

void tsl_config_destroy(tsl_config* cfg) { delete cfg; }

tsl_status tsl_fit_attributable(const tsl_observation* obs, size_t n, tsl_attributable* out) {
  return guarded([&] {
    if (obs == nullptr || out == nullptr) return fail(TSL_ERR_INVALID_ARGUMENT, "null argument");
    std::vector<tsalink::AngularObservation> v;
    for (size_t k = 0; k < n; ++k) {
      v.push_back(tsalink::AngularObservation{obs[k].t, obs[k].ra, obs[k].dec, obs[k].sigma_ra, obs[k].sigma_dec});
    }
    const tsalink::Attributable a = tsalink::fit_attributable(v);
    out->alpha = a.alpha;
    out->delta = a.delta;
    out->alphadot = a.alphadot;
    out->deltadot = a.deltadot;
    out->epoch = a.epoch;
    out->num_obs = a.num_obs;
    for (int i = 0; i < 4; ++i) {
      for (int j = 0; j < 4; ++j) out->covariance[4 * i + j] = a.gamma(i, j);
    }
    return TSL_OK;
  });
}

tsl_status tsl_prefilter(const tsl_config* cfg, const tsl_attributable* a1, const tsl_attributable* a2,
                         const tsl_observer* o1, const tsl_observer* o2, int* accept) {
  return guarded([&] {
    if (!cfg || !a1 || !a2 || !o1 || !o2 || !accept) return fail(TSL_ERR_INVALID_ARGUMENT, "null argument");
    const tsalink::ObserverState s1 = from_c(*o1), s2 = from_c(*o2);
    double scale = std::max(s1.q.norm(), s2.q.norm());
    if (!(scale > 0.0)) scale = 1.0;
    const tsalink::AngMomSystem am = tsalink::build_q(tsalink::line_of_sight(from_c(*a1), s1).scaled(scale),
                                                      tsalink::line_of_sight(from_c(*a2), s2).scaled(scale));
    const tsalink::PrefilterDecision d =
        tsalink::accept_pair(am.q, tsalink::RangeBox{cfg->cfg.rho_min / scale, cfg->cfg.rho_max / scale});
    *accept = d.accept ? 1 : 0;
    return TSL_OK;
  });
}

tsl_status tsl_link(const tsl_config* cfg, const tsl_attributable* a1, const tsl_attributable* a2,
                    const tsl_observer* o1, const tsl_observer* o2, unsigned flags, tsl_linkage** out) {
  return guarded([&] {
    if (!cfg || !a1 || !a2 || !o1 || !o2 || !out) return fail(TSL_ERR_INVALID_ARGUMENT, "null argument");
    auto lk = std::make_unique<tsl_linkage>();
    lk->cfg = cfg->cfg;
    lk->report = tsalink::run_pair(from_c(*a1), from_c(*a2), from_c(*o1), from_c(*o2), cfg->cfg, options_of(flags));
    lk->report.pair_id = "pair";
    *out = lk.release();
    return TSL_OK;
  });
}

size_t tsl_linkage_count(const tsl_linkage* lk) { return lk ? lk->report.solutions.size() : 0; }

tsl_status tsl_linkage_solution(const tsl_linkage* lk, size_t index, tsl_solution* out) {
  return guarded([&] {
    if (!lk || !out) return fail(TSL_ERR_INVALID_ARGUMENT, "null argument");
    if (index >= lk->report.solutions.size()) return fail(TSL_ERR_INVALID_ARGUMENT, "index out of range");
    const tsalink::LinkageSolution& s = lk->report.solutions[index];
    *out = tsl_solution{};
    out->rho1 = s.rho1;
    out->rhodot1 = s.rhodot1;
    out->rho2 = s.rho2;
    out->rhodot2 = s.rhodot2;
    copy3(s.state1.r, out->r1);
    copy3(s.state1.rdot, out->v1);
    copy3(s.state2.r, out->r2);
    copy3(s.state2.rdot, out->v2);
    out->energy1 = s.energy1;
    out->energy2 = s.energy2;
    out->penalty = s.penalty;
    const tsalink::SolutionFlags& f = s.flags;
    out->flags = (f.negative_range ? TSL_SOL_NEGATIVE_RANGE : 0u) | (f.out_of_range ? TSL_SOL_OUT_OF_RANGE : 0u) |
                 (f.unbounded ? TSL_SOL_UNBOUNDED : 0u) | (f.spurious_intersys ? TSL_SOL_SPURIOUS_INTERSYS : 0u) |
                 (f.spurious_fullsys ? TSL_SOL_SPURIOUS_FULLSYS : 0u) |
                 (f.indeterminate ? TSL_SOL_INDETERMINATE : 0u) |
                 (f.covariance_unavailable ? TSL_SOL_COVARIANCE_UNAVAILABLE : 0u) |
                 (f.propagation_failed ? TSL_SOL_PROPAGATION_FAILED : 0u);
    out->accepted = f.accepted() ? 1 : 0;
    out->has_elements = s.kepler1 && s.kepler2 ? 1 : 0;
    if (out->has_elements) {
      copy_elements(*s.kepler1, out->elements1);
      copy_elements(*s.kepler2, out->elements2);
    }
    return TSL_OK;
  });
}

tsl_status tsl_linkage_to_json(const tsl_linkage* lk, char** out) {
  return guarded([&] {
    if (!lk || !out) return fail(TSL_ERR_INVALID_ARGUMENT, "null argument");
    *out = dup_string(tsalink::report_to_json(lk->report, lk->cfg));
    return TSL_OK;
  });
}

void tsl_linkage_destroy(tsl_linkage* lk) { delete lk; }

void tsl_string_free(char* s) { delete[] s; }

tsl_status tsl_batch_load(const tsl_config* cfg, const char* obs_path, const char* states_path,
                          int builtin_ephemeris, const char* pairs_path, tsl_batch** out) {
  return guarded([&] {
    if (!cfg || !obs_path || !out) return fail(TSL_ERR_INVALID_ARGUMENT, "null argument");
    auto b = std::make_unique<tsl_batch>();
    b->cfg = cfg->cfg;
    if (builtin_ephemeris) b->cfg.ephemeris = tsalink::EphemerisSource::BuiltinCircular;
    if (states_path) b->cfg.ephemeris = tsalink::EphemerisSource::File;
    const std::vector<tsalink::ObservationRow> rows = tsalink::read_observations(obs_path);
    std::vector<tsalink::StateRow> states;
    if (states_path) states = tsalink::read_states(states_path);
    b->arcs = tsalink::ingest(rows, states_path ? &states : nullptr, b->cfg);
    b->pairs = pairs_path ? tsalink::read_pairs(pairs_path) : tsalink::all_pairs(b->arcs);
    *out = b.release();
    return TSL_OK;
  });
}

size_t tsl_batch_pair_count(const tsl_batch* b) { return b ? b->pairs.size() : 0; }

tsl_status tsl_batch_run(tsl_batch* b, unsigned flags) {
  return guarded([&] {
    if (!b) return fail(TSL_ERR_INVALID_ARGUMENT, "null argument");
    b->reports = tsalink::run_linkage_batch(b->arcs, b->pairs, b->cfg, options_of(flags));
    bool runnable = false;
    for (const tsalink::PairReport& r : b->reports) runnable = runnable || r.status != "skipped";
    if (!runnable) return fail(TSL_ERR_NO_PAIRS, "no runnable arc pairs");
    return TSL_OK;
  });
}

tsl_status tsl_batch_write_report(const tsl_batch* b, const char* path) {
  return guarded([&] {
    if (!b || !path) return fail(TSL_ERR_INVALID_ARGUMENT, "null argument");
    std::ofstream out(path, std::ios::binary);
    if (!out) return fail(TSL_ERR_IO, std::string("cannot write ") + path);
    out << tsalink::reports_to_json(b->reports, b->cfg);
    if (!out) return fail(TSL_ERR_IO, std::string("write failed for ") + path);
    return TSL_OK;
  });
}

tsl_status tsl_batch_write_plots(const tsl_batch* b, const char* dir) {
  return guarded([&] {
    if (!b || !dir) return fail(TSL_ERR_INVALID_ARGUMENT, "null argument");
    tsalink::write_plot_data(dir, b->reports, b->cfg);
    return TSL_OK;
  });
}

void tsl_batch_destroy(tsl_batch* b) { delete b; }

}  // extern "C"
