/*
 * Copyright 2026 The tsalink Authors
 *
 * This software is licensed under the terms of the Apache Licence Version 2.0
 * which can be obtained at http://www.apache.org/licenses/LICENSE-2.0.
 */
#include <algorithm>
#include <future>
#include <map>

#include "tsalink/error.hpp"
#include "tsalink/pipeline.hpp"

namespace tsalink {

PairReport run_pair(const Attributable& a1, const Attributable& a2, const ObserverState& o1,
                    const ObserverState& o2, const RunConfig& cfg, const BatchOptions& opts) {
  PairReport rep;
  rep.attributables = std::make_pair(a1, a2);
  rep.observers = std::make_pair(o1, o2);
  try {
    double scale = std::max(o1.q.norm(), o2.q.norm());
    if (!(scale > 0.0)) scale = 1.0;
    const LineOfSight l1 = line_of_sight(a1, o1).scaled(scale);
    const LineOfSight l2 = line_of_sight(a2, o2).scaled(scale);
    const AngMomSystem am = build_q(l1, l2);
    rep.conic = classify_conic(am.q);
    if (opts.prefilter) {
      rep.prefilter = accept_pair(am.q, RangeBox{cfg.rho_min / scale, cfg.rho_max / scale});
      if (rep.prefilter->witness) {
        rep.prefilter->witness->first *= scale;
        rep.prefilter->witness->second *= scale;
      }
      if (!rep.prefilter->accept) {
        rep.status = "prefilter_rejected";
        return rep;
      }
    }

    if (opts.j2) {
      J2Config jc = cfg.j2_cfg;
      jc.mu = cfg.mu;
      J2Result r = j2_linkage(a1, a2, o1, o2, jc, cfg.linkage, cfg.assessment());
      rep.linkage = std::move(r.unperturbed);
      rep.solutions = std::move(r.solutions);
      rep.j2 = J2Summary{std::move(r.seeds)};
    } else {
      rep.linkage = solve_linkage(a1, a2, o1, o2, cfg.linkage);
      rep.solutions = assess_solutions(*rep.linkage, a1, a2, o1, o2, cfg.assessment());
    }
    rep.status = "linked";
  } catch (const std::exception& e) {
    rep.status = "error";
    rep.error = e.what();
  }
  bool plausible = false;
  for (const LinkageSolution& s : rep.solutions) {
    if (s.flags.accepted() && s.penalty <= cfg.penalty_threshold) plausible = true;
  }
  rep.unlikely_link = rep.status == "linked" && !plausible;
  return rep;
}

std::vector<PairReport> run_linkage_batch(const std::vector<Arc>& arcs, const PairList& pairs,
                                          const RunConfig& cfg, const BatchOptions& opts) {
  std::map<std::string, const Arc*> by_id;
  for (const Arc& a : arcs) by_id[a.id] = &a;
  for (const auto& [x, y] : pairs) {
    if (!by_id.count(x)) throw ParseError("pair references unknown arc '" + x + "'");
    if (!by_id.count(y)) throw ParseError("pair references unknown arc '" + y + "'");
  }

  auto one = [&](std::size_t k) {
    const Arc& a = *by_id.at(pairs[k].first);
    const Arc& b = *by_id.at(pairs[k].second);
    PairReport rep;
    if (a.id == b.id) {
      rep.status = "skipped";
      rep.error = "pair links an arc with itself";
    } else if (!a.attributable || !b.attributable) {
      rep.status = "skipped";
      rep.error = "attributable unavailable: " + (a.attributable ? b.fit_error : a.fit_error);
    } else {
      rep = run_pair(*a.attributable, *b.attributable, a.observer, b.observer, cfg, opts);
    }
    rep.arc1 = a.id;
    rep.arc2 = b.id;
    rep.pair_id = a.id + "|" + b.id;
    return rep;
  };

  std::vector<PairReport> out(pairs.size());
  const std::size_t workers = static_cast<std::size_t>(std::max(1, cfg.threads));
  if (workers == 1) {
    for (std::size_t k = 0; k < pairs.size(); ++k) out[k] = one(k);
    return out;
  }
  // strided work split; each slot is written by exactly one task
  std::vector<std::future<void>> tasks;
  for (std::size_t w = 0; w < workers; ++w) {
    tasks.push_back(std::async(std::launch::async, [&, w] {
      for (std::size_t k = w; k < pairs.size(); k += workers) out[k] = one(k);
    }));
  }
  for (auto& t : tasks) t.get();
  return out;
}

}  // namespace tsalink
