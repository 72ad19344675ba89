/*
 * Copyright 2026 The tsalink Authors
 *
 * This software is licensed under the terms of the Apache Licence Version 2.0
 * which can be obtained at http://www.apache.org/licenses/LICENSE-2.0.
 */
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>

#include <json.hpp>

#include "tsalink/error.hpp"
#include "tsalink/pipeline.hpp"

namespace tsalink {

namespace {

using nlohmann::ordered_json;

constexpr double kRadToDeg = 180.0 / std::numbers::pi;

ordered_json num(double v) { return std::isfinite(v) ? ordered_json(v) : ordered_json(nullptr); }

ordered_json vec(const Vec3& v) { return ordered_json::array({num(v.x()), num(v.y()), num(v.z())}); }

template <class M>
ordered_json matrix(const M& m) {
  ordered_json rows = ordered_json::array();
  for (int i = 0; i < m.rows(); ++i) {
    ordered_json row = ordered_json::array();
    for (int j = 0; j < m.cols(); ++j) row.push_back(num(m(i, j)));
    rows.push_back(row);
  }
  return rows;
}

ordered_json attributable_json(const Attributable& a) {
  ordered_json j;
  j["alpha"] = num(a.alpha);
  j["delta"] = num(a.delta);
  j["alphadot"] = num(a.alphadot);
  j["deltadot"] = num(a.deltadot);
  j["epoch"] = num(a.epoch);
  j["num_obs"] = a.num_obs;
  j["covariance"] = matrix(a.gamma);
  j["cov_scale"] = num(a.cov_scale);
  j["chi2_dof"] = num(a.chi2_dof);
  j["rescaled"] = a.rescaled;
  return j;
}

ordered_json elements_json(const std::optional<KeplerianElements>& el) {
  if (!el) return nullptr;
  ordered_json j;
  j["a"] = num(el->a);
  j["e"] = num(el->e);
  j["I_deg"] = num(el->I * kRadToDeg);
  j["Omega_deg"] = num(el->Omega * kRadToDeg);
  j["omega_deg"] = num(el->omega * kRadToDeg);
  j["mean_anomaly_deg"] = num(el->ell * kRadToDeg);
  j["epoch"] = num(el->epoch);
  return j;
}

ordered_json state_json(const State6& s) {
  ordered_json j;
  j["r"] = vec(s.r);
  j["v"] = vec(s.rdot);
  j["epoch"] = num(s.epoch);
  return j;
}

ordered_json solution_json(const LinkageSolution& s, const RunConfig& cfg) {
  ordered_json j;
  j["rho1"] = num(s.rho1);
  j["rhodot1"] = num(s.rhodot1);
  j["rho2"] = num(s.rho2);
  j["rhodot2"] = num(s.rhodot2);
  j["accepted"] = s.flags.accepted();
  j["flags"] = {{"negative_range", s.flags.negative_range},
                {"out_of_range", s.flags.out_of_range},
                {"unbounded", s.flags.unbounded},
                {"spurious_intersys", s.flags.spurious_intersys},
                {"spurious_fullsys", s.flags.spurious_fullsys},
                {"indeterminate", s.flags.indeterminate},
                {"covariance_unavailable", s.flags.covariance_unavailable},
                {"propagation_failed", s.flags.propagation_failed}};
  j["state1"] = state_json(s.state1);
  j["state2"] = state_json(s.state2);
  j["energy1"] = num(s.energy1);
  j["energy2"] = num(s.energy2);
  j["elements1"] = elements_json(s.kepler1);
  j["elements2"] = elements_json(s.kepler2);
  j["spurious"] = {{"residual_intersys", num(s.spurious.residual_intersys)},
                   {"lenz_gap", num(s.spurious.lenz_gap)}};
  j["penalty_mahalanobis"] = num(s.penalty);
  j["residuals"] = {{"q", num(s.raw.res_q)},
                    {"p1", num(s.raw.res_p1)},
                    {"p2", num(s.raw.res_p2)},
                    {"cross", num(s.raw.cross_residual)}};
  if (cfg.include_covariance) {
    j["covariance_car1"] = s.covariance.available ? matrix(s.covariance.gamma_car1) : ordered_json(nullptr);
  }
  return j;
}

ordered_json linkage_json(const LinkageResult& r) {
  ordered_json j;
  j["rho_scale"] = num(r.rho_scale);
  ordered_json conds = ordered_json::array();
  for (const NonDegeneracyCondition& c : r.report.conditions) {
    conds.push_back({{"group", c.group}, {"name", c.name}, {"magnitude", num(c.magnitude)}, {"pass", c.pass}});
  }
  j["nondegeneracy"] = {{"all_pass", r.report.all_pass()}, {"conditions", conds}};
  j["degrees"] = {{"u1_tilde", r.polys.elim.u1_tilde.degree()}, {"u2_tilde", r.polys.elim.u2_tilde.degree()}};
  ordered_json roots = ordered_json::array();
  for (const RawRoot& x : r.roots) {
    roots.push_back({{"re", num(x.value.real())},
                     {"im", num(x.value.imag())},
                     {"real", x.real},
                     {"cross_residual", num(x.cross_residual)},
                     {"cross_validated", x.cross_validated}});
  }
  j["roots"] = roots;
  j["diagnostics"] = r.diagnostics;
  return j;
}

ordered_json j2_json(const J2Summary& s) {
  ordered_json seeds = ordered_json::array();
  for (const J2SeedResult& r : s.seeds) {
    ordered_json trace = ordered_json::array();
    for (const J2Iteration& it : r.trace) {
      trace.push_back({{"iteration", it.iteration},
                       {"rho1", num(it.rho1)},
                       {"rho2", num(it.rho2)},
                       {"step", num(it.step)},
                       {"branch", to_string(it.branch)},
                       {"delta_Omega", num(it.delta_Omega)},
                       {"delta_omega", num(it.delta_omega)},
                       {"other_residual", num(it.other_residual)}});
    }
    seeds.push_back({{"seed", {{"rho1", num(r.seed.rho1)}, {"rho2", num(r.seed.rho2)}}},
                     {"converged", r.converged},
                     {"status", r.status},
                     {"iterations", r.iterations},
                     {"branch", to_string(r.branch)},
                     {"solution", {{"rho1", num(r.solution.rho1)},
                                   {"rhodot1", num(r.solution.rhodot1)},
                                   {"rho2", num(r.solution.rho2)},
                                   {"rhodot2", num(r.solution.rhodot2)}}},
                     {"trace", trace}});
  }
  return {{"seeds", seeds}};
}

ordered_json pair_json(const PairReport& r, const RunConfig& cfg) {
  ordered_json j;
  j["pair_id"] = r.pair_id;
  j["arc1"] = r.arc1;
  j["arc2"] = r.arc2;
  j["status"] = r.status;
  if (!r.error.empty()) j["error"] = r.error;
  if (r.attributables) {
    j["attributables"] = {attributable_json(r.attributables->first), attributable_json(r.attributables->second)};
    j["observers"] = {{{"q", vec(r.observers.first.q)}, {"qdot", vec(r.observers.first.qdot)}},
                      {{"q", vec(r.observers.second.q)}, {"qdot", vec(r.observers.second.qdot)}}};
  }
  if (r.conic) {
    ordered_json c;
    c["kind"] = to_string(r.conic->kind);
    c["center"] = r.conic->center ? ordered_json::array({num(r.conic->center->first), num(r.conic->center->second)})
                                  : ordered_json(nullptr);
    c["empty"] = r.conic->empty;
    j["conic"] = c;
  }
  if (r.prefilter) {
    const PrefilterDecision& p = *r.prefilter;
    j["prefilter"] = {{"decision", p.accept ? "accept" : "reject"},
                      {"reason", p.reason},
                      {"degenerate", p.degenerate},
                      {"witness", p.witness ? ordered_json::array({num(p.witness->first), num(p.witness->second)})
                                            : ordered_json(nullptr)}};
  } else {
    j["prefilter"] = {{"decision", "skipped"}};
  }
  if (r.linkage) {
    j["linkage"] = linkage_json(*r.linkage);
    ordered_json sols = ordered_json::array();
    for (const LinkageSolution& s : r.solutions) sols.push_back(solution_json(s, cfg));
    j["solutions"] = sols;
    j["unlikely_link"] = r.unlikely_link;
  }
  if (r.j2) j["j2"] = j2_json(*r.j2);
  return j;
}

std::string file_stem(const std::string& id) {
  std::string out;
  for (char c : id) out += (std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '.') ? c : '_';
  return out;
}

// Polynomial in y for fixed x (or in x for fixed y when in_x).
UniPoly slice(const BiPoly& p, double fixed, bool in_x) {
  std::vector<double> c(BiPoly::kDim, 0.0);
  for (int i = 0; i <= BiPoly::kMaxDeg; ++i) {
    for (int j = 0; j <= BiPoly::kMaxDeg; ++j) {
      if (in_x) {
        c[i] += p(i, j) * std::pow(fixed, j);
      } else {
        c[j] += p(i, j) * std::pow(fixed, i);
      }
    }
  }
  return UniPoly(std::move(c)).trimmed(1e-13);
}

}  // namespace

std::string report_to_json(const PairReport& report, const RunConfig& cfg) {
  return pair_json(report, cfg).dump(2);
}

std::string reports_to_json(const std::vector<PairReport>& reports, const RunConfig& cfg) {
  ordered_json arr = ordered_json::array();
  for (const PairReport& r : reports) arr.push_back(pair_json(r, cfg));
  return arr.dump(2) + "\n";
}

void write_plot_data(const std::filesystem::path& dir, const std::vector<PairReport>& reports,
                     const RunConfig& cfg) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw Error(ErrorCode::Io, "cannot create plot directory " + dir.string());
  for (const PairReport& r : reports) {
    if (!r.linkage) continue;
    const LinkageResult& lr = *r.linkage;
    const double scale = lr.rho_scale;

    double top = cfg.plot_rho_max;
    if (!(top > 0.0)) {
      for (const LinkageSolution& s : r.solutions) top = std::max({top, std::abs(s.rho1), std::abs(s.rho2)});
      top = top > 0.0 ? 1.5 * top : std::min(cfg.rho_max, 5.0 * scale);
    }
    const double smax = top / scale;
    const int n = std::max(2, cfg.plot_samples);

    const std::string stem = file_stem(r.pair_id);
    std::ofstream curves(dir / (stem + "_curves.csv"));
    std::ofstream roots(dir / (stem + "_roots.csv"));
    if (!curves || !roots) throw Error(ErrorCode::Io, "cannot write plot files for " + r.pair_id);
    curves << "curve,rho1,rho2\n";
    roots << "kind,rho1,rho2,accepted\n";

    const BiPoly qb = lr.polys.q.as_bipoly();
    const std::pair<const char*, const BiPoly*> items[] = {{"q", &qb}, {"p1", &lr.polys.p1}, {"p2", &lr.polys.p2}};
    char buf[128];
    for (const auto& [name, poly] : items) {
      for (int pass = 0; pass < 2; ++pass) {
        const bool in_x = pass == 1;  // sweep rho2, solve for rho1
        for (int k = 0; k <= n; ++k) {
          const double fixed = smax * k / n;
          const UniPoly u = slice(*poly, fixed, in_x);
          if (u.degree() < 1) continue;
          std::vector<PolyRoot> zs;
          try {
            zs = poly_roots(u);
          } catch (const RootFinderError& e) {
            zs = e.partial();
          }
          for (const PolyRoot& z : zs) {
            if (std::abs(z.z.imag()) > 1e-9 * (1.0 + std::abs(z.z.real()))) continue;
            const double v = z.z.real();
            if (v < 0.0 || v > smax) continue;
            const double x = in_x ? v : fixed, y = in_x ? fixed : v;
            std::snprintf(buf, sizeof buf, "%s,%.10g,%.10g\n", name, x * scale, y * scale);
            curves << buf;
          }
        }
      }
    }
    for (const LinkageSolution& s : r.solutions) {
      std::snprintf(buf, sizeof buf, "solution,%.12g,%.12g,%d\n", s.rho1, s.rho2, s.flags.accepted() ? 1 : 0);
      roots << buf;
    }
    const ConicQ& q = lr.polys.q;
    const std::pair<const char*, std::pair<double, double>> marks[] = {
        {"C", {q.rho1_second, q.rho2_second}}, {"P1", {q.rho1_second, q.rho2_prime}}, {"P2", {q.rho1_prime, q.rho2_second}}};
    for (const auto& [name, pt] : marks) {
      if (!std::isfinite(pt.first) || !std::isfinite(pt.second)) continue;
      std::snprintf(buf, sizeof buf, "%s,%.12g,%.12g,0\n", name, pt.first * scale, pt.second * scale);
      roots << buf;
    }
  }
}

}  // namespace tsalink
