/*
 * Copyright 2026 The tsalink Authors
 *
 * This software is licensed under the terms of the Apache Licence Version 2.0
 * which can be obtained at http://www.apache.org/licenses/LICENSE-2.0.
 */
#include "tsalink/j2.hpp"

#include <array>
#include <cmath>
#include <limits>
#include <optional>

namespace tsalink {

namespace {

Vec3 angular_momentum_direction(const KeplerianElements& el) {
  return Vec3(std::sin(el.I) * std::sin(el.Omega), -std::sin(el.I) * std::cos(el.Omega),
              std::cos(el.I));
}

double normalized_residual(const BiPoly& p, double x, double y) {
  const double n = p.norm();
  if (n == 0.0) return 0.0;
  return std::abs(p.eval(x, y)) / (n * std::pow(std::max({1.0, std::abs(x), std::abs(y)}), 5));
}

struct Iterate {
  double x = 0.0;  // scaled rho1
  double y = 0.0;  // scaled rho2
};

struct Reposed {
  ConicQ q;
  RhoDotPolys rhodots;
  BiPoly p1, p2;
};

Reposed repose(const LineOfSight& l1, const LineOfSight& l2, const RotationPair& rot) {
  const AngMomSystem am = build_q(l1.rotated(rot.Rc), l2);
  const XiSystem xs = build_xi_p1_p2(l1.rotated(rot.RL), l2, am.rhodots, false);
  return Reposed{am.q, am.rhodots, xs.p1, xs.p2};
}

// Real solution of (p, q) = 0 closest to prev.
std::optional<Iterate> nearest_root(const BiPoly& p, const ConicQ& q, const Iterate& prev) {
  const LinearInRho1 red = reduce_mod_q(p, q_reduction(q));
  const UniPoly v = q.q20 * (red.a0 * red.a0) - q.q10 * (red.a0 * red.a1) + q.b0() * (red.a1 * red.a1);
  const UniPoly vt = v.trimmed(1e-14);
  if (vt.degree() < 1) return std::nullopt;

  std::vector<PolyRoot> roots;
  try {
    roots = poly_roots(vt);
  } catch (const RootFinderError& e) {
    roots = e.partial();
  }
  std::optional<Iterate> best;
  double best_d = std::numeric_limits<double>::infinity();
  for (const PolyRoot& r : roots) {
    if (std::abs(r.z.imag()) > 1e-6 * (1.0 + std::abs(r.z.real()))) continue;
    const double y = r.z.real();
    const double a1 = red.a1.eval(y);
    if (a1 == 0.0) continue;
    Iterate it{-red.a0.eval(y) / a1, y};
    const double d = std::hypot(it.x - prev.x, it.y - prev.y);
    if (std::isfinite(d) && d < best_d) {
      best_d = d;
      best = it;
    }
  }
  if (best) {
    const BiPoly qb = q.as_bipoly();
    const std::array<const BiPoly*, 2> eqs{&qb, &p};
    double x = best->x, y = best->y;
    if (refine_root(eqs, x, y, 1e-3 * std::max(1.0, std::hypot(x, y)))) *best = Iterate{x, y};
  }
  return best;
}

}  // namespace

const char* to_string(J2Branch b) { return b == J2Branch::P1 ? "p1&q" : "p2&q"; }

SecularRates secular_rates(const KeplerianElements& el, const J2Config& cfg) {
  if (!(el.e < 1.0) || !(el.a > 0.0)) throw UnboundedOrbitError("secular_rates: elliptic elements required");
  const double n = std::sqrt(cfg.mu / (el.a * el.a * el.a));
  const double p = el.a * (1.0 - el.e * el.e);
  const double f = cfg.j2 * n * (cfg.r_body / p) * (cfg.r_body / p);
  const double c = std::cos(el.I);
  return SecularRates{-1.5 * f * c, 0.75 * f * (5.0 * c * c - 1.0)};
}

Mat3 axis_rotation(const Vec3& axis, double angle) {
  const double n = axis.norm();
  if (!(n > 0.0)) throw DegenerateError("axis_rotation: zero axis");
  return Eigen::AngleAxisd(angle, axis / n).toRotationMatrix();
}

RotationPair rotation_pair(const KeplerianElements& el1, const KeplerianElements& el2, Epoch t1,
                           Epoch t2, const J2Config& cfg) {
  const SecularRates rates = secular_rates(el1, cfg);
  (void)secular_rates(el2, cfg);  // el2 must be elliptic as well
  const double dt = t2 - t1;
  RotationPair out;
  out.delta_Omega = rates.Omega_dot * dt;
  out.delta_omega = rates.omega_dot * dt;
  const Vec3 c1 = angular_momentum_direction(el1);
  const Vec3 c2 = angular_momentum_direction(el2);
  out.Rc = axis_rotation(Vec3::UnitZ(), out.delta_Omega);
  out.RL = axis_rotation(c2, el1.omega + out.delta_omega) * out.Rc * axis_rotation(c1, -el1.omega);
  return out;
}

J2SeedResult j2_iterate(const RawSolution& seed, const Attributable& a1, const Attributable& a2,
                        const ObserverState& o1, const ObserverState& o2, const J2Config& cfg) {
  J2SeedResult out;
  out.seed = seed;
  out.solution = seed;
  out.branch = cfg.branch;

  double scale = std::max(o1.q.norm(), o2.q.norm());
  if (!(scale > 0.0)) scale = 1.0;
  const LineOfSight l1 = line_of_sight(a1, o1).scaled(scale);
  const LineOfSight l2 = line_of_sight(a2, o2).scaled(scale);
  const LosFrame f1 = a1.frame();
  const LosFrame f2 = a2.frame();

  Iterate cur{seed.rho1 / scale, seed.rho2 / scale};
  double rhodot1 = seed.rhodot1, rhodot2 = seed.rhodot2;

  for (int it = 1; it <= cfg.max_iter; ++it) {
    out.iterations = it;
    KeplerianElements el1, el2;
    try {
      el1 = cartesian_to_keplerian(eval_state(f1, o1, cur.x * scale, rhodot1), cfg.mu);
      el2 = cartesian_to_keplerian(eval_state(f2, o2, cur.y * scale, rhodot2), cfg.mu);
    } catch (const Error& e) {
      out.status = std::string("elements undefined: ") + e.what();
      return out;
    }
    const RotationPair rot = rotation_pair(el1, el2, a1.epoch, a2.epoch, cfg);

    Reposed sys;
    try {
      sys = repose(l1, l2, rot);
    } catch (const Error& e) {
      out.status = std::string("re-posed system degenerate: ") + e.what();
      return out;
    }

    std::optional<Iterate> next;
    for (int attempt = 0; attempt < 2; ++attempt) {
      const BiPoly& p = out.branch == J2Branch::P1 ? sys.p1 : sys.p2;
      try {
        next = nearest_root(p, sys.q, cur);
      } catch (const Error&) {
        next.reset();
      }
      if (next && std::hypot(next->x - cur.x, next->y - cur.y) <= cfg.track_limit) break;
      next.reset();
      if (!cfg.branch_fallback || attempt == 1) break;
      out.branch = out.branch == J2Branch::P1 ? J2Branch::P2 : J2Branch::P1;
    }
    if (!next) {
      out.status = "tracked root lost";
      return out;
    }

    Iterate upd = *next;
    if (cfg.damping) upd = Iterate{0.5 * (cur.x + upd.x), 0.5 * (cur.y + upd.y)};
    const double step = std::hypot(upd.x - cur.x, upd.y - cur.y);

    J2Iteration rec;
    rec.iteration = it;
    rec.rho1 = upd.x * scale;
    rec.rho2 = upd.y * scale;
    rec.step = step;
    rec.branch = out.branch;
    rec.delta_Omega = rot.delta_Omega;
    rec.delta_omega = rot.delta_omega;
    rec.other_residual = normalized_residual(out.branch == J2Branch::P1 ? sys.p2 : sys.p1, upd.x, upd.y);
    out.trace.push_back(rec);

    if (step < cfg.tol_rho) {
      // cur is a fixed point to tolerance; keep it as the answer
      out.converged = true;
      out.status = "converged";
      out.solution.rho1 = cur.x * scale;
      out.solution.rho2 = cur.y * scale;
      out.solution.rhodot1 = rhodot1;
      out.solution.rhodot2 = rhodot2;
      out.solution.res_q = std::abs(sys.q.eval(cur.x, cur.y)) /
                           (sys.q.scale() * std::pow(std::max({1.0, std::abs(cur.x), std::abs(cur.y)}), 2));
      out.solution.res_p1 = normalized_residual(sys.p1, cur.x, cur.y);
      out.solution.res_p2 = normalized_residual(sys.p2, cur.x, cur.y);
      return out;
    }
    cur = upd;
    rhodot1 = sys.rhodots.rhodot1.eval(cur.x, cur.y) * scale;
    rhodot2 = sys.rhodots.rhodot2.eval(cur.x, cur.y) * scale;
  }
  out.status = "not converged within max_iter";
  return out;
}

J2Result j2_linkage(const Attributable& a1, const Attributable& a2, const ObserverState& o1,
                    const ObserverState& o2, const J2Config& cfg, const LinkageConfig& lcfg,
                    AssessmentConfig acfg) {
  acfg.mu = cfg.mu;
  J2Result out;
  out.unperturbed = solve_linkage(a1, a2, o1, o2, lcfg);
  const std::vector<LinkageSolution> base = assess_solutions(out.unperturbed, a1, a2, o1, o2, acfg);

  LinkageResult converged;
  converged.rho_scale = out.unperturbed.rho_scale;
  for (const LinkageSolution& s : base) {
    // the two-body spurious tests do not apply to perturbed data
    if (s.flags.negative_range || s.flags.out_of_range || s.flags.unbounded) continue;
    J2SeedResult seed = j2_iterate(s.raw, a1, a2, o1, o2, cfg);
    if (seed.converged) converged.solutions.push_back(seed.solution);
    out.seeds.push_back(std::move(seed));
  }
  out.solutions = assess_solutions(converged, a1, a2, o1, o2, acfg);
  for (LinkageSolution& s : out.solutions) {
    s.flags.spurious_intersys = false;
    s.flags.spurious_fullsys = false;
  }
  return out;
}

}  // namespace tsalink
