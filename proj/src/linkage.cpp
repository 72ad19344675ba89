/*
 * Copyright 2026 The tsalink Authors
 *
 * This software is licensed under the terms of the Apache Licence Version 2.0
 * which can be obtained at http://www.apache.org/licenses/LICENSE-2.0.
 */
#include "tsalink/linkage.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>
#include <span>

#include <Eigen/Dense>

namespace tsalink {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

double safe_ratio(double num, double den) {
  return den != 0.0 ? num / den : kNaN;
}

double triple(const Vec3& a, const Vec3& b, const Vec3& c) { return a.cross(b).dot(c); }

ConicQ transposed(const ConicQ& q) {
  ConicQ t;
  t.q20 = q.q02;
  t.q10 = q.q01;
  t.q02 = q.q20;
  t.q01 = q.q10;
  t.q00 = q.q00;
  t.rho1_prime = q.rho2_prime;
  t.rho2_prime = q.rho1_prime;
  t.rho1_second = q.rho2_second;
  t.rho2_second = q.rho1_second;
  return t;
}

// Drops a coefficient that must vanish structurally after checking it does.
void drop_structural(BiPoly& p, int i, int j, double scale, const char* what) {
  if (std::abs(p(i, j)) > 1e-8 * scale) {
    std::ostringstream msg;
    msg << "build_xi_p1_p2: " << what << " coefficient rho1^" << i << " rho2^" << j
        << " does not vanish (" << p(i, j) << " vs scale " << scale << ")";
    throw AlgebraError(msg.str());
  }
  p.at(i, j) = 0.0;
}

double rel_poly_residual(const BiPoly& p, double x, double y, int deg) {
  const double n = p.norm();
  if (n == 0.0) return 0.0;
  const double s = std::pow(std::max({1.0, std::abs(x), std::abs(y)}), deg);
  return std::abs(p.eval(x, y)) / (n * s);
}

// Value and gradient of p at (x, y).
Vec3 eval_with_gradient(const BiPoly& p, double x, double y) {
  Vec3 out = Vec3::Zero();
  for (int i = 0; i <= BiPoly::kMaxDeg; ++i) {
    for (int j = 0; j <= BiPoly::kMaxDeg; ++j) {
      const double c = p(i, j);
      if (c == 0.0) continue;
      out[0] += c * std::pow(x, i) * std::pow(y, j);
      if (i > 0) out[1] += c * i * std::pow(x, i - 1) * std::pow(y, j);
      if (j > 0) out[2] += c * j * std::pow(x, i) * std::pow(y, j - 1);
    }
  }
  return out;
}

}  // namespace


bool refine_root(std::span<const BiPoly* const> eqs, double& x, double& y, double max_shift) {
  std::vector<double> norms;
  for (const BiPoly* p : eqs) norms.push_back(std::max(p->norm(), 1e-300));
  const int n = static_cast<int>(eqs.size());
  const double x0 = x, y0 = y;
  for (int it = 0; it < 8; ++it) {
    Eigen::MatrixX2d jac(n, 2);
    Eigen::VectorXd f(n);
    for (int k = 0; k < n; ++k) {
      const Vec3 g = eval_with_gradient(*eqs[k], x, y) / norms[k];
      f[k] = g[0];
      jac(k, 0) = g[1];
      jac(k, 1) = g[2];
    }
    const Eigen::Vector2d step = jac.colPivHouseholderQr().solve(-f);
    if (!step.allFinite()) return false;
    x += step[0];
    y += step[1];
    if (std::hypot(x - x0, y - y0) > max_shift) {
      x = x0;
      y = y0;
      return false;
    }
    if (step.norm() <= 1e-15 * std::max({1.0, std::abs(x), std::abs(y)})) break;
  }
  return true;
}

// ---------------------------------------------------------------- geometry

AngMomCoeffs LineOfSight::coeffs() const {
  AngMomCoeffs k;
  k.D = q.cross(erho);
  k.E = erho.cross(eperp);
  k.F = q.cross(eperp) + erho.cross(qdot);
  k.G = q.cross(qdot);
  return k;
}

LineOfSight LineOfSight::rotated(const Mat3& rot) const {
  return LineOfSight{rot * q, rot * qdot, rot * erho, rot * eperp};
}

LineOfSight LineOfSight::scaled(double length_scale) const {
  return LineOfSight{q / length_scale, qdot / length_scale, erho, eperp};
}

LineOfSight line_of_sight(const LosFrame& frame, const ObserverState& obs) {
  return LineOfSight{obs.q, obs.qdot, frame.erho, frame.eperp};
}

LineOfSight line_of_sight(const Attributable& att, const ObserverState& obs) {
  return line_of_sight(att.frame(), obs);
}

// ---------------------------------------------------------------- system

AngMomSystem build_q(const LineOfSight& s1, const LineOfSight& s2) {
  const AngMomCoeffs k1 = s1.coeffs();
  const AngMomCoeffs k2 = s2.coeffs();
  const Vec3 w = k1.D.cross(k2.D);
  const double w2 = w.squaredNorm();
  const double dscale = k1.D.norm() * k2.D.norm();
  if (!(w2 > kEpsDeg * kEpsDeg * dscale * dscale) || !(dscale > 0.0)) {
    throw DegenerateError("build_q: D1 x D2 vanishes (degenerate geometry)");
  }

  // J = c2-part minus c1-part, without the rhodot terms
  const BiPoly rho1 = BiPoly::linear(1.0, 0.0, 0.0);
  const BiPoly rho2 = BiPoly::linear(0.0, 1.0, 0.0);
  const BiPolyVec3 j = BiPolyVec3::times(k2.E, rho2 * rho2) + BiPolyVec3::times(k2.F, rho2) +
                       BiPolyVec3::constant(k2.G - k1.G) - BiPolyVec3::times(k1.E, rho1 * rho1) -
                       BiPolyVec3::times(k1.F, rho1);

  AngMomSystem sys;
  sys.d1_cross_d2 = w;
  sys.rhodots.rhodot1 = dot(j, k2.D.cross(w)) * (1.0 / w2);
  sys.rhodots.rhodot2 = dot(j, k1.D.cross(w)) * (1.0 / w2);

  ConicQ& q = sys.q;
  q.q20 = -k1.E.dot(w);
  q.q10 = -k1.F.dot(w);
  q.q02 = k2.E.dot(w);
  q.q01 = k2.F.dot(w);
  q.q00 = (k2.G - k1.G).dot(w);

  q.rho1_second = safe_ratio(triple(s1.q, s1.qdot, s1.erho), triple(s1.erho, s1.eperp, s1.q));
  q.rho2_second = safe_ratio(triple(s2.q, s2.qdot, s2.erho), triple(s2.erho, s2.eperp, s2.q));
  q.rho1_prime = safe_ratio(triple(s1.q, s2.q, s2.erho), triple(s1.erho, s2.erho, s2.q));
  q.rho2_prime = safe_ratio(triple(s1.q, s2.q, s1.erho), triple(s1.erho, s2.erho, s1.q));
  return sys;
}

XiSystem build_xi_p1_p2(const LineOfSight& s1, const LineOfSight& s2,
                        const RhoDotPolys& rhodots, bool strict) {
  const BiPoly rho1 = BiPoly::linear(1.0, 0.0, 0.0);
  const BiPoly rho2 = BiPoly::linear(0.0, 1.0, 0.0);

  const BiPolyVec3 r1 = BiPolyVec3::constant(s1.q) + BiPolyVec3::times(s1.erho, rho1);
  const BiPolyVec3 r2 = BiPolyVec3::constant(s2.q) + BiPolyVec3::times(s2.erho, rho2);
  const BiPolyVec3 v1 = BiPolyVec3::constant(s1.qdot) + BiPolyVec3::times(s1.erho, rhodots.rhodot1) +
                        BiPolyVec3::times(s1.eperp, rho1);
  const BiPolyVec3 v2 = BiPolyVec3::constant(s2.qdot) + BiPolyVec3::times(s2.erho, rhodots.rhodot2) +
                        BiPolyVec3::times(s2.eperp, rho2);
  const BiPolyVec3 dr = r1 - r2;

  // xi = 1/2 (|v2|^2 - |v1|^2) r1 x r2 - (v1.r1) v1 x dr + (v2.r2) v2 x dr
  const BiPoly half_dv2 = (dot(v2, v2) - dot(v1, v1)) * 0.5;
  XiSystem out;
  out.xi = half_dv2 * cross(r1, r2) - dot(v1, r1) * cross(v1, dr) + dot(v2, r2) * cross(v2, dr);

  out.p1 = dot(out.xi, s1.erho);
  out.p2 = dot(out.xi, s2.erho);

  const double scale = out.xi.norm();
  for (int i = 0; i <= BiPoly::kMaxDeg; ++i) {
    for (int jj = 0; jj <= BiPoly::kMaxDeg; ++jj) {
      if (i + jj > 5) {
        drop_structural(out.p1, i, jj, scale, "p1 total-degree > 5");
        drop_structural(out.p2, i, jj, scale, "p2 total-degree > 5");
      }
    }
  }
  if (strict) {
    drop_structural(out.p1, 5, 0, scale, "p1");
    drop_structural(out.p2, 0, 5, scale, "p2");
  }
  return out;
}

namespace {

// q20^m p(x1) p(x2) over the roots x1, x2 of q in rho1, written through the
// symmetric functions of the roots so that no power of 1/q20 appears:
//   W_k = q20^k (x1^k + x2^k),  W_k = -q10 W_{k-1} - q20 b0 W_{k-2}
//   u = sum_i a_i^2 q20^{m-i} b0^i + sum_{i>j} a_i a_j q20^{m-i} b0^j W_{i-j}
// Expanding the reduced linear form instead loses digits to cancellation
// when q20 is small.
UniPoly root_product_eliminant(const BiPoly& p, const ConicQ& q, int m) {
  const std::vector<UniPoly> a = p.in_rho1();
  const UniPoly b0 = q.b0();
  std::vector<UniPoly> w(m + 1);
  w[0] = UniPoly::constant(2.0);
  if (m >= 1) w[1] = UniPoly::constant(-q.q10);
  for (int k = 2; k <= m; ++k) w[k] = w[k - 1] * (-q.q10) - (b0 * w[k - 2]) * q.q20;
  std::vector<UniPoly> b0_pow(m + 1);
  b0_pow[0] = UniPoly::constant(1.0);
  for (int k = 1; k <= m; ++k) b0_pow[k] = b0_pow[k - 1] * b0;

  UniPoly u = UniPoly::constant(0.0);
  for (int i = 0; i <= m; ++i) {
    if (a[i].is_zero()) continue;
    const double lead = std::pow(q.q20, m - i);
    u += (a[i] * a[i]) * b0_pow[i] * lead;
    for (int j = 0; j < i; ++j) {
      if (a[j].is_zero()) continue;
      u += (a[i] * a[j]) * (b0_pow[j] * w[i - j]) * lead;
    }
  }
  return u;
}

}  // namespace

Elimination eliminate(const BiPoly& p1, const BiPoly& p2, const ConicQ& q,
                      double defl1, double defl2, double defl_tol) {
  const QReduction red = q_reduction(q);
  Elimination e;
  e.red1 = reduce_mod_q(p1, red);
  e.red2 = reduce_mod_q(p2, red);

  const int m1 = std::max(1, p1.degree_in(Var::Rho1));
  const int m2 = std::max(1, p2.degree_in(Var::Rho1));
  e.u1 = root_product_eliminant(p1, q, m1);
  e.u2 = root_product_eliminant(p2, q, m2);
  e.v1 = e.u1 * std::pow(q.q20, 1 - m1);
  e.v2 = e.u2 * std::pow(q.q20, 1 - m2);

  if (!std::isfinite(defl1) || !std::isfinite(defl2)) {
    throw DegenerateError("eliminate: extraneous roots undefined (critical points not finite)");
  }
  e.defl1 = deflate(e.u1, defl1, defl_tol);
  e.defl2 = deflate(e.u2, defl2, defl_tol);
  e.u1_tilde = e.defl1.quotient;
  e.u2_tilde = e.defl2.quotient;
  return e;
}

// ---------------------------------------------------------------- diagnostics

bool NonDegeneracyReport::all_pass() const {
  return std::all_of(conditions.begin(), conditions.end(),
                     [](const NonDegeneracyCondition& c) { return c.pass; });
}

bool NonDegeneracyReport::group_pass(int group) const {
  return std::all_of(conditions.begin(), conditions.end(), [&](const NonDegeneracyCondition& c) {
    return c.group != group || c.pass;
  });
}

NonDegeneracyReport nondegeneracy_report(const LineOfSight& s1, const LineOfSight& s2,
                                         const LinkagePolys* polys, double eps) {
  NonDegeneracyReport rep;
  auto add = [&](int group, std::string name, double mag) {
    const double m = std::isfinite(mag) ? std::abs(mag) : 0.0;
    rep.conditions.push_back({group, std::move(name), m, m > eps});
  };
  auto ratio = [](double num, double den) { return den > 0.0 ? num / den : 0.0; };

  const AngMomCoeffs k1 = s1.coeffs();
  const AngMomCoeffs k2 = s2.coeffs();
  const Vec3 w = k1.D.cross(k2.D);
  const double wn = w.norm();

  add(1, "E1.D1xD2", ratio(k1.E.dot(w), k1.E.norm() * wn));
  add(1, "E2.D1xD2", ratio(k2.E.dot(w), k2.E.norm() * wn));
  add(1, "D1xD2", ratio(wn, k1.D.norm() * k2.D.norm()));
  add(1, "erho1xeperp1.q1", ratio(triple(s1.erho, s1.eperp, s1.q), s1.eperp.norm() * s1.q.norm()));
  add(1, "erho2xeperp2.q2", ratio(triple(s2.erho, s2.eperp, s2.q), s2.eperp.norm() * s2.q.norm()));
  add(1, "erho1xerho2.q1", ratio(triple(s1.erho, s2.erho, s1.q), s1.q.norm()));
  add(1, "erho1xerho2.q2", ratio(triple(s1.erho, s2.erho, s2.q), s2.q.norm()));

  const double s = std::max(s1.q.norm(), s2.q.norm());
  add(2, "q1xq2", ratio(s1.q.cross(s2.q).norm(), s1.q.norm() * s2.q.norm()));

  const double r1pp = safe_ratio(triple(s1.q, s1.qdot, s1.erho), triple(s1.erho, s1.eperp, s1.q));
  const double r2pp = safe_ratio(triple(s2.q, s2.qdot, s2.erho), triple(s2.erho, s2.eperp, s2.q));
  const double r1p = safe_ratio(triple(s1.q, s2.q, s2.erho), triple(s1.erho, s2.erho, s2.q));
  const double r2p = safe_ratio(triple(s1.q, s2.q, s1.erho), triple(s1.erho, s2.erho, s1.q));
  add(2, "rho1'-rho1''", ratio(r1p - r1pp, s));
  add(2, "rho2'-rho2''", ratio(r2p - r2pp, s));
  add(2, "rho1''", ratio(r1pp, s));
  add(2, "rho2''", ratio(r2pp, s));

  add(3, "erho1xeperp1.qdot1",
      ratio(triple(s1.erho, s1.eperp, s1.qdot), s1.eperp.norm() * s1.qdot.norm()));
  add(3, "erho2xeperp2.qdot2",
      ratio(triple(s2.erho, s2.eperp, s2.qdot), s2.eperp.norm() * s2.qdot.norm()));

  const Vec3 dq = s1.q - s2.q;
  add(4, "Deltaq.erho1xerho2", ratio(triple(s1.erho, s2.erho, dq), dq.norm()));

  if (polys != nullptr) {
    const ConicQ& q = polys->q;
    add(5, "p1(P2)", rel_poly_residual(polys->p1, q.rho1_prime, q.rho2_second, 5));
    add(5, "p2(P1)", rel_poly_residual(polys->p2, q.rho1_second, q.rho2_prime, 5));
  } else {
    add(5, "p1(P2)", 0.0);
    add(5, "p2(P1)", 0.0);
  }
  return rep;
}

// ---------------------------------------------------------------- solve

LinkagePolys build_linkage_polys(const LineOfSight& s1, const LineOfSight& s2,
                                 const LinkageConfig& cfg) {
  const AngMomSystem am = build_q(s1, s2);
  const XiSystem xs = build_xi_p1_p2(s1, s2, am.rhodots);

  LinkagePolys polys;
  polys.q = am.q;
  polys.rhodots = am.rhodots;
  polys.xi = xs.xi;
  polys.p1 = xs.p1;
  polys.p2 = xs.p2;
  if (!cfg.eliminate_rho2) {
    polys.elim = eliminate(polys.p1, polys.p2, polys.q, polys.q.rho2_prime,
                           polys.q.rho2_second, cfg.tau_defl);
  } else {
    polys.elim = eliminate(polys.p1.transposed(), polys.p2.transposed(), transposed(polys.q),
                           polys.q.rho1_second, polys.q.rho1_prime, cfg.tau_defl);
  }
  return polys;
}

LinkageResult solve_linkage(const LineOfSight& s1_in, const LineOfSight& s2_in,
                            const LinkageConfig& cfg) {
  double scale = std::max(s1_in.q.norm(), s2_in.q.norm());
  if (!(scale > 0.0)) scale = 1.0;
  const LineOfSight s1 = s1_in.scaled(scale);
  const LineOfSight s2 = s2_in.scaled(scale);

  LinkageResult res;
  res.rho_scale = scale;
  res.polys = build_linkage_polys(s1, s2, cfg);
  res.report = nondegeneracy_report(s1, s2, &res.polys, cfg.eps_deg);

  const Elimination& e = res.polys.elim;
  for (const auto* d : {&e.defl1, &e.defl2}) {
    const double rel = std::abs(d->remainder) / std::max(d->quotient.norm(), 1e-300);
    if (d->warning) {
      std::ostringstream msg;
      msg << "deflation remainder " << rel << " above tolerance";
      res.diagnostics.push_back(msg.str());
    }
  }
  auto escalated = [&](const Deflation& d, const UniPoly& u, double root) {
    return std::abs(d.remainder) >
           cfg.defl_escalate * u.norm() * std::pow(std::max(1.0, std::abs(root)), u.degree());
  };
  const double root1 = cfg.eliminate_rho2 ? res.polys.q.rho1_second : res.polys.q.rho2_prime;
  const double root2 = cfg.eliminate_rho2 ? res.polys.q.rho1_prime : res.polys.q.rho2_second;
  if (escalated(e.defl1, e.u1, root1) || escalated(e.defl2, e.u2, root2)) {
    throw DegenerateError("solve_linkage: extraneous root not found in eliminant (near-degenerate geometry)");
  }

  const UniPoly& ua = e.u1_tilde;
  const UniPoly& ub = e.u2_tilde;
  const int deg_b = ub.degree();
  const double ub_norm = ub.norm();

  const std::vector<PolyRoot> roots = poly_roots(ua, cfg.roots);
  for (const PolyRoot& r : roots) {
    RawRoot raw;
    raw.value = r.z * scale;
    raw.real = std::abs(r.z.imag()) < cfg.imag_tol * (1.0 + std::abs(r.z.real()));
    raw.cross_residual = std::abs(ub.eval(r.z)) /
                         (ub_norm * std::pow(std::max(1.0, std::abs(r.z)), std::max(deg_b, 0)));
    raw.cross_validated = raw.cross_residual < cfg.tau_x;
    res.roots.push_back(raw);
    if (!raw.real || !raw.cross_validated) continue;

    const double kept = r.z.real();
    const double a11 = e.red1.a1.eval(kept), a10 = e.red1.a0.eval(kept);
    const double a21 = e.red2.a1.eval(kept), a20 = e.red2.a0.eval(kept);
    const double other = std::abs(a11) >= std::abs(a21) ? -a10 / a11 : -a20 / a21;
    if (!std::isfinite(other)) {
      res.diagnostics.push_back("back-substitution denominator vanished");
      continue;
    }
    double x = cfg.eliminate_rho2 ? kept : other;   // scaled rho1
    double y = cfg.eliminate_rho2 ? other : kept;   // scaled rho2
    const BiPoly qb = res.polys.q.as_bipoly();
    const std::array<const BiPoly*, 3> eqs{&qb, &res.polys.p1, &res.polys.p2};
    if (cfg.refine &&
        !refine_root(eqs, x, y, cfg.refine_max_shift * std::max(1.0, std::hypot(x, y)))) {
      res.diagnostics.push_back("refinement rejected; keeping back-substituted root");
    }

    RawSolution sol;
    sol.rho1 = x * scale;
    sol.rho2 = y * scale;
    sol.rhodot1 = res.polys.rhodots.rhodot1.eval(x, y) * scale;
    sol.rhodot2 = res.polys.rhodots.rhodot2.eval(x, y) * scale;
    const double sq = std::pow(std::max({1.0, std::abs(x), std::abs(y)}), 2);
    sol.res_q = std::abs(res.polys.q.eval(x, y)) / (res.polys.q.scale() * sq);
    sol.res_p1 = rel_poly_residual(res.polys.p1, x, y, 5);
    sol.res_p2 = rel_poly_residual(res.polys.p2, x, y, 5);
    sol.cross_residual = raw.cross_residual;
    res.solutions.push_back(sol);
  }
  return res;
}

LinkageResult solve_linkage(const Attributable& a1, const Attributable& a2,
                            const ObserverState& o1, const ObserverState& o2,
                            const LinkageConfig& cfg) {
  return solve_linkage(line_of_sight(a1, o1), line_of_sight(a2, o2), cfg);
}

}  // namespace tsalink
