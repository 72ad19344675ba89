/*
 * Copyright 2026 The tsalink Authors
 *
 * This software is licensed under the terms of the Apache Licence Version 2.0
 * which can be obtained at http://www.apache.org/licenses/LICENSE-2.0.
 */
#pragma once

// Linkage of two attributables through conservation of angular momentum and
// the Laplace-Lenz/energy combination (K1 - K2) x (r1 - r2) = 0.
//
// Angular momentum gives the range rates as quadratics in (rho1, rho2) plus
// the conic q; xi = DeltaK x Deltar projected on the two lines of sight gives
// p1, p2 of total degree 5. Eliminating rho1 modulo q yields two degree-10
// polynomials in rho2 sharing a degree-9 factor after one extraneous root is
// divided out of each.

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "tsalink/attributable.hpp"
#include "tsalink/bipoly.hpp"
#include "tsalink/geometry.hpp"

namespace tsalink {

/// The per-epoch vectors the polynomial system depends on.
struct LineOfSight {
  Vec3 q;
  Vec3 qdot;
  Vec3 erho;
  Vec3 eperp;

  AngMomCoeffs coeffs() const;
  /// Same geometry seen through a rotation of the inertial frame.
  LineOfSight rotated(const Mat3& rot) const;
  LineOfSight scaled(double length_scale) const;
};

LineOfSight line_of_sight(const Attributable& att, const ObserverState& obs);
LineOfSight line_of_sight(const LosFrame& frame, const ObserverState& obs);

struct RhoDotPolys {
  BiPoly rhodot1;
  BiPoly rhodot2;
};

struct AngMomSystem {
  ConicQ q;
  RhoDotPolys rhodots;
  Vec3 d1_cross_d2;
};

struct XiSystem {
  BiPolyVec3 xi;
  BiPoly p1;
  BiPoly p2;
};

/// Two degree-10 eliminants and their degree-9 quotients.
struct Elimination {
  LinearInRho1 red1;
  LinearInRho1 red2;
  UniPoly v1, v2;
  UniPoly u1, u2;
  UniPoly u1_tilde, u2_tilde;
  Deflation defl1, defl2;
};

struct LinkagePolys {
  ConicQ q;
  RhoDotPolys rhodots;
  BiPolyVec3 xi;
  BiPoly p1, p2;
  Elimination elim;
};

/// Throws DegenerateError when D1 x D2 vanishes.
AngMomSystem build_q(const LineOfSight& s1, const LineOfSight& s2);

/// xi = DeltaK x Deltar with the range rates substituted; p_j = xi . erho_j.
/// Total-degree-6 terms of p_j (and the structurally absent rho1^5 of p1,
/// rho2^5 of p2) are checked to vanish and removed.
/// strict = false keeps the rho1^5 / rho2^5 terms (rotated epoch-1 geometry
/// for q and xi need not cancel them).
XiSystem build_xi_p1_p2(const LineOfSight& s1, const LineOfSight& s2,
                        const RhoDotPolys& rhodots, bool strict = true);

/// Gauss-Newton on eqs = 0 (normalized by coefficient norm) from (x, y).
/// Restores the start and returns false if the iterate moves beyond max_shift.
bool refine_root(std::span<const BiPoly* const> eqs, double& x, double& y, double max_shift);

/// Elimination of rho1: vj = q20 a_j0^2 - q10 a_j0 a_j1 + b0 a_j1^2,
/// u_j = q20^(m_j - 1) v_j with m_j = deg_rho1(p_j), then u1 / (rho2 - defl1)
/// and u2 / (rho2 - defl2).
Elimination eliminate(const BiPoly& p1, const BiPoly& p2, const ConicQ& q,
                      double defl1, double defl2, double defl_tol = 1e-6);

struct NonDegeneracyCondition {
  int group = 0;  ///< 1..5
  std::string name;
  double magnitude = 0.0;  ///< normalized, dimensionless
  bool pass = false;
};

struct NonDegeneracyReport {
  std::vector<NonDegeneracyCondition> conditions;
  bool all_pass() const;
  bool group_pass(int group) const;
};

/// Evaluates all five condition groups. Group 5 needs the polynomials; it
/// fails with magnitude 0 when they are unavailable.
NonDegeneracyReport nondegeneracy_report(const LineOfSight& s1, const LineOfSight& s2,
                                         const LinkagePolys* polys,
                                         double eps = kEpsDeg);

struct LinkageConfig {
  double tau_x = 1e-6;
  double tau_defl = 1e-6;
  /// Deflation remainders above this (relative) abort the linkage.
  double defl_escalate = 1e-4;
  /// |Im z| < imag_tol (1 + |Re z|) is treated as real.
  double imag_tol = 1e-7;
  double eps_deg = kEpsDeg;
  /// Mirror path: eliminate rho2 and keep rho1.
  bool eliminate_rho2 = false;
  /// Gauss-Newton polish of each real solution on (q, p1, p2).
  bool refine = true;
  /// Largest accepted refinement displacement, relative to max(1, |(rho1, rho2)|) scaled.
  double refine_max_shift = 1e-3;
  RootOptions roots;
};

struct RawRoot {
  Complex value;   ///< root of the kept range (physical units)
  bool real = false;
  double cross_residual = 0.0;
  bool cross_validated = false;
};

struct RawSolution {
  double rho1 = 0.0;
  double rho2 = 0.0;
  double rhodot1 = 0.0;
  double rhodot2 = 0.0;
  /// Normalized residuals of q, p1, p2 at the solution.
  double res_q = 0.0;
  double res_p1 = 0.0;
  double res_p2 = 0.0;
  double cross_residual = 0.0;
};

struct LinkageResult {
  /// Polynomials in the scaled ranges rho / rho_scale.
  LinkagePolys polys;
  double rho_scale = 1.0;
  NonDegeneracyReport report;
  std::vector<RawRoot> roots;
  std::vector<RawSolution> solutions;
  std::vector<std::string> diagnostics;
};

/// Builds the full chain in scaled variables (rho_scale = max |q_j|).
LinkagePolys build_linkage_polys(const LineOfSight& s1, const LineOfSight& s2,
                                 const LinkageConfig& cfg = {});

LinkageResult solve_linkage(const LineOfSight& s1, const LineOfSight& s2,
                            const LinkageConfig& cfg = {});

LinkageResult solve_linkage(const Attributable& a1, const Attributable& a2,
                            const ObserverState& o1, const ObserverState& o2,
                            const LinkageConfig& cfg = {});

}  // namespace tsalink
