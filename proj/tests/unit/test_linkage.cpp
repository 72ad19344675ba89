/*
 * Copyright 2026 The tsalink Authors
 *
 * This software is licensed under the terms of the Apache Licence Version 2.0
 * which can be obtained at http://www.apache.org/licenses/LICENSE-2.0.
 */
#include <algorithm>
#include <cmath>
#include <random>

#include <doctest.h>

#include "support/synthetic.hpp"
#include "tsalink/linkage.hpp"

using namespace tsalink;
using namespace tsalink::testing;

namespace {

/// sum |c_ij| |x|^i |y|^j: the rounding scale of an evaluation.
double abs_scale(const BiPoly& p, double x, double y) {
  double s = 0.0;
  for (int i = 0; i <= BiPoly::kMaxDeg; ++i)
    for (int j = 0; j <= BiPoly::kMaxDeg; ++j)
      s += std::abs(p(i, j)) * std::pow(std::abs(x), i) * std::pow(std::abs(y), j);
  return s;
}

double rel_eval(const BiPoly& p, double x, double y) {
  return std::abs(p.eval(x, y)) / std::max(abs_scale(p, x, y), 1e-300);
}

Vec3 c_at(const LineOfSight& s, double rho, double rhodot) { return s.coeffs().eval(rho, rhodot); }

}  // namespace

TEST_SUITE("linkage") {

TEST_CASE("conic coefficients match the closed forms") {
  std::mt19937_64 gen(41);
  for (int trial = 0; trial < 100; ++trial) {
    const auto [s1, s2] = random_geometry(gen);
    const AngMomSystem am = build_q(s1, s2);
    const double q20 = -s1.erho.cross(s1.eperp).dot(s1.q) * s1.erho.cross(s2.erho).dot(s2.q);
    const double q02 = s2.erho.cross(s2.eperp).dot(s2.q) * s1.erho.cross(s2.erho).dot(s1.q);
    CHECK(std::abs(am.q.q20 - q20) < 1e-12 * std::abs(q20));
    CHECK(std::abs(am.q.q02 - q02) < 1e-12 * std::abs(q02));
  }
}

TEST_CASE("range rates make the angular momenta parallel to D1 x D2 identically") {
  std::mt19937_64 gen(42);
  for (int trial = 0; trial < 50; ++trial) {
    const auto [s1, s2] = random_geometry(gen);
    const AngMomSystem am = build_q(s1, s2);
    const AngMomCoeffs k1 = s1.coeffs(), k2 = s2.coeffs();
    const BiPoly r1 = BiPoly::linear(1, 0, 0), r2 = BiPoly::linear(0, 1, 0);
    const BiPolyVec3 c1 = BiPolyVec3::times(k1.D, am.rhodots.rhodot1) +
                          BiPolyVec3::times(k1.E, r1 * r1) + BiPolyVec3::times(k1.F, r1) +
                          BiPolyVec3::constant(k1.G);
    const BiPolyVec3 c2 = BiPolyVec3::times(k2.D, am.rhodots.rhodot2) +
                          BiPolyVec3::times(k2.E, r2 * r2) + BiPolyVec3::times(k2.F, r2) +
                          BiPolyVec3::constant(k2.G);
    const BiPolyVec3 dc = c1 - c2;
    const BiPolyVec3 perp = cross(dc, BiPolyVec3::constant(am.d1_cross_d2));
    CHECK(perp.norm() < 1e-11 * std::max(1.0, dc.norm() * am.d1_cross_d2.norm()));
    // and the remaining component is q
    const BiPoly along = dot(dc, am.d1_cross_d2);
    const double off = std::min((along + am.q.as_bipoly()).norm(), (along - am.q.as_bipoly()).norm());
    CHECK(off < 1e-12 * am.q.as_bipoly().norm());
  }
}

TEST_CASE("critical point identities on random geometry") {
  std::mt19937_64 gen(43);
  for (int trial = 0; trial < 100; ++trial) {
    const auto [s1, s2] = random_geometry(gen);
    const LinkagePolys polys = build_linkage_polys(s1, s2);
    const ConicQ& q = polys.q;
    const double x = q.rho1_second, y = q.rho2_second;
    const double mag = q.scale() * std::max({1.0, x * x, y * y});
    // C lies on q and both angular momenta vanish there
    CHECK(std::abs(q.eval(x, y)) < 1e-9 * mag);
    const Vec3 c1 = c_at(s1, x, polys.rhodots.rhodot1.eval(x, y));
    const Vec3 c2 = c_at(s2, y, polys.rhodots.rhodot2.eval(x, y));
    const double cscale = s1.coeffs().G.norm() + s2.coeffs().G.norm();
    CHECK(c1.norm() < 1e-9 * cscale * std::max({1.0, x * x, y * y}));
    CHECK(c2.norm() < 1e-9 * cscale * std::max({1.0, x * x, y * y}));
    // xi does not vanish at C
    CHECK(polys.xi.eval(x, y).norm() > 1e-6 * polys.xi.norm());
    // P1 and P2 are extraneous roots of p1 and p2
    CHECK(rel_eval(polys.p1, q.rho1_second, q.rho2_prime) < 1e-8);
    CHECK(rel_eval(polys.p2, q.rho1_prime, q.rho2_second) < 1e-8);
  }
}

TEST_CASE("top-degree coefficients of xi are parallel to erho1 x erho2") {
  std::mt19937_64 gen(44);
  for (int trial = 0; trial < 100; ++trial) {
    const auto [s1, s2] = random_geometry(gen);
    const AngMomSystem am = build_q(s1, s2);
    const XiSystem xs = build_xi_p1_p2(s1, s2, am.rhodots);
    const Vec3 n = s1.erho.cross(s2.erho).normalized();
    const double scale = xs.xi.norm();
    for (int i = 0; i <= 6; ++i) {
      const Vec3 c = xs.xi.coeff(i, 6 - i);
      CHECK(c.cross(n).norm() < 1e-9 * scale);
    }
    CHECK(xs.xi.coeff(6, 0).norm() + xs.xi.coeff(0, 6).norm() < 1e-9 * scale);
    CHECK(xs.p1.total_degree(1e-12) == 5);
    CHECK(xs.p2.total_degree(1e-12) == 5);
    CHECK(xs.p1.degree_in(Var::Rho1, 1e-12) == 4);
    CHECK(xs.p2.degree_in(Var::Rho2, 1e-12) == 4);
  }
}

TEST_CASE("eliminants agree with the Sylvester resultant") {
  std::mt19937_64 gen(45);
  for (int trial = 0; trial < 50; ++trial) {
    const auto [s1, s2] = random_geometry(gen);
    const LinkagePolys polys = build_linkage_polys(s1, s2);
    const BiPoly qb = polys.q.as_bipoly();
    for (int j = 0; j < 2; ++j) {
      const BiPoly& p = j == 0 ? polys.p1 : polys.p2;
      const UniPoly& u = j == 0 ? polys.elim.u1 : polys.elim.u2;
      const UniPoly res = sylvester_resultant(p, qb, Var::Rho1);
      const int deg = std::max(res.degree(), u.degree());
      const double norm = u.norm();
      // sign convention of the Sylvester matrix is not fixed
      double same = 0.0, flip = 0.0;
      for (int k = 0; k <= deg; ++k) {
        same = std::max(same, std::abs(res[k] - u[k]));
        flip = std::max(flip, std::abs(res[k] + u[k]));
      }
      CHECK(std::min(same, flip) < 1e-8 * norm);
    }
    CHECK(polys.elim.u1.degree(1e-12) == 10);
    CHECK(polys.elim.u2.degree(1e-12) == 10);
  }
}

TEST_CASE("deflated eliminants share their degree-9 root set") {
  std::mt19937_64 gen(46);
  int pass = 0, total = 0;
  for (int trial = 0; trial < 100; ++trial) {
    const auto [s1, s2] = random_geometry(gen);
    const LinkagePolys polys = build_linkage_polys(s1, s2);
    const UniPoly& a = polys.elim.u1_tilde;
    const UniPoly& b = polys.elim.u2_tilde;
    CHECK(a.degree(1e-12) == 9);
    CHECK(b.degree(1e-12) == 9);
    double worst = 0.0;
    for (const PolyRoot& r : poly_roots(a))
      worst = std::max(worst, std::abs(b.eval(r.z)) / (b.norm() * std::pow(std::max(1.0, std::abs(r.z)), 9)));
    ++total;
    if (worst < 1e-6) ++pass;
  }
  MESSAGE("cross-validated " << pass << "/" << total);
  CHECK(pass >= 99);
}

TEST_CASE("a conic without rho1^2 term cannot be eliminated") {
  ConicQ q;
  q.q02 = 1.0;
  q.q10 = 1.0;
  q.q00 = -1.0;
  BiPoly p = BiPoly::linear(1, 1, 1);
  CHECK_THROWS_AS(eliminate(p, p, q, 0.0, 0.0), DegenerateError);
}

TEST_CASE("coincident geometry is degenerate") {
  std::mt19937_64 gen(47);
  const auto [s1, s2] = random_geometry(gen);
  CHECK_THROWS_AS(build_q(s1, s1), DegenerateError);
  const NonDegeneracyReport rep = nondegeneracy_report(s1, s1, nullptr);
  CHECK_FALSE(rep.all_pass());
  CHECK_FALSE(rep.group_pass(1));
  CHECK_FALSE(rep.group_pass(2));
}

TEST_CASE("generic geometry passes every non-degeneracy condition") {
  std::mt19937_64 gen(48);
  int fails = 0;
  for (int trial = 0; trial < 200; ++trial) {
    const auto [s1, s2] = random_geometry(gen);
    const LinkagePolys polys = build_linkage_polys(s1, s2);
    const NonDegeneracyReport rep = nondegeneracy_report(s1, s2, &polys);
    for (int g = 1; g <= 5; ++g) {
      const bool present = std::any_of(rep.conditions.begin(), rep.conditions.end(),
                                       [&](const NonDegeneracyCondition& c) { return c.group == g; });
      CHECK(present);
    }
    if (!rep.all_pass()) ++fails;
  }
  CHECK(fails <= 2);
}

TEST_CASE("synthetic two-body pairs are recovered") {
  std::mt19937_64 gen(49);
  int recovered = 0, flagged = 0;
  for (int trial = 0; trial < 20; ++trial) {
    const SyntheticPair p = heliocentric_pair(gen);
    const LineOfSight l1 = line_of_sight(p.a1, p.o1), l2 = line_of_sight(p.a2, p.o2);

    const AngMomSystem am = build_q(l1, l2);
    CHECK(rel_eval(am.q.as_bipoly(), p.rho1, p.rho2) < 1e-9);
    const XiSystem xs = build_xi_p1_p2(l1, l2, am.rhodots);
    CHECK(xs.xi.eval(p.rho1, p.rho2).norm() < 1e-8 * xs.xi.norm() *
                                                   std::pow(std::max({1.0, p.rho1, p.rho2}), 6));

    const LinkageResult res = solve_linkage(p.a1, p.a2, p.o1, p.o2);
    CHECK(res.solutions.size() <= 9);
    int real_validated = 0;
    for (const RawRoot& r : res.roots) real_validated += r.real && r.cross_validated;
    CHECK(static_cast<int>(res.solutions.size()) <= real_validated);
    double err = 0.0;
    closest_solution(res.solutions, p, err);
    if (err < 1e-8) ++recovered;
    if (!res.report.all_pass()) ++flagged;
  }
  MESSAGE("recovered " << recovered << "/20, flagged " << flagged);
  CHECK(recovered + flagged >= 20);
  CHECK(recovered >= 19);
}

TEST_CASE("mirror elimination finds the same solutions") {
  std::mt19937_64 gen(50);
  for (int trial = 0; trial < 10; ++trial) {
    const SyntheticPair p = heliocentric_pair(gen);
    LinkageConfig mirror;
    mirror.eliminate_rho2 = true;
    const LinkageResult a = solve_linkage(p.a1, p.a2, p.o1, p.o2);
    const LinkageResult b = solve_linkage(p.a1, p.a2, p.o1, p.o2, mirror);
    double ea = 0.0, eb = 0.0;
    closest_solution(a.solutions, p, ea);
    closest_solution(b.solutions, p, eb);
    CHECK(ea < 1e-6);
    CHECK(eb < 1e-6);
  }
}

TEST_CASE("solutions scale with the length unit") {
  std::mt19937_64 gen(51);
  const SyntheticPair p = heliocentric_pair(gen);
  const LineOfSight l1 = line_of_sight(p.a1, p.o1), l2 = line_of_sight(p.a2, p.o2);
  const double lambda = 1.495978707e8;
  LineOfSight k1 = l1, k2 = l2;
  k1.q *= lambda;
  k1.qdot *= lambda;
  k2.q *= lambda;
  k2.qdot *= lambda;
  const LinkageResult a = solve_linkage(l1, l2);
  const LinkageResult b = solve_linkage(k1, k2);
  REQUIRE(a.solutions.size() == b.solutions.size());
  for (std::size_t i = 0; i < a.solutions.size(); ++i) {
    CHECK(b.solutions[i].rho1 == doctest::Approx(lambda * a.solutions[i].rho1).epsilon(1e-9));
    CHECK(b.solutions[i].rho2 == doctest::Approx(lambda * a.solutions[i].rho2).epsilon(1e-9));
  }
}

TEST_CASE("refinement keeps roots on the equations") {
  std::mt19937_64 gen(52);
  const SyntheticPair p = heliocentric_pair(gen);
  const LinkageResult res = solve_linkage(p.a1, p.a2, p.o1, p.o2);
  for (const RawSolution& s : res.solutions) {
    CHECK(s.res_q < 1e-10);
    CHECK(s.res_p1 < 1e-8);
    CHECK(s.res_p2 < 1e-8);
  }
  // refine_root refuses to move far
  const BiPoly qb = res.polys.q.as_bipoly();
  const std::array<const BiPoly*, 3> eqs{&qb, &res.polys.p1, &res.polys.p2};
  double x = 0.123, y = 0.456;
  const bool moved = refine_root(eqs, x, y, 1e-9);
  if (!moved) {
    CHECK(x == 0.123);
    CHECK(y == 0.456);
  }
}

}
