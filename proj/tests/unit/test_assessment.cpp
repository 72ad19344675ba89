/*
 * Copyright 2026 The tsalink Authors
 *
 * This software is licensed under the terms of the Apache Licence Version 2.0
 * which can be obtained at http://www.apache.org/licenses/LICENSE-2.0.
 */
#include <cmath>
#include <random>

#include <doctest.h>
#include <Eigen/Eigenvalues>

#include "support/synthetic.hpp"
#include "tsalink/assessment.hpp"

using namespace tsalink;
using namespace tsalink::testing;

namespace {

using Vec8 = Eigen::Matrix<double, 8, 1>;

/// State on the conic with angular momentum c and Laplace-Lenz vector L at
/// true anomaly theta.
State6 conic_state(const Vec3& c, const Vec3& lenz, double theta, double mu) {
  const double p = c.squaredNorm() / mu;
  const double e = lenz.norm();
  const Vec3 P = lenz.normalized();
  const Vec3 Q = c.normalized().cross(P);
  State6 s;
  s.r = p / (1.0 + e * std::cos(theta)) * (std::cos(theta) * P + std::sin(theta) * Q);
  s.rdot = std::sqrt(mu / p) * (-std::sin(theta) * P + (e + std::cos(theta)) * Q);
  return s;
}

struct Nominal {
  SyntheticPair pair;
  LinkageResult result;
  LinkageSolution sol;
};

Nominal nominal_case(std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  for (;;) {
    Nominal n;
    n.pair = heliocentric_pair(gen);
    n.result = solve_linkage(n.pair.a1, n.pair.a2, n.pair.o1, n.pair.o2);
    double err = 0.0;
    const int k = closest_solution(n.result.solutions, n.pair, err);
    if (k < 0 || err > 1e-8) continue;
    AssessmentConfig cfg;
    const auto sols = assess_solutions(n.result, n.pair.a1, n.pair.a2, n.pair.o1, n.pair.o2, cfg);
    n.sol = sols[k];
    return n;
  }
}

}  // namespace

TEST_SUITE("assessment") {

TEST_CASE("physical filter") {
  RawSolution raw;
  raw.rho1 = 1.0;
  raw.rho2 = -0.5;
  State6 s;
  s.r = Vec3(1, 0, 0);
  s.rdot = Vec3(0, kGaussK, 0);
  AssessmentConfig cfg;
  CHECK(physical_filter(raw, s, s, cfg).negative_range);
  raw.rho2 = 0.5;
  const SolutionFlags ok = physical_filter(raw, s, s, cfg);
  CHECK_FALSE(ok.negative_range);
  CHECK_FALSE(ok.unbounded);
  CHECK(ok.accepted());
  State6 fast = s;
  fast.rdot *= 1.5;
  CHECK(physical_filter(raw, s, fast, cfg).unbounded);
  cfg.rho_max = 0.7;
  CHECK(physical_filter(RawSolution{0.9, 0.5}, s, s, cfg).out_of_range);
}

TEST_CASE("true solutions pass the spurious tests") {
  for (std::uint64_t seed : {71u, 72u, 73u, 74u, 75u}) {
    const Nominal n = nominal_case(seed);
    CHECK(n.sol.spurious.residual_intersys < 1e-9);
    const double dL = (integrals(n.sol.state1, kMuSun).lenz - integrals(n.sol.state2, kMuSun).lenz).norm();
    CHECK(dL < 1e-8);
    CHECK(n.sol.spurious.lenz_gap == doctest::Approx(2.0).epsilon(1e-7));
    CHECK(n.sol.flags.accepted());
    CHECK(n.sol.kepler1.has_value());
    CHECK(n.sol.kepler1->a == doctest::Approx(n.pair.elements.a).epsilon(1e-6));
  }
}

TEST_CASE("confocal pairs with |L1 - L2| = 2 are flagged") {
  std::mt19937_64 gen(76);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const double mu = 1.3;
  for (int trial = 0; trial < 100; ++trial) {
    const Vec3 c = random_unit(gen) * (0.5 + u(gen));
    Vec3 t = random_unit(gen);
    t = (t - t.dot(c.normalized()) * c.normalized()).normalized();
    const Vec3 L2 = t * (0.05 + 0.8 * u(gen));
    const double theta2 = 2.0 * kPi * u(gen);
    const State6 s2 = conic_state(c, L2, theta2, mu);
    const Vec3 L1 = L2 + 2.0 * s2.r.normalized();
    // relation between L1 - L2 and r2 holds by construction
    const Vec3 rhs = mu * (L1.squaredNorm() - L2.squaredNorm()) / (2.0 * c.squaredNorm()) * s2.r;
    CHECK(((L1 - L2) - rhs).norm() < 1e-12 * rhs.norm());
    // a point of orbit 1 with 1 + e cos(theta) > 0
    const double theta1 = 0.3 * (2.0 * u(gen) - 1.0) * std::acos(-1.0 / std::max(L1.norm(), 1.0 + 1e-9));
    const State6 s1 = conic_state(c, L1, theta1, mu);
    const Integrals i1 = integrals(s1, mu), i2 = integrals(s2, mu);
    CHECK((i1.c - i2.c).norm() < 1e-12 * c.norm());
    AssessmentConfig cfg;
    cfg.mu = mu;
    const SpuriousCheck sc = spurious_check(s1, s2, cfg);
    CHECK(sc.lenz_gap < 1e-10);
    CHECK(sc.spurious_fullsys);

    // the other branch of the dichotomy: same orbit, L1 = L2 and equal energies
    const State6 s3 = conic_state(c, L2, theta2 + 1.0, mu);
    const Integrals i3 = integrals(s3, mu);
    CHECK((i3.lenz - i2.lenz).norm() < 1e-10);
    CHECK(std::abs(i3.energy - i2.energy) < 1e-10 * std::abs(i2.energy));
    CHECK_FALSE(spurious_check(s3, s2, cfg).spurious_fullsys);
  }
}

TEST_CASE("coincident states are indeterminate") {
  State6 s;
  s.r = Vec3(1, 0.2, 0);
  s.rdot = Vec3(0, 1, 0);
  const SpuriousCheck sc = spurious_check(s, s, AssessmentConfig{});
  CHECK(sc.indeterminate);
}

TEST_CASE("analytic p1* gradients match central differences") {
  std::mt19937_64 gen(77);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int trial = 0; trial < 100; ++trial) {
    const Vec3 r1(u(gen), u(gen), u(gen)), v1(u(gen), u(gen), u(gen));
    const Vec3 r2(u(gen), u(gen), u(gen)), v2(u(gen), u(gen), u(gen));
    const Vec3 q1(u(gen), u(gen), u(gen));
    const P1StarGradient g = p1_star_gradient(r1, v1, r2, v2, q1);
    const double h = 1e-6;
    auto fd = [&](int which, int k) {
      Vec3 a[4] = {r1, v1, r2, v2};
      Vec3 b[4] = {r1, v1, r2, v2};
      a[which][k] += h;
      b[which][k] -= h;
      return (p1_star(a[0], a[1], a[2], a[3], q1) - p1_star(b[0], b[1], b[2], b[3], q1)) / (2 * h);
    };
    const Vec3* grads[4] = {&g.d_r1, &g.d_rdot1, &g.d_r2, &g.d_rdot2};
    for (int w = 0; w < 4; ++w) {
      Vec3 num;
      for (int k = 0; k < 3; ++k) num[k] = fd(w, k);
      CHECK((num - *grads[w]).norm() < 1e-6 * std::max(1.0, grads[w]->norm()));
    }
  }
}

TEST_CASE("dPhi/dR from the analytic formulas matches differences of the linkage map") {
  const Nominal n = nominal_case(78);
  const Vec8 A = pack_attributables(n.pair.a1, n.pair.a2);
  Vec4 R;
  R << n.sol.rho1, n.sol.rhodot1, n.sol.rho2, n.sol.rhodot2;
  const CovariancePack& pack = n.sol.covariance;
  REQUIRE(pack.available);
  Mat4 num;
  for (int k = 0; k < 4; ++k) {
    const double h = 1e-7 * std::max(1e-3, std::abs(R[k]));
    Vec4 rp = R, rm = R;
    rp[k] += h;
    rm[k] -= h;
    num.col(k) = (linkage_map(rp, A, n.pair.o1, n.pair.o2) - linkage_map(rm, A, n.pair.o1, n.pair.o2)) / (2 * h);
  }
  for (int k = 0; k < 4; ++k)
    CHECK((num.col(k) - pack.dPhi_dR.col(k)).norm() < 1e-6 * pack.dPhi_dR.col(k).norm());
}

TEST_CASE("covariance of the first state matches re-solved differences") {
  const Nominal n = nominal_case(79);
  const CovariancePack& pack = n.sol.covariance;
  REQUIRE(pack.available);
  const Vec8 A = pack_attributables(n.pair.a1, n.pair.a2);
  Eigen::Matrix<double, 6, 8> num;
  for (int k = 0; k < 8; ++k) {
    const double h = (k % 4) < 2 ? 1e-6 : 1e-6 * std::max(std::abs(A[(k / 4) * 4 + 2]), std::abs(A[(k / 4) * 4 + 3]));
    Eigen::Matrix<double, 6, 1> col[2];
    for (int s = 0; s < 2; ++s) {
      Attributable a1 = n.pair.a1, a2 = n.pair.a2;
      double* field[8] = {&a1.alpha, &a1.delta, &a1.alphadot, &a1.deltadot,
                          &a2.alpha, &a2.delta, &a2.alphadot, &a2.deltadot};
      *field[k] += s == 0 ? h : -h;
      const LinkageResult r = solve_linkage(a1, a2, n.pair.o1, n.pair.o2);
      double best = INFINITY;
      const RawSolution* pick = nullptr;
      for (const RawSolution& raw : r.solutions) {
        const double d = std::hypot(raw.rho1 - n.sol.rho1, raw.rho2 - n.sol.rho2);
        if (d < best) {
          best = d;
          pick = &raw;
        }
      }
      REQUIRE(pick != nullptr);
      const State6 st = eval_state(a1.frame(), n.pair.o1, pick->rho1, pick->rhodot1);
      col[s] << st.r, st.rdot;
    }
    num.col(k) = (col[0] - col[1]) / (2 * h);
  }
  for (int k = 0; k < 8; ++k) {
    const double rel = (num.col(k) - pack.dEcar1_dA.col(k)).norm() / pack.dEcar1_dA.col(k).norm();
    CHECK(rel < 1e-5);
  }
}

TEST_CASE("cartesian covariance is symmetric PSD and homogeneous in the input variance") {
  Nominal n = nominal_case(80);
  Vec4 R;
  R << n.sol.rho1, n.sol.rhodot1, n.sol.rho2, n.sol.rhodot2;
  Attributable a1 = n.pair.a1, a2 = n.pair.a2;
  a1.gamma = a2.gamma = Mat4::Identity() * 1e-12;
  const CovariancePack p1 = propagate_covariance(R, a1, a2, n.pair.o1, n.pair.o2);
  a1.gamma = a2.gamma = Mat4::Identity() * 4e-12;
  const CovariancePack p4 = propagate_covariance(R, a1, a2, n.pair.o1, n.pair.o2);
  REQUIRE(p1.available);
  CHECK((p4.gamma_car1 - 4.0 * p1.gamma_car1).norm() < 1e-12 * p4.gamma_car1.norm());
  CHECK((p1.gamma_car1 - p1.gamma_car1.transpose()).norm() == 0.0);
  Eigen::SelfAdjointEigenSolver<Mat6> es(p1.gamma_car1);
  CHECK(es.eigenvalues().minCoeff() >= -1e-12 * p1.gamma_car1.trace());
  CHECK(p1.gamma_A.block<4, 4>(0, 4).norm() == 0.0);
  CHECK(p1.gamma_A.block<4, 4>(4, 0).norm() == 0.0);
}

TEST_CASE("compatibility penalty") {
  const Nominal n = nominal_case(81);
  const Mat6* cov = &n.sol.covariance.gamma_car1;
  const double exact = compatibility_penalty(n.sol.state1, cov, n.pair.a2, n.pair.o2, kMuSun);
  CHECK(exact < 1e-3);
  CHECK(n.sol.penalty < 1e-3);

  // 10 sigma offset in alpha of the second attributable, against the same
  // distance built from a Monte Carlo covariance of the prediction
  Attributable off = n.pair.a2;
  const double sigma = std::sqrt(off.gamma(0, 0));
  off.alpha += 10.0 * sigma;
  const double shifted = compatibility_penalty(n.sol.state1, cov, off, n.pair.o2, kMuSun);
  const double dt = n.pair.a2.epoch - n.sol.state1.epoch;
  std::mt19937_64 mc(7);
  std::normal_distribution<double> g(0.0, 1.0);
  std::vector<Vec4> preds;
  for (int it = 0; it < 1000; ++it) {
    Attributable a1 = n.pair.a1, a2 = n.pair.a2;
    for (Attributable* a : {&a1, &a2}) {
      a->alpha += g(mc) * std::sqrt(a->gamma(0, 0));
      a->delta += g(mc) * std::sqrt(a->gamma(1, 1));
      a->alphadot += g(mc) * std::sqrt(a->gamma(2, 2));
      a->deltadot += g(mc) * std::sqrt(a->gamma(3, 3));
    }
    const LinkageResult r = solve_linkage(a1, a2, n.pair.o1, n.pair.o2);
    const RawSolution* pick = nullptr;
    double best = INFINITY;
    for (const RawSolution& raw : r.solutions) {
      const double d = std::hypot(raw.rho1 - n.sol.rho1, raw.rho2 - n.sol.rho2);
      if (d < best) {
        best = d;
        pick = &raw;
      }
    }
    REQUIRE(pick != nullptr);
    State6 st = eval_state(a1.frame(), n.pair.o1, pick->rho1, pick->rhodot1);
    preds.push_back(predict_attributable(propagate_two_body(st, dt, kMuSun), n.pair.o2));
  }
  Vec4 mean = Vec4::Zero();
  for (const Vec4& v : preds) mean += v / static_cast<double>(preds.size());
  Mat4 sample = Mat4::Zero();
  for (const Vec4& v : preds) sample += (v - mean) * (v - mean).transpose() / (preds.size() - 1.0);
  Vec4 d = Vec4::Zero();
  d[0] = 10.0 * sigma;
  const double oracle = std::sqrt(d.dot((n.pair.a2.gamma + sample).ldlt().solve(d)));
  MESSAGE("10 sigma penalty " << shifted << ", Monte Carlo oracle " << oracle);
  CHECK(shifted == doctest::Approx(oracle).epsilon(0.1));

  // wrong pairing: second arc of an unrelated orbit at the same epoch
  std::mt19937_64 gen(82);
  int checked = 0;
  for (int trial = 0; trial < 200; ++trial) {
    const SyntheticPair x = heliocentric_pair(gen);
    const State6 y0 = keplerian_to_cartesian(random_elements(gen, x.s1.epoch), kMuSun);
    const State6 y2 = propagate_two_body(y0, x.dt, kMuSun);
    const Attributable b2 = exact_attributable(y2, x.o2, 1e-6, 1e-7);
    LinkageResult r;
    try {
      r = solve_linkage(x.a1, b2, x.o1, x.o2);
    } catch (const Error&) {
      continue;
    }
    AssessmentConfig cfg;
    cfg.rho_min = 1e-3;
    for (const LinkageSolution& s : assess_solutions(r, x.a1, b2, x.o1, x.o2, cfg)) {
      if (!s.flags.accepted()) continue;
      ++checked;
      CHECK(s.penalty > 100.0);
    }
  }
  MESSAGE("wrong-pairing candidates checked: " << checked);
  CHECK(checked > 0);
}

TEST_CASE("10 sigma offset lands in the [5, 20] band" * doctest::may_fail()) {
  // The predicted attributable carries the uncertainty of both arcs, which
  // dominates the second arc's own covariance on this geometry.
  const Nominal n = nominal_case(81);
  Attributable off = n.pair.a2;
  off.alpha += 10.0 * std::sqrt(off.gamma(0, 0));
  const double shifted =
      compatibility_penalty(n.sol.state1, &n.sol.covariance.gamma_car1, off, n.pair.o2, kMuSun);
  CHECK(shifted >= 5.0);
  CHECK(shifted <= 20.0);
}

}
