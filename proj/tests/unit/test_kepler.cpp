/*
 * Copyright 2026 The tsalink Authors
 *
 * This software is licensed under the terms of the Apache Licence Version 2.0
 * which can be obtained at http://www.apache.org/licenses/LICENSE-2.0.
 */
#include <cmath>
#include <numbers>
#include <random>

#include <doctest.h>

#include "tsalink/kepler.hpp"

using namespace tsalink;

namespace {

double angle_diff(double a, double b) { return std::abs(std::remainder(a - b, 2 * std::numbers::pi)); }

}  // namespace

TEST_SUITE("kepler") {

TEST_CASE("circular equatorial orbit") {
  const double mu = 1.7;
  State6 s;
  s.r = Vec3(1, 0, 0);
  s.rdot = Vec3(0, std::sqrt(mu), 0);
  const KeplerianElements el = cartesian_to_keplerian(s, mu);
  CHECK(el.a == doctest::Approx(1.0));
  CHECK(el.e < 1e-12);
  CHECK(el.I < 1e-12);
  CHECK(el.Omega == 0.0);
  CHECK(el.omega == 0.0);
}

TEST_CASE("elements round trip") {
  std::mt19937_64 gen(61);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const double mu = 0.01720209895 * 0.01720209895;
  for (int k = 0; k < 1000; ++k) {
    KeplerianElements el;
    el.a = 0.5 + 4.0 * u(gen);
    el.e = 1e-6 + 0.9 * u(gen);
    el.I = 1e-6 + (std::numbers::pi - 2e-6) * u(gen);
    el.Omega = 2 * std::numbers::pi * u(gen);
    el.omega = 2 * std::numbers::pi * u(gen);
    el.ell = 2 * std::numbers::pi * u(gen);
    el.epoch = 123.0;
    const KeplerianElements back = cartesian_to_keplerian(keplerian_to_cartesian(el, mu), mu);
    CHECK(std::abs(back.a - el.a) < 1e-10 * el.a);
    CHECK(std::abs(back.e - el.e) < 1e-10);
    CHECK(std::abs(back.I - el.I) < 1e-10);
    // near-circular or near-equatorial cases lose angle resolution by 1/e, 1/sin I
    const double weak = std::min(el.e, std::sin(el.I));
    CHECK(angle_diff(back.Omega, el.Omega) < 1e-10 / std::sin(el.I));
    CHECK(angle_diff(back.omega, el.omega) < 1e-10 / weak);
    CHECK(angle_diff(back.ell, el.ell) < 1e-10 / el.e);
    CHECK(back.epoch == 123.0);
    CHECK(back.I >= 0.0);
    CHECK(back.I <= std::numbers::pi);
    CHECK(back.Omega >= 0.0);
    CHECK(back.Omega < 2 * std::numbers::pi);
  }
}

TEST_CASE("unbounded states are refused") {
  State6 s;
  s.r = Vec3(1, 0, 0);
  s.rdot = Vec3(0, 2.0, 0);
  CHECK_THROWS_AS(cartesian_to_keplerian(s, 1.0), UnboundedOrbitError);
}

TEST_CASE("kepler equation") {
  for (double e : {0.0, 0.1, 0.5, 0.9, 0.99}) {
    for (double m = -3.0; m <= 3.0; m += 0.37) {
      const double E = solve_kepler(m, e);
      // E comes back in [0, 2 pi)
      CHECK(std::abs(std::remainder(E - e * std::sin(E) - m, 2.0 * std::numbers::pi)) < 1e-13);
    }
  }
}

TEST_CASE("universal-variable propagation matches mean motion") {
  std::mt19937_64 gen(62);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const double mu = 398600.4418;
  for (int k = 0; k < 200; ++k) {
    KeplerianElements el;
    el.a = 7000.0 + 30000.0 * u(gen);
    el.e = 0.8 * u(gen);
    el.I = 0.1 + 2.9 * u(gen);
    el.Omega = 6.0 * u(gen);
    el.omega = 6.0 * u(gen);
    el.ell = 6.0 * u(gen);
    const double n = std::sqrt(mu / (el.a * el.a * el.a));
    const double dt = 1e5 * u(gen) - 2e4;
    KeplerianElements later = el;
    later.ell = el.ell + n * dt;
    const State6 a = propagate_two_body(keplerian_to_cartesian(el, mu), dt, mu);
    const State6 b = keplerian_to_cartesian(later, mu);
    CHECK((a.r - b.r).norm() < 1e-8 * b.r.norm());
    CHECK((a.rdot - b.rdot).norm() < 1e-8 * b.rdot.norm());
  }
  // hyperbolic states propagate too and conserve energy
  State6 h;
  h.r = Vec3(7000, 0, 0);
  h.rdot = Vec3(0, 12.0, 1.0);
  const State6 h2 = propagate_two_body(h, 3600.0, mu);
  const double e0 = 0.5 * h.rdot.squaredNorm() - mu / h.r.norm();
  const double e1 = 0.5 * h2.rdot.squaredNorm() - mu / h2.r.norm();
  CHECK(std::abs(e1 - e0) < 1e-9 * std::abs(e0));
}

}
