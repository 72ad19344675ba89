/*
 * Copyright 2026 The tsalink Authors
 *
 * This software is licensed under the terms of the Apache Licence Version 2.0
 * which can be obtained at http://www.apache.org/licenses/LICENSE-2.0.
 */
#include "tsalink/kepler.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace tsalink {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr double kAngleEps = 1e-10;

// Stumpff functions C(z), S(z).
void stumpff(double z, double& c, double& s) {
  if (std::abs(z) < 1e-3) {
    c = 0.5 - z / 24.0 + z * z / 720.0 - z * z * z / 40320.0;
    s = 1.0 / 6.0 - z / 120.0 + z * z / 5040.0 - z * z * z / 362880.0;
  } else if (z > 0.0) {
    const double sz = std::sqrt(z);
    c = (1.0 - std::cos(sz)) / z;
    s = (sz - std::sin(sz)) / (sz * z);
  } else {
    const double sz = std::sqrt(-z);
    c = (std::cosh(sz) - 1.0) / (-z);
    s = (std::sinh(sz) - sz) / (sz * -z);
  }
}

}  // namespace

double wrap_two_pi(double angle) {
  double w = std::fmod(angle, kTwoPi);
  if (w < 0.0) w += kTwoPi;
  if (w >= kTwoPi) w -= kTwoPi;
  return w;
}

double solve_kepler(double mean_anomaly, double e) {
  const double m = wrap_two_pi(mean_anomaly);
  double ecc = e < 0.8 ? m : std::numbers::pi;
  for (int it = 0; it < 100; ++it) {
    const double f = ecc - e * std::sin(ecc) - m;
    const double step = f / (1.0 - e * std::cos(ecc));
    ecc -= step;
    if (std::abs(step) < 1e-15) break;
  }
  return ecc;
}

KeplerianElements cartesian_to_keplerian(const State6& state, double mu) {
  const Integrals ints = integrals(state, mu);
  if (!(ints.energy < 0.0)) throw UnboundedOrbitError("cartesian_to_keplerian: non-negative energy");
  const double e = ints.lenz.norm();
  if (!(e < 1.0)) throw UnboundedOrbitError("cartesian_to_keplerian: e >= 1");

  KeplerianElements el;
  el.epoch = state.epoch;
  el.a = -mu / (2.0 * ints.energy);
  el.e = e;

  const Vec3 chat = ints.c.normalized();
  el.I = std::acos(std::clamp(chat.z(), -1.0, 1.0));

  Vec3 node(-ints.c.y(), ints.c.x(), 0.0);
  if (std::sin(el.I) < kAngleEps) {
    el.Omega = 0.0;
    node = Vec3::UnitX();
  } else {
    node.normalize();
    el.Omega = wrap_two_pi(std::atan2(node.y(), node.x()));
  }
  // in-plane reference direction 90 degrees ahead of the node
  const Vec3 node_perp = chat.cross(node);

  double f;
  if (e < kAngleEps) {
    el.omega = 0.0;
    f = std::atan2(state.r.dot(node_perp), state.r.dot(node));
  } else {
    el.omega = wrap_two_pi(std::atan2(ints.lenz.dot(node_perp), ints.lenz.dot(node)));
    const Vec3 lhat = ints.lenz / e;
    f = std::atan2(chat.cross(lhat).dot(state.r), lhat.dot(state.r));
  }

  const double denom = 1.0 + e * std::cos(f);
  const double sin_e = std::sqrt(1.0 - e * e) * std::sin(f) / denom;
  const double cos_e = (e + std::cos(f)) / denom;
  const double ecc_anom = std::atan2(sin_e, cos_e);
  el.ell = wrap_two_pi(ecc_anom - e * std::sin(ecc_anom));
  return el;
}

State6 keplerian_to_cartesian(const KeplerianElements& el, double mu) {
  if (!(el.a > 0.0) || el.e < 0.0 || el.e >= 1.0) {
    throw UnboundedOrbitError("keplerian_to_cartesian: elliptic elements required");
  }
  const double ecc_anom = solve_kepler(el.ell, el.e);
  const double n = std::sqrt(mu / (el.a * el.a * el.a));
  const double ce = std::cos(ecc_anom), se = std::sin(ecc_anom);
  const double b = std::sqrt(1.0 - el.e * el.e);
  const double den = 1.0 - el.e * ce;

  const Vec3 pos(el.a * (ce - el.e), el.a * b * se, 0.0);
  const Vec3 vel(-el.a * n * se / den, el.a * n * b * ce / den, 0.0);

  const Mat3 rot = (Eigen::AngleAxisd(el.Omega, Vec3::UnitZ()) *
                    Eigen::AngleAxisd(el.I, Vec3::UnitX()) *
                    Eigen::AngleAxisd(el.omega, Vec3::UnitZ()))
                       .toRotationMatrix();
  State6 s;
  s.r = rot * pos;
  s.rdot = rot * vel;
  s.epoch = el.epoch;
  return s;
}

State6 propagate_two_body(const State6& state, double dt, double mu, double tol, int max_iter) {
  const double r0 = state.r.norm();
  if (!(r0 > 0.0)) throw DomainError("propagate_two_body: |r| = 0");
  const double smu = std::sqrt(mu);
  const double v0sq = state.rdot.squaredNorm();
  const double vr0 = state.r.dot(state.rdot) / r0;
  const double alpha = 2.0 / r0 - v0sq / mu;

  double t = dt;
  if (alpha > 0.0) {
    const double period = kTwoPi / (smu * std::pow(alpha, 1.5));
    t = std::remainder(dt, period);
  }

  double chi = alpha > 0.0 ? smu * alpha * t : smu * t / r0;
  double c = 0.5, s = 1.0 / 6.0;
  bool converged = false;
  for (int it = 0; it < max_iter; ++it) {
    const double z = alpha * chi * chi;
    stumpff(z, c, s);
    const double chi2 = chi * chi;
    const double f = r0 * vr0 / smu * chi2 * c + (1.0 - alpha * r0) * chi2 * chi * s + r0 * chi - smu * t;
    const double df = r0 * vr0 / smu * chi * (1.0 - z * s) + (1.0 - alpha * r0) * chi2 * c + r0;
    const double step = f / df;
    chi -= step;
    if (std::abs(step) <= tol * std::max(1.0, std::abs(chi))) {
      converged = true;
      break;
    }
  }
  if (!converged || !std::isfinite(chi)) {
    throw NumericError("propagate_two_body: universal-variable iteration did not converge");
  }
  const double z = alpha * chi * chi;
  stumpff(z, c, s);
  const double chi2 = chi * chi;

  const double f = 1.0 - chi2 / r0 * c;
  const double g = t - chi2 * chi * s / smu;
  State6 out;
  out.r = f * state.r + g * state.rdot;
  const double rn = out.r.norm();
  const double fdot = smu / (rn * r0) * (z * chi * s - chi);
  const double gdot = 1.0 - chi2 / rn * c;
  out.rdot = fdot * state.r + gdot * state.rdot;
  out.epoch = state.epoch + dt;
  return out;
}

}  // namespace tsalink
