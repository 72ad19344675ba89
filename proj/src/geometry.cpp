/*
 * Copyright 2026 The tsalink Authors
 *
 * This software is licensed under the terms of the Apache Licence Version 2.0
 * which can be obtained at http://www.apache.org/licenses/LICENSE-2.0.
 */
#include "tsalink/geometry.hpp"

#include <cmath>
#include <numbers>

#include "tsalink/error.hpp"

namespace tsalink {

LosFrame los_frame(double alpha, double delta, double alphadot, double deltadot) {
  if (!std::isfinite(alpha) || !std::isfinite(delta) ||
      std::abs(delta) >= std::numbers::pi / 2) {
    throw DomainError("los_frame: declination outside (-pi/2, pi/2)");
  }
  const double ca = std::cos(alpha), sa = std::sin(alpha);
  const double cd = std::cos(delta), sd = std::sin(delta);

  LosFrame f;
  f.erho = Vec3(cd * ca, cd * sa, sd);
  f.ealpha = Vec3(-sa, ca, 0.0);
  f.edelta = Vec3(-sd * ca, -sd * sa, cd);
  f.eperp = alphadot * cd * f.ealpha + deltadot * f.edelta;
  return f;
}

AngMomCoeffs angmom_coeffs(const LosFrame& frame, const ObserverState& obs) {
  AngMomCoeffs k;
  k.D = obs.q.cross(frame.erho);
  k.E = frame.erho.cross(frame.eperp);
  k.F = obs.q.cross(frame.eperp) + frame.erho.cross(obs.qdot);
  k.G = obs.q.cross(obs.qdot);
  return k;
}

State6 eval_state(const LosFrame& frame, const ObserverState& obs, double rho,
                  double rhodot) {
  State6 s;
  s.r = obs.q + rho * frame.erho;
  s.rdot = obs.qdot + rhodot * frame.erho + rho * frame.eperp;
  s.epoch = obs.epoch;
  return s;
}

Integrals integrals(const State6& state, double mu) {
  const double rnorm = state.r.norm();
  if (!(rnorm > 0.0)) throw DomainError("integrals: |r| = 0");
  if (!(mu > 0.0)) throw DomainError("integrals: mu must be positive");

  const double v2 = state.rdot.squaredNorm();
  const double rv = state.rdot.dot(state.r);

  Integrals out;
  out.c = state.r.cross(state.rdot);
  out.energy = 0.5 * v2 - mu / rnorm;
  out.lenz = ((v2 - mu / rnorm) * state.r - rv * state.rdot) / mu;
  out.kappa = 0.5 * v2 * state.r - rv * state.rdot;
  return out;
}

Mat3 hat(const Vec3& u) {
  Mat3 m;
  m << 0.0, -u.z(), u.y(),
       u.z(), 0.0, -u.x(),
       -u.y(), u.x(), 0.0;
  return m;
}

}  // namespace tsalink
