/*
 * Copyright 2026 The tsalink Authors
 *
 * This software is licensed under the terms of the Apache Licence Version 2.0
 * which can be obtained at http://www.apache.org/licenses/LICENSE-2.0.
 */
#pragma once

// Inertial-frame kinematics of a body seen along a line of sight from a
// moving observer: r = q + rho e^rho, and the two-body first integrals
// expressed as functions of the unknown range and range rate.

#include <Eigen/Core>
#include <Eigen/Geometry>

namespace tsalink {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

/// Time in the unit system of the run (days heliocentric, seconds geocentric).
using Epoch = double;

/// Gauss gravitational constant (AU^(3/2) / day).
inline constexpr double kGaussK = 0.01720209895;
inline constexpr double kMuSun = kGaussK * kGaussK;
/// Earth GM in km^3/s^2.
inline constexpr double kMuEarth = 398600.4418;

struct ObserverState {
  Vec3 q = Vec3::Zero();
  Vec3 qdot = Vec3::Zero();
  Epoch epoch = 0.0;
};

/// Orthonormal line-of-sight basis plus the transverse angular rate vector.
struct LosFrame {
  Vec3 erho;
  Vec3 ealpha;
  Vec3 edelta;
  /// alphadot cos(delta) e^alpha + deltadot e^delta
  Vec3 eperp;
};

/// c(rho, rhodot) = D rhodot + E rho^2 + F rho + G
struct AngMomCoeffs {
  Vec3 D;
  Vec3 E;
  Vec3 F;
  Vec3 G;

  Vec3 eval(double rho, double rhodot) const {
    return D * rhodot + E * (rho * rho) + F * rho + G;
  }
};

struct State6 {
  Vec3 r = Vec3::Zero();
  Vec3 rdot = Vec3::Zero();
  Epoch epoch = 0.0;
};

struct Integrals {
  Vec3 c;          ///< angular momentum r x rdot
  double energy;   ///< 0.5 |rdot|^2 - mu/|r|
  Vec3 lenz;       ///< Laplace-Lenz vector L (|L| = eccentricity)
  Vec3 kappa;      ///< 0.5 |rdot|^2 r - (rdot . r) rdot
};

/// Throws DomainError when |delta| >= pi/2.
LosFrame los_frame(double alpha, double delta, double alphadot, double deltadot);

AngMomCoeffs angmom_coeffs(const LosFrame& frame, const ObserverState& obs);

/// r = q + rho e^rho, rdot = qdot + rhodot e^rho + rho e^perp. rho <= 0 is
/// accepted for diagnostic evaluation.
State6 eval_state(const LosFrame& frame, const ObserverState& obs, double rho,
                  double rhodot);

/// Throws DomainError on |r| = 0 or mu <= 0.
Integrals integrals(const State6& state, double mu);

/// Skew-symmetric matrix with hat(u) v = u x v.
Mat3 hat(const Vec3& u);

}  // namespace tsalink
