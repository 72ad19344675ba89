/*
 * Copyright 2026 The tsalink Authors
 *
 * This software is licensed under the terms of the Apache Licence Version 2.0
 * which can be obtained at http://www.apache.org/licenses/LICENSE-2.0.
 */
#pragma once

// Linkage under secular J2 drift. Starting from the two-body solutions, the
// node and perigee drift over the epoch gap give two rotations: Rc (for the
// angular momentum) and RL (for the Laplace-Lenz vector). Re-posing the
// system with the rotated epoch-1 geometry keeps it polynomial, so it is
// solved again and the process repeated to a fixed point.

#include <string>
#include <utility>
#include <vector>

#include "tsalink/assessment.hpp"
#include "tsalink/kepler.hpp"
#include "tsalink/linkage.hpp"

namespace tsalink {

inline constexpr double kJ2Earth = 1.08262668e-3;
inline constexpr double kEarthRadius = 6378.137;  // km

enum class J2Branch { P1, P2 };

struct J2Config {
  double j2 = kJ2Earth;
  double r_body = kEarthRadius;
  double mu = kMuEarth;
  int max_iter = 20;
  /// Convergence on (rho1, rho2) relative to the range scale.
  double tol_rho = 1e-8;
  J2Branch branch = J2Branch::P1;
  /// Retry with the other branch when the tracked root is lost.
  bool branch_fallback = true;
  /// Half-step fixed-point updates.
  bool damping = false;
  /// Largest admissible jump between iterates, relative to the range scale.
  double track_limit = 0.5;
};

struct RotationPair {
  Mat3 Rc = Mat3::Identity();
  Mat3 RL = Mat3::Identity();
  double delta_Omega = 0.0;
  double delta_omega = 0.0;
};

struct SecularRates {
  double Omega_dot = 0.0;
  double omega_dot = 0.0;
};

/// First-order secular node and perigee rates; throws UnboundedOrbitError for e >= 1.
SecularRates secular_rates(const KeplerianElements& el, const J2Config& cfg);

/// Rotation about an arbitrary axis (right-handed).
Mat3 axis_rotation(const Vec3& axis, double angle);

/// Rc and RL for a drift accumulated from t1 to t2 on the epoch-1 elements.
/// The RL outer rotation is about the angular momentum direction of el2.
RotationPair rotation_pair(const KeplerianElements& el1, const KeplerianElements& el2, Epoch t1,
                           Epoch t2, const J2Config& cfg);

struct J2Iteration {
  int iteration = 0;
  double rho1 = 0.0;
  double rho2 = 0.0;
  /// |(rho1, rho2) - previous| / range scale.
  double step = 0.0;
  J2Branch branch = J2Branch::P1;
  double delta_Omega = 0.0;
  double delta_omega = 0.0;
  /// Normalized residual of the polynomial not used by the branch.
  double other_residual = 0.0;
};

struct J2SeedResult {
  RawSolution seed;
  RawSolution solution;
  bool converged = false;
  std::string status;
  int iterations = 0;
  J2Branch branch = J2Branch::P1;
  std::vector<J2Iteration> trace;
};

struct J2Result {
  LinkageResult unperturbed;
  std::vector<J2SeedResult> seeds;
  /// Assessment of the converged seeds.
  std::vector<LinkageSolution> solutions;
};

/// One fixed-point iteration family per seed.
J2SeedResult j2_iterate(const RawSolution& seed, const Attributable& a1, const Attributable& a2,
                        const ObserverState& o1, const ObserverState& o2, const J2Config& cfg);

/// Unperturbed linkage, then J2 iteration from every positive, in-range,
/// bounded solution.
J2Result j2_linkage(const Attributable& a1, const Attributable& a2, const ObserverState& o1,
                    const ObserverState& o2, const J2Config& cfg, const LinkageConfig& lcfg = {},
                    AssessmentConfig acfg = {});

const char* to_string(J2Branch b);

}  // namespace tsalink
