/*
 * Copyright 2026 The tsalink Authors
 *
 * This software is licensed under the terms of the Apache Licence Version 2.0
 * which can be obtained at http://www.apache.org/licenses/LICENSE-2.0.
 */
#pragma once

// Vetting of raw linkage roots: physical filtering, spurious-solution tests
// against the full set of two-body integrals, a Mahalanobis compatibility
// penalty, and covariance of the Cartesian state at the first epoch by the
// implicit function theorem.

#include <limits>
#include <optional>
#include <vector>

#include <Eigen/Core>

#include "tsalink/attributable.hpp"
#include "tsalink/kepler.hpp"
#include "tsalink/linkage.hpp"

namespace tsalink {

using Mat6 = Eigen::Matrix<double, 6, 6>;
using Mat8 = Eigen::Matrix<double, 8, 8>;
using Mat4x8 = Eigen::Matrix<double, 4, 8>;
using Mat6x8 = Eigen::Matrix<double, 6, 8>;
using Mat4x12 = Eigen::Matrix<double, 4, 12>;
using Vec4 = Eigen::Vector4d;

struct SolutionFlags {
  bool negative_range = false;
  bool out_of_range = false;
  bool unbounded = false;
  bool spurious_intersys = false;
  bool spurious_fullsys = false;
  /// |Delta r| too small to evaluate the spurious tests.
  bool indeterminate = false;
  bool covariance_unavailable = false;
  bool propagation_failed = false;

  /// No flag that disqualifies the orbit.
  bool accepted() const {
    return !negative_range && !out_of_range && !unbounded && !spurious_intersys &&
           !spurious_fullsys && !indeterminate;
  }
};

struct AssessmentConfig {
  double mu = kMuSun;
  double rho_min = 0.0;
  double rho_max = std::numeric_limits<double>::infinity();
  double tau_sp = 1e-2;
  double tau_L2 = 1e-2;
};

struct SpuriousCheck {
  double residual_intersys = 0.0;
  double lenz_gap = 0.0;
  bool spurious_intersys = false;
  bool spurious_fullsys = false;
  bool indeterminate = false;
};

struct CovariancePack {
  Mat8 gamma_A = Mat8::Zero();
  Mat4 dPhi_dR = Mat4::Zero();
  Mat4x8 dPhi_dA = Mat4x8::Zero();
  Mat6x8 dEcar1_dA = Mat6x8::Zero();
  Mat6 gamma_car1 = Mat6::Zero();
  bool available = false;
};

struct LinkageSolution {
  double rho1 = 0.0;
  double rhodot1 = 0.0;
  double rho2 = 0.0;
  double rhodot2 = 0.0;
  State6 state1;
  State6 state2;
  std::optional<KeplerianElements> kepler1;
  std::optional<KeplerianElements> kepler2;
  double energy1 = 0.0;
  double energy2 = 0.0;
  SolutionFlags flags;
  SpuriousCheck spurious;
  /// Mahalanobis attributable mismatch ("penalty_mahalanobis"); +inf if unavailable.
  double penalty = std::numeric_limits<double>::infinity();
  CovariancePack covariance;
  RawSolution raw;
};

/// Range sign, admissible box and bound-orbit flags for a raw root.
SolutionFlags physical_filter(const RawSolution& raw, const State6& s1, const State6& s2,
                              const AssessmentConfig& cfg);

/// Residual of DeltaK . Deltar + (|rdot1|^2/2 - mu/|r1|) |Deltar|^2 normalized
/// by mu |Deltar|^2 / |r1|, and the distance of |L1 - L2| from 2.
SpuriousCheck spurious_check(const State6& s1, const State6& s2, const AssessmentConfig& cfg);

/// p1* = (DeltaK x Deltar) . (r1 - q1) and its analytic gradients.
double p1_star(const Vec3& r1, const Vec3& rdot1, const Vec3& r2, const Vec3& rdot2, const Vec3& q1);

struct P1StarGradient {
  Vec3 d_r1;
  Vec3 d_rdot1;
  Vec3 d_r2;
  Vec3 d_rdot2;
};

P1StarGradient p1_star_gradient(const Vec3& r1, const Vec3& rdot1, const Vec3& r2,
                                const Vec3& rdot2, const Vec3& q1);

/// Phi(R, A) = (c1 - c2, p1) with R = (rho1, rhodot1, rho2, rhodot2) and
/// A = (A1, A2).
Vec4 linkage_map(const Vec4& R, const Eigen::Matrix<double, 8, 1>& A, const ObserverState& o1,
                 const ObserverState& o2);

/// Cartesian states (r1, rdot1, r2, rdot2) from attributable coordinates.
Eigen::Matrix<double, 12, 1> attributable_to_cartesian(const Vec4& R,
                                                       const Eigen::Matrix<double, 8, 1>& A,
                                                       const ObserverState& o1,
                                                       const ObserverState& o2);

/// dPsi/dE_car from the hat map and (1 / rho1) dp1*/dE_car; valid where p1 = 0.
Mat4x12 dpsi_decar(const Vec3& r1, const Vec3& rdot1, const Vec3& r2, const Vec3& rdot2,
                   const Vec3& q1, double rho1);

Eigen::Matrix<double, 8, 1> pack_attributables(const Attributable& a1, const Attributable& a2);

/// Gamma_car1 = dEcar1/dA Gamma_A dEcar1/dA^T. Unavailable (not thrown) when
/// dPhi/dR is singular.
CovariancePack propagate_covariance(const Vec4& R, const Attributable& a1, const Attributable& a2,
                                    const ObserverState& o1, const ObserverState& o2);

/// Predicted attributable at the observer epoch for a heliocentric/geocentric
/// state, in (alpha, delta, alphadot, deltadot).
Vec4 predict_attributable(const State6& state, const ObserverState& obs);

/// Mahalanobis distance between A2 and the attributable predicted from
/// state1 propagated to the second epoch. Returns +inf on propagation failure.
double compatibility_penalty(const State6& state1, const Mat6* cov_car1, const Attributable& a2,
                             const ObserverState& o2, double mu, bool* propagation_failed = nullptr);

/// Full assessment of every raw root from a linkage run.
std::vector<LinkageSolution> assess_solutions(const LinkageResult& result, const Attributable& a1,
                                              const Attributable& a2, const ObserverState& o1,
                                              const ObserverState& o2, const AssessmentConfig& cfg);

}  // namespace tsalink
