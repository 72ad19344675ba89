/*
 * Copyright 2026 The tsalink Authors
 *
 * This software is licensed under the terms of the Apache Licence Version 2.0
 * which can be obtained at http://www.apache.org/licenses/LICENSE-2.0.
 */
#pragma once

#include "tsalink/error.hpp"
#include "tsalink/geometry.hpp"

namespace tsalink {

/// Osculating elements; ell is the mean anomaly.
struct KeplerianElements {
  double a = 0.0;
  double e = 0.0;
  double I = 0.0;
  double Omega = 0.0;
  double omega = 0.0;
  double ell = 0.0;
  Epoch epoch = 0.0;
};

/// Raised for states with non-negative energy (or e >= 1).
class UnboundedOrbitError : public DomainError {
 public:
  using DomainError::DomainError;
};

/// Elliptic elements. Conventions: e < 1e-10 gives omega = 0 with ell
/// measured from the node; I < 1e-10 (or within 1e-10 of pi) gives Omega = 0.
KeplerianElements cartesian_to_keplerian(const State6& state, double mu);

State6 keplerian_to_cartesian(const KeplerianElements& el, double mu);

/// Solves E - e sin E = M.
double solve_kepler(double mean_anomaly, double e);

/// Two-body propagation by dt with universal variables (Stumpff functions).
/// Throws NumericError when Newton fails to reach tol in max_iter steps.
State6 propagate_two_body(const State6& state, double dt, double mu, double tol = 1e-12,
                          int max_iter = 50);

/// Wraps to [0, 2 pi).
double wrap_two_pi(double angle);

}  // namespace tsalink
