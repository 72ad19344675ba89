/*
 * Copyright 2026 The tsalink Authors
 *
 * This software is licensed under the terms of the Apache Licence Version 2.0
 * which can be obtained at http://www.apache.org/licenses/LICENSE-2.0.
 */
#pragma once

#include <span>

#include <Eigen/Core>

#include "tsalink/geometry.hpp"

namespace tsalink {

using Mat4 = Eigen::Matrix4d;

/// One timed optical observation. Sigmas are 1-sigma on the sky (the alpha
/// sigma applies to alpha cos(delta)); a non-positive sigma selects the
/// default from FitOptions.
struct AngularObservation {
  Epoch t = 0.0;
  double alpha = 0.0;
  double delta = 0.0;
  double sigma_alpha = 0.0;
  double sigma_delta = 0.0;
};

/// Angular position and rate at the mean epoch of a short arc, ordered
/// (alpha, delta, alphadot, deltadot) in the covariance.
struct Attributable {
  double alpha = 0.0;
  double delta = 0.0;
  double alphadot = 0.0;
  double deltadot = 0.0;
  Epoch epoch = 0.0;
  Mat4 gamma = Mat4::Zero();

  int num_obs = 0;
  /// Factor applied to the formal LS covariance (max(1, chi2/dof) when m > 3).
  double cov_scale = 1.0;
  double chi2_dof = 0.0;
  bool rescaled = false;

  LosFrame frame() const { return los_frame(alpha, delta, alphadot, deltadot); }
};

struct FitOptions {
  double default_sigma_alpha = 4.84813681109536e-6;  // 1 arcsec
  double default_sigma_delta = 4.84813681109536e-6;
  /// Arcs closer than this to a celestial pole are rejected.
  double max_abs_delta = 89.9 * 3.14159265358979323846 / 180.0;
};

/// Weighted least-squares fit at the mean epoch: quadratic in (t - tbar) for
/// m >= 3, linear interpolation for m = 2. Alpha is unwrapped across the
/// +-pi branch before fitting and wrapped to [-pi, pi) afterwards.
Attributable fit_attributable(std::span<const AngularObservation> obs,
                              const FitOptions& opts = {});

/// Wraps an angle to [-pi, pi).
double wrap_pi(double angle);

}  // namespace tsalink
