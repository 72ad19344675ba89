/*
 * Copyright 2026 The tsalink Authors
 *
 * This software is licensed under the terms of the Apache Licence Version 2.0
 * which can be obtained at http://www.apache.org/licenses/LICENSE-2.0.
 */
#include "tsalink/attributable.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include <Eigen/Dense>

#include "tsalink/error.hpp"

namespace tsalink {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

struct CoordinateFit {
  double value;
  double rate;
  Eigen::Matrix2d cov;  // formal covariance of (value, rate)
  double chi2;
};

// Weighted polynomial fit of y(dt) with `ncoef` coefficients. Time is scaled
// by `h` to keep the design matrix well conditioned.
CoordinateFit fit_coordinate(const std::vector<double>& dt,
                             const std::vector<double>& y,
                             const std::vector<double>& weight, int ncoef,
                             double h) {
  const auto m = static_cast<Eigen::Index>(dt.size());
  Eigen::MatrixXd a(m, ncoef);
  Eigen::VectorXd b(m);
  for (Eigen::Index i = 0; i < m; ++i) {
    const double sw = std::sqrt(weight[i]);
    const double tau = dt[i] / h;
    double p = 1.0;
    for (int k = 0; k < ncoef; ++k) {
      a(i, k) = sw * p;
      p *= tau;
    }
    b(i) = sw * y[i];
  }

  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(a);
  if (qr.rank() < ncoef) {
    throw NumericError("fit_attributable: rank-deficient design matrix (duplicate times)");
  }
  const Eigen::VectorXd coef = qr.solve(b);
  const Eigen::MatrixXd normal = a.transpose() * a;
  const Eigen::MatrixXd cov_scaled = normal.inverse();

  CoordinateFit out;
  out.value = coef(0);
  out.rate = coef(1) / h;
  out.cov(0, 0) = cov_scaled(0, 0);
  out.cov(0, 1) = cov_scaled(0, 1) / h;
  out.cov(1, 0) = out.cov(0, 1);
  out.cov(1, 1) = cov_scaled(1, 1) / (h * h);
  out.chi2 = (a * coef - b).squaredNorm();
  return out;
}

}  // namespace

double wrap_pi(double angle) {
  double w = std::fmod(angle + std::numbers::pi, kTwoPi);
  if (w < 0.0) w += kTwoPi;
  return w - std::numbers::pi;
}

Attributable fit_attributable(std::span<const AngularObservation> obs,
                              const FitOptions& opts) {
  const std::size_t m = obs.size();
  if (m < 2) throw Error(ErrorCode::InvalidArgument, "fit_attributable: need at least 2 observations");

  double tbar = 0.0;
  double dbar = 0.0;
  for (const auto& o : obs) {
    if (!std::isfinite(o.t) || !std::isfinite(o.alpha) || !std::isfinite(o.delta)) {
      throw Error(ErrorCode::InvalidArgument, "fit_attributable: non-finite observation");
    }
    if (std::abs(o.delta) > opts.max_abs_delta) {
      throw DomainError("fit_attributable: declination too close to a pole");
    }
    tbar += o.t;
    dbar += o.delta;
  }
  tbar /= static_cast<double>(m);
  dbar /= static_cast<double>(m);

  std::vector<double> dt(m), alpha(m), delta(m), wa(m), wd(m);
  const double cd2 = std::cos(dbar) * std::cos(dbar);
  double h = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    dt[i] = obs[i].t - tbar;
    h = std::max(h, std::abs(dt[i]));
    delta[i] = obs[i].delta;
    alpha[i] = obs[i].alpha;
    if (i > 0) {
      // continuous branch relative to the previous point
      alpha[i] -= kTwoPi * std::round((alpha[i] - alpha[i - 1]) / kTwoPi);
    }
    const double sa = obs[i].sigma_alpha > 0.0 ? obs[i].sigma_alpha : opts.default_sigma_alpha;
    const double sd = obs[i].sigma_delta > 0.0 ? obs[i].sigma_delta : opts.default_sigma_delta;
    wa[i] = cd2 / (sa * sa);
    wd[i] = 1.0 / (sd * sd);
  }
  if (!(h > 0.0)) throw NumericError("fit_attributable: all timestamps are equal");

  const int ncoef = m >= 3 ? 3 : 2;
  const CoordinateFit fa = fit_coordinate(dt, alpha, wa, ncoef, h);
  const CoordinateFit fd = fit_coordinate(dt, delta, wd, ncoef, h);

  Attributable att;
  att.alpha = wrap_pi(fa.value);
  att.delta = fd.value;
  att.alphadot = fa.rate;
  att.deltadot = fd.rate;
  att.epoch = tbar;
  att.num_obs = static_cast<int>(m);

  if (std::abs(att.delta) >= std::numbers::pi / 2) {
    throw DomainError("fit_attributable: fitted declination outside (-pi/2, pi/2)");
  }

  const int dof = 2 * (static_cast<int>(m) - ncoef);
  if (dof > 0) att.chi2_dof = (fa.chi2 + fd.chi2) / dof;
  if (m > 3) {
    att.cov_scale = std::max(1.0, att.chi2_dof);
    att.rescaled = true;
  }

  // (alpha, delta, alphadot, deltadot)
  Mat4 g = Mat4::Zero();
  g(0, 0) = fa.cov(0, 0);
  g(0, 2) = g(2, 0) = fa.cov(0, 1);
  g(2, 2) = fa.cov(1, 1);
  g(1, 1) = fd.cov(0, 0);
  g(1, 3) = g(3, 1) = fd.cov(0, 1);
  g(3, 3) = fd.cov(1, 1);
  att.gamma = att.cov_scale * g;
  return att;
}

}  // namespace tsalink
