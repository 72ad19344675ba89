/*
 * Copyright 2026 The tsalink Authors
 *
 * This software is licensed under the terms of the Apache Licence Version 2.0
 * which can be obtained at http://www.apache.org/licenses/LICENSE-2.0.
 */
#include "tsalink/ephemeris.hpp"

#include <cmath>
#include <numbers>

namespace tsalink {

namespace {

constexpr double kEraRate = 1.00273781191135448;

}  // namespace

ObserverState circular_earth(double mjd) {
  const double lon = kEarthLongitudeJ2000 + kGaussK * (mjd - kMjdJ2000);
  const Vec3 q(std::cos(lon), std::sin(lon), 0.0);
  const Vec3 qdot(-kGaussK * std::sin(lon), kGaussK * std::cos(lon), 0.0);
  const Mat3 tilt = Eigen::AngleAxisd(kObliquityJ2000, Vec3::UnitX()).toRotationMatrix();
  return ObserverState{tilt * q, tilt * qdot, mjd};
}

double earth_rotation_angle(double mjd) {
  const double turns = 0.7790572732640 + kEraRate * (mjd - kMjdJ2000);
  return 2.0 * std::numbers::pi * (turns - std::floor(turns));
}

ObserverState rotating_station(double mjd, const Station& st) {
  const double theta = earth_rotation_angle(mjd) + st.longitude;
  const double omega = 2.0 * std::numbers::pi * kEraRate / kSecondsPerDay;
  const double cl = std::cos(st.latitude);
  const Vec3 q = st.radius * Vec3(cl * std::cos(theta), cl * std::sin(theta), std::sin(st.latitude));
  const Vec3 qdot = omega * Vec3(-q.y(), q.x(), 0.0);
  return ObserverState{q, qdot, mjd * kSecondsPerDay};
}

}  // namespace tsalink
