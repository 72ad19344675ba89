/*
 * Copyright 2026 The tsalink Authors
 *
 * This software is licensed under the terms of the Apache Licence Version 2.0
 * which can be obtained at http://www.apache.org/licenses/LICENSE-2.0.
 */
#pragma once

// Analytic observer models. Heliocentric epochs are MJD in days (AU, AU/day);
// geocentric epochs are MJD * 86400 in seconds (km, km/s).

#include "tsalink/geometry.hpp"

namespace tsalink {

inline constexpr double kObliquityJ2000 = 23.4392911 * 3.14159265358979323846 / 180.0;
/// Mean heliocentric longitude of the Earth at MJD 51544.5.
inline constexpr double kEarthLongitudeJ2000 = 100.46435 * 3.14159265358979323846 / 180.0;
inline constexpr double kMjdJ2000 = 51544.5;
inline constexpr double kSecondsPerDay = 86400.0;

/// Circular 1 AU orbit in the ecliptic with mean motion k, rotated to the equator.
ObserverState circular_earth(double mjd);

struct Station {
  double latitude = 0.0;   ///< rad
  double longitude = 0.0;  ///< rad, east positive
  double radius = 6378.137;
};

/// Earth rotation angle (rad) at the given MJD.
double earth_rotation_angle(double mjd);

/// Station fixed on a sphere rotating with the Earth rotation angle.
ObserverState rotating_station(double mjd, const Station& st);

}  // namespace tsalink
