/*
 * Copyright 2026 The tsalink Authors
 *
 * This software is licensed under the terms of the Apache Licence Version 2.0
 * which can be obtained at http://www.apache.org/licenses/LICENSE-2.0.
 */
#pragma once

// Cheap screening of attributable pairs: does the conic q = 0 meet the
// admissible square of ranges?

#include <optional>
#include <string>
#include <utility>

#include "tsalink/bipoly.hpp"

namespace tsalink {

struct RangeBox {
  double rho_min = 0.0;
  double rho_max = 0.0;
};

enum class ConicKind { Ellipse, Circle, Parabola, Hyperbola, Degenerate };

struct ConicClass {
  ConicKind kind = ConicKind::Degenerate;
  std::optional<std::pair<double, double>> center;
  /// Ellipse with no real points (q has the sign of q20 at the center).
  bool empty = false;
};

/// q has no rho1 rho2 term, so the type follows from the signs of q20, q02.
ConicClass classify_conic(const ConicQ& q);

struct PrefilterDecision {
  bool accept = false;
  std::optional<std::pair<double, double>> witness;
  std::string reason;
  /// Accepted without testing because a coefficient group vanishes.
  bool degenerate = false;
};

/// Intersections with the four sides first (within a band of
/// band_rel * rho_max), then boundedness and the center.
PrefilterDecision accept_pair(const ConicQ& q, const RangeBox& box, double band_rel = 1e-9);

const char* to_string(ConicKind k);

}  // namespace tsalink
