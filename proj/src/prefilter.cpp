/*
 * Copyright 2026 The tsalink Authors
 *
 * This software is licensed under the terms of the Apache Licence Version 2.0
 * which can be obtained at http://www.apache.org/licenses/LICENSE-2.0.
 */
#include "tsalink/prefilter.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "tsalink/error.hpp"

namespace tsalink {

namespace {

constexpr double kZeroRel = 1e-12;

// Real roots of a x^2 + b x + c, with a treated as zero below zero_abs.
std::vector<double> real_quadratic_roots(double a, double b, double c, double zero_abs) {
  if (std::abs(a) <= zero_abs) {
    if (std::abs(b) <= zero_abs) return {};
    return {-c / b};
  }
  const double disc = b * b - 4.0 * a * c;
  if (disc < 0.0) return {};
  const double t = -0.5 * (b + std::copysign(std::sqrt(disc), b));
  if (t == 0.0) return {0.0};
  return {t / a, c / t};
}

}  // namespace

const char* to_string(ConicKind k) {
  switch (k) {
    case ConicKind::Ellipse: return "ellipse";
    case ConicKind::Circle: return "circle";
    case ConicKind::Parabola: return "parabola";
    case ConicKind::Hyperbola: return "hyperbola";
    case ConicKind::Degenerate: return "degenerate";
  }
  return "unknown";
}

ConicClass classify_conic(const ConicQ& q) {
  const double zero = kZeroRel * q.scale();
  const bool a0 = std::abs(q.q20) <= zero;
  const bool c0 = std::abs(q.q02) <= zero;
  ConicClass out;
  if (a0 && c0) {
    out.kind = ConicKind::Degenerate;
    return out;
  }
  if (a0 || c0) {
    out.kind = ConicKind::Parabola;
    return out;
  }
  const double cx = -q.q10 / (2.0 * q.q20);
  const double cy = -q.q01 / (2.0 * q.q02);
  out.center = std::make_pair(cx, cy);
  if ((q.q20 > 0.0) != (q.q02 > 0.0)) {
    out.kind = ConicKind::Hyperbola;
    return out;
  }
  out.kind = std::abs(q.q20 - q.q02) <= kZeroRel * std::max(std::abs(q.q20), std::abs(q.q02))
                 ? ConicKind::Circle
                 : ConicKind::Ellipse;
  out.empty = q.eval(cx, cy) * q.q20 > 0.0;
  return out;
}

PrefilterDecision accept_pair(const ConicQ& q, const RangeBox& box, double band_rel) {
  if (!(box.rho_min < box.rho_max)) {
    throw Error(ErrorCode::InvalidArgument, "accept_pair: rho_min must be below rho_max");
  }
  PrefilterDecision out;
  const double zero = kZeroRel * q.scale();
  const bool no_rho1 = std::abs(q.q20) <= zero && std::abs(q.q10) <= zero;
  const bool no_rho2 = std::abs(q.q02) <= zero && std::abs(q.q01) <= zero;
  const ConicClass cls = classify_conic(q);
  if (q.scale() == 0.0 || cls.kind == ConicKind::Degenerate || no_rho1 || no_rho2) {
    out.accept = true;
    out.degenerate = true;
    out.reason = "degenerate conic (coefficient group vanishes); accepted";
    return out;
  }

  const double band = band_rel * box.rho_max;
  const double lo = box.rho_min - band, hi = box.rho_max + band;
  const double sides[2] = {box.rho_min, box.rho_max};

  bool meets_line = false;
  for (double a : sides) {
    // rho1 = a: q02 y^2 + q01 y + (q20 a^2 + q10 a + q00)
    for (double y : real_quadratic_roots(q.q02, q.q01, q.q20 * a * a + q.q10 * a + q.q00, zero)) {
      meets_line = true;
      if (y >= lo && y <= hi) {
        out.accept = true;
        out.witness = std::make_pair(a, y);
        out.reason = "conic crosses the boundary";
        return out;
      }
    }
    // rho2 = a: q20 x^2 + q10 x + (q02 a^2 + q01 a + q00)
    for (double x : real_quadratic_roots(q.q20, q.q10, q.q02 * a * a + q.q01 * a + q.q00, zero)) {
      meets_line = true;
      if (x >= lo && x <= hi) {
        out.accept = true;
        out.witness = std::make_pair(x, a);
        out.reason = "conic crosses the boundary";
        return out;
      }
    }
  }

  if (cls.kind == ConicKind::Hyperbola || cls.kind == ConicKind::Parabola) {
    out.reason = "unbounded conic misses the boundary";
    return out;
  }
  if (cls.empty) {
    out.reason = "conic has no real points";
    return out;
  }
  const auto [cx, cy] = *cls.center;
  // an ellipse around the box meets the side lines outside the box
  if (!meets_line && cx >= lo && cx <= hi && cy >= lo && cy <= hi) {
    out.accept = true;
    out.witness = cls.center;
    out.reason = "bounded conic inside the box";
    return out;
  }
  out.reason = "bounded conic outside the box";
  return out;
}

}  // namespace tsalink
