/*
 * Copyright 2026 The tsalink Authors
 *
 * This software is licensed under the terms of the Apache Licence Version 2.0
 * which can be obtained at http://www.apache.org/licenses/LICENSE-2.0.
 */
#include "tsalink/assessment.hpp"

#include <cmath>
#include <limits>

#include <Eigen/Dense>

namespace tsalink {

namespace {

using Vec8 = Eigen::Matrix<double, 8, 1>;
using Vec12 = Eigen::Matrix<double, 12, 1>;

constexpr double kInf = std::numeric_limits<double>::infinity();

Vec3 seg(const Vec12& e, int k) { return e.segment<3>(3 * k); }

Vec3 xi_direct(const Vec3& r1, const Vec3& v1, const Vec3& r2, const Vec3& v2) {
  const Vec3 k1 = 0.5 * v1.squaredNorm() * r1 - v1.dot(r1) * v1;
  const Vec3 k2 = 0.5 * v2.squaredNorm() * r2 - v2.dot(r2) * v2;
  return (k1 - k2).cross(r1 - r2);
}

// Finite-difference step for attributable component k.
double attributable_step(const Vec8& a, int k) {
  const int local = k % 4;
  if (local < 2) return 1e-7;
  const int base = (k / 4) * 4;
  const double rate = std::max(std::abs(a[base + 2]), std::abs(a[base + 3]));
  return 1e-7 * (rate > 0.0 ? rate : 1e-3);
}

}  // namespace

SolutionFlags physical_filter(const RawSolution& raw, const State6& s1, const State6& s2,
                              const AssessmentConfig& cfg) {
  SolutionFlags f;
  f.negative_range = !(raw.rho1 > 0.0) || !(raw.rho2 > 0.0);
  if (!f.negative_range) {
    f.out_of_range = raw.rho1 < cfg.rho_min || raw.rho1 > cfg.rho_max || raw.rho2 < cfg.rho_min ||
                     raw.rho2 > cfg.rho_max;
  }
  const double r1 = s1.r.norm(), r2 = s2.r.norm();
  const double e1 = r1 > 0.0 ? 0.5 * s1.rdot.squaredNorm() - cfg.mu / r1 : kInf;
  const double e2 = r2 > 0.0 ? 0.5 * s2.rdot.squaredNorm() - cfg.mu / r2 : kInf;
  f.unbounded = !(e1 < 0.0) || !(e2 < 0.0);
  return f;
}

SpuriousCheck spurious_check(const State6& s1, const State6& s2, const AssessmentConfig& cfg) {
  SpuriousCheck out;
  const Vec3 dr = s1.r - s2.r;
  const double dr2 = dr.squaredNorm();
  const double r1 = s1.r.norm();
  if (!(dr2 > 1e-24 * std::max(s1.r.squaredNorm(), s2.r.squaredNorm())) || !(r1 > 0.0)) {
    out.indeterminate = true;
    out.residual_intersys = kInf;
    out.lenz_gap = kInf;
    return out;
  }
  const Integrals i1 = integrals(s1, cfg.mu);
  const Integrals i2 = integrals(s2, cfg.mu);
  const double num = (i1.kappa - i2.kappa).dot(dr) + i1.energy * dr2;
  out.residual_intersys = std::abs(num) / (cfg.mu * dr2 / r1);
  out.lenz_gap = std::abs((i1.lenz - i2.lenz).norm() - 2.0);
  out.spurious_intersys = out.residual_intersys > cfg.tau_sp;
  out.spurious_fullsys = out.lenz_gap < cfg.tau_L2;
  return out;
}

double p1_star(const Vec3& r1, const Vec3& rdot1, const Vec3& r2, const Vec3& rdot2, const Vec3& q1) {
  return xi_direct(r1, rdot1, r2, rdot2).dot(r1 - q1);
}

P1StarGradient p1_star_gradient(const Vec3& r1, const Vec3& rdot1, const Vec3& r2,
                                const Vec3& rdot2, const Vec3& q1) {
  const Vec3 v1 = r1 - q1;
  const Vec3 dr = r1 - r2;
  const double half_dv2 = 0.5 * (rdot2.squaredNorm() - rdot1.squaredNorm());
  const double w1 = rdot1.dot(r1);
  const double w2 = rdot2.dot(r2);
  const double t1 = rdot1.cross(dr).dot(v1);
  const double t2 = rdot2.cross(dr).dot(v1);
  const double t12 = r1.cross(r2).dot(v1);

  P1StarGradient g;
  g.d_r1 = half_dv2 * q1.cross(r2) - t1 * rdot1 - w1 * (-q1.cross(rdot1) + r2.cross(rdot1)) +
           w2 * (-q1.cross(rdot2) + r2.cross(rdot2));
  g.d_rdot1 = -t12 * rdot1 - t1 * r1 - w1 * dr.cross(v1);
  g.d_r2 = -half_dv2 * q1.cross(r1) - w1 * rdot1.cross(v1) + t2 * rdot2 + w2 * rdot2.cross(v1);
  g.d_rdot2 = t12 * rdot2 + t2 * r2 + w2 * dr.cross(v1);
  return g;
}

Vec12 attributable_to_cartesian(const Vec4& R, const Vec8& A, const ObserverState& o1,
                                const ObserverState& o2) {
  const LosFrame f1 = los_frame(A[0], A[1], A[2], A[3]);
  const LosFrame f2 = los_frame(A[4], A[5], A[6], A[7]);
  const State6 s1 = eval_state(f1, o1, R[0], R[1]);
  const State6 s2 = eval_state(f2, o2, R[2], R[3]);
  Vec12 e;
  e << s1.r, s1.rdot, s2.r, s2.rdot;
  return e;
}

Vec4 linkage_map(const Vec4& R, const Vec8& A, const ObserverState& o1, const ObserverState& o2) {
  const Vec12 e = attributable_to_cartesian(R, A, o1, o2);
  const Vec3 r1 = seg(e, 0), v1 = seg(e, 1), r2 = seg(e, 2), v2 = seg(e, 3);
  const Vec3 dc = r1.cross(v1) - r2.cross(v2);
  const Vec3 erho1 = los_frame(A[0], A[1], A[2], A[3]).erho;
  Vec4 phi;
  phi << dc, xi_direct(r1, v1, r2, v2).dot(erho1);
  return phi;
}

Mat4x12 dpsi_decar(const Vec3& r1, const Vec3& rdot1, const Vec3& r2, const Vec3& rdot2,
                   const Vec3& q1, double rho1) {
  Mat4x12 m;
  m.block<3, 3>(0, 0) = -hat(rdot1);
  m.block<3, 3>(0, 3) = hat(r1);
  m.block<3, 3>(0, 6) = hat(rdot2);
  m.block<3, 3>(0, 9) = -hat(r2);
  const P1StarGradient g = p1_star_gradient(r1, rdot1, r2, rdot2, q1);
  m.block<1, 3>(3, 0) = g.d_r1.transpose() / rho1;
  m.block<1, 3>(3, 3) = g.d_rdot1.transpose() / rho1;
  m.block<1, 3>(3, 6) = g.d_r2.transpose() / rho1;
  m.block<1, 3>(3, 9) = g.d_rdot2.transpose() / rho1;
  return m;
}

Vec8 pack_attributables(const Attributable& a1, const Attributable& a2) {
  Vec8 a;
  a << a1.alpha, a1.delta, a1.alphadot, a1.deltadot, a2.alpha, a2.delta, a2.alphadot, a2.deltadot;
  return a;
}

CovariancePack propagate_covariance(const Vec4& R, const Attributable& a1, const Attributable& a2,
                                    const ObserverState& o1, const ObserverState& o2) {
  CovariancePack pack;
  pack.gamma_A.block<4, 4>(0, 0) = a1.gamma;
  pack.gamma_A.block<4, 4>(4, 4) = a2.gamma;

  const Vec8 A = pack_attributables(a1, a2);
  const Vec12 e = attributable_to_cartesian(R, A, o1, o2);
  const LosFrame f1 = a1.frame();
  const LosFrame f2 = a2.frame();

  // dE_car / dR, E_car = (r1, rdot1, r2, rdot2), R = (rho1, rhodot1, rho2, rhodot2)
  Eigen::Matrix<double, 12, 4> de_dr = Eigen::Matrix<double, 12, 4>::Zero();
  de_dr.block<3, 1>(0, 0) = f1.erho;
  de_dr.block<3, 1>(3, 0) = f1.eperp;
  de_dr.block<3, 1>(3, 1) = f1.erho;
  de_dr.block<3, 1>(6, 2) = f2.erho;
  de_dr.block<3, 1>(9, 2) = f2.eperp;
  de_dr.block<3, 1>(9, 3) = f2.erho;

  const Mat4x12 dpsi = dpsi_decar(seg(e, 0), seg(e, 1), seg(e, 2), seg(e, 3), o1.q, R[0]);
  pack.dPhi_dR = dpsi * de_dr;

  Eigen::Matrix<double, 12, 8> de_da;
  for (int k = 0; k < 8; ++k) {
    const double h = attributable_step(A, k);
    Vec8 ap = A, am = A;
    ap[k] += h;
    am[k] -= h;
    pack.dPhi_dA.col(k) = (linkage_map(R, ap, o1, o2) - linkage_map(R, am, o1, o2)) / (2.0 * h);
    de_da.col(k) = (attributable_to_cartesian(R, ap, o1, o2) - attributable_to_cartesian(R, am, o1, o2)) /
                   (2.0 * h);
  }

  const Eigen::FullPivLU<Mat4> lu(pack.dPhi_dR);
  if (!lu.isInvertible() || !(std::abs(lu.determinant()) > 0.0) ||
      lu.rcond() < 1e-14) {
    pack.available = false;
    return pack;
  }
  const Mat4x8 dr_da = -lu.solve(pack.dPhi_dA);
  pack.dEcar1_dA = de_dr.topRows<6>() * dr_da + de_da.topRows<6>();
  const Mat6 g = pack.dEcar1_dA * pack.gamma_A * pack.dEcar1_dA.transpose();
  pack.gamma_car1 = 0.5 * (g + g.transpose());
  pack.available = true;
  return pack;
}

Vec4 predict_attributable(const State6& state, const ObserverState& obs) {
  const Vec3 v = state.r - obs.q;
  const double rho = v.norm();
  if (!(rho > 0.0)) throw DomainError("predict_attributable: body at observer");
  const double alpha = std::atan2(v.y(), v.x());
  const double delta = std::asin(std::clamp(v.z() / rho, -1.0, 1.0));
  const LosFrame f = los_frame(alpha, delta, 0.0, 0.0);
  const Vec3 w = state.rdot - obs.qdot;
  Vec4 a;
  a << alpha, delta, w.dot(f.ealpha) / (rho * std::cos(delta)), w.dot(f.edelta) / rho;
  return a;
}

double compatibility_penalty(const State6& state1, const Mat6* cov_car1, const Attributable& a2,
                             const ObserverState& o2, double mu, bool* propagation_failed) {
  if (propagation_failed != nullptr) *propagation_failed = false;
  const double dt = a2.epoch - state1.epoch;
  auto predict = [&](const State6& s) {
    return predict_attributable(propagate_two_body(s, dt, mu), o2);
  };

  Vec4 pred;
  Mat4 gamma_pred = Mat4::Zero();
  try {
    pred = predict(state1);
    if (cov_car1 != nullptr) {
      Eigen::Matrix<double, 4, 6> jac;
      const double hr = 1e-7 * state1.r.norm();
      const double hv = 1e-7 * state1.rdot.norm();
      for (int k = 0; k < 6; ++k) {
        State6 sp = state1, sm = state1;
        const double h = k < 3 ? hr : hv;
        if (k < 3) {
          sp.r[k] += h;
          sm.r[k] -= h;
        } else {
          sp.rdot[k - 3] += h;
          sm.rdot[k - 3] -= h;
        }
        Vec4 d = predict(sp) - predict(sm);
        d[0] = wrap_pi(d[0]);
        jac.col(k) = d / (2.0 * h);
      }
      gamma_pred = jac * (*cov_car1) * jac.transpose();
    }
  } catch (const Error&) {
    if (propagation_failed != nullptr) *propagation_failed = true;
    return kInf;
  }

  Vec4 diff;
  diff << wrap_pi(a2.alpha - pred[0]), a2.delta - pred[1], a2.alphadot - pred[2],
      a2.deltadot - pred[3];
  const Mat4 s = a2.gamma + gamma_pred;
  const Eigen::LDLT<Mat4> ldlt(s);
  if (ldlt.info() != Eigen::Success || !ldlt.isPositive()) return kInf;
  const double d2 = diff.dot(ldlt.solve(diff));
  if (!(d2 >= 0.0) || !std::isfinite(d2)) return kInf;
  return std::sqrt(d2);
}

std::vector<LinkageSolution> assess_solutions(const LinkageResult& result, const Attributable& a1,
                                              const Attributable& a2, const ObserverState& o1,
                                              const ObserverState& o2, const AssessmentConfig& cfg) {
  std::vector<LinkageSolution> out;
  const LosFrame f1 = a1.frame();
  const LosFrame f2 = a2.frame();
  for (const RawSolution& raw : result.solutions) {
    LinkageSolution sol;
    sol.raw = raw;
    sol.rho1 = raw.rho1;
    sol.rhodot1 = raw.rhodot1;
    sol.rho2 = raw.rho2;
    sol.rhodot2 = raw.rhodot2;
    sol.state1 = eval_state(f1, o1, raw.rho1, raw.rhodot1);
    sol.state2 = eval_state(f2, o2, raw.rho2, raw.rhodot2);
    sol.state1.epoch = a1.epoch;
    sol.state2.epoch = a2.epoch;

    sol.flags = physical_filter(raw, sol.state1, sol.state2, cfg);
    const double rn1 = sol.state1.r.norm(), rn2 = sol.state2.r.norm();
    sol.energy1 = rn1 > 0.0 ? 0.5 * sol.state1.rdot.squaredNorm() - cfg.mu / rn1 : kInf;
    sol.energy2 = rn2 > 0.0 ? 0.5 * sol.state2.rdot.squaredNorm() - cfg.mu / rn2 : kInf;

    if (rn1 > 0.0 && rn2 > 0.0) {
      sol.spurious = spurious_check(sol.state1, sol.state2, cfg);
      sol.flags.spurious_intersys = sol.spurious.spurious_intersys;
      sol.flags.spurious_fullsys = sol.spurious.spurious_fullsys;
      sol.flags.indeterminate = sol.spurious.indeterminate;
    } else {
      sol.flags.indeterminate = true;
    }

    if (!sol.flags.unbounded) {
      try {
        sol.kepler1 = cartesian_to_keplerian(sol.state1, cfg.mu);
        sol.kepler2 = cartesian_to_keplerian(sol.state2, cfg.mu);
      } catch (const UnboundedOrbitError&) {
        sol.flags.unbounded = true;
      }
    }

    if (!sol.flags.negative_range && raw.rho1 != 0.0) {
      Vec4 r;
      r << raw.rho1, raw.rhodot1, raw.rho2, raw.rhodot2;
      sol.covariance = propagate_covariance(r, a1, a2, o1, o2);
    }
    sol.flags.covariance_unavailable = !sol.covariance.available;

    if (!sol.flags.negative_range && !sol.flags.unbounded) {
      bool failed = false;
      sol.penalty = compatibility_penalty(
          sol.state1, sol.covariance.available ? &sol.covariance.gamma_car1 : nullptr, a2, o2,
          cfg.mu, &failed);
      sol.flags.propagation_failed = failed;
    }
    out.push_back(std::move(sol));
  }
  return out;
}

}  // namespace tsalink
