/*
 * Copyright 2026 The tsalink Authors
 *
 * This software is licensed under the terms of the Apache Licence Version 2.0
 * which can be obtained at http://www.apache.org/licenses/LICENSE-2.0.
 */
#pragma once

// Dense polynomial algebra in the two ranges (rho1, rho2) and the univariate
// elimination machinery built on it: reduction modulo the conic q, Sylvester
// resultants, simultaneous root finding and deflation.

#include <array>
#include <complex>
#include <cstddef>
#include <initializer_list>
#include <utility>
#include <vector>

#include "tsalink/error.hpp"
#include "tsalink/geometry.hpp"

namespace tsalink {

using Complex = std::complex<double>;

/// Coefficient-level zero cutoff relative to the characteristic scale.
inline constexpr double kEpsDeg = 1e-10;

class UniPoly {
 public:
  UniPoly() = default;
  explicit UniPoly(std::vector<double> coeffs) : a_(std::move(coeffs)) {}
  UniPoly(std::initializer_list<double> coeffs) : a_(coeffs) {}

  static UniPoly constant(double c) { return UniPoly({c}); }
  /// x - root
  static UniPoly linear_factor(double root) { return UniPoly({-root, 1.0}); }

  /// Index of the highest stored coefficient (-1 for the empty polynomial).
  int degree() const { return static_cast<int>(a_.size()) - 1; }
  /// Degree after discarding leading coefficients below rel_tol * max|a|.
  int degree(double rel_tol) const;

  double operator[](std::size_t k) const { return k < a_.size() ? a_[k] : 0.0; }
  double& coeff(std::size_t k);
  const std::vector<double>& coeffs() const { return a_; }
  std::size_t size() const { return a_.size(); }

  double eval(double x) const;
  Complex eval(Complex z) const;
  /// sum |a_k| |z|^k, the natural scale for backward-error tests.
  double abs_eval(double r) const;
  UniPoly derivative() const;
  /// Drops leading coefficients below rel_tol * max|a| (keeps at least one).
  UniPoly trimmed(double rel_tol = 1e-12) const;
  /// Max-abs coefficient.
  double norm() const;
  bool is_zero() const;

  UniPoly& operator+=(const UniPoly& o);
  UniPoly& operator-=(const UniPoly& o);
  UniPoly& operator*=(double s);

  friend UniPoly operator+(UniPoly a, const UniPoly& b) { return a += b; }
  friend UniPoly operator-(UniPoly a, const UniPoly& b) { return a -= b; }
  friend UniPoly operator*(UniPoly a, double s) { return a *= s; }
  friend UniPoly operator*(double s, UniPoly a) { return a *= s; }
  friend UniPoly operator*(const UniPoly& a, const UniPoly& b);

 private:
  std::vector<double> a_;
};

enum class Var { Rho1, Rho2 };

/// Dense bivariate polynomial sum c[i][j] rho1^i rho2^j with i, j <= 6.
class BiPoly {
 public:
  static constexpr int kMaxDeg = 6;
  static constexpr int kDim = kMaxDeg + 1;

  BiPoly() { c_.fill(0.0); }

  static BiPoly constant(double c);
  /// a*rho1 + b*rho2 + c
  static BiPoly linear(double a, double b, double c);

  double operator()(int i, int j) const { return c_[idx(i, j)]; }
  double& at(int i, int j);

  double eval(double x, double y) const;
  Complex eval(Complex x, Complex y) const;

  /// Highest power of `v` with a coefficient above rel_tol * max|c|.
  int degree_in(Var v, double rel_tol = 1e-14) const;
  int total_degree(double rel_tol = 1e-14) const;
  double norm() const;

  /// Coefficients a_h(rho2) with p = sum_h a_h(rho2) rho1^h.
  std::vector<UniPoly> in_rho1() const;
  /// Coefficients a_h(rho1) with p = sum_h a_h(rho1) rho2^h.
  std::vector<UniPoly> in_rho2() const;

  /// Swaps the roles of rho1 and rho2.
  BiPoly transposed() const;

  BiPoly& operator+=(const BiPoly& o);
  BiPoly& operator-=(const BiPoly& o);
  BiPoly& operator*=(double s);

  friend BiPoly operator+(BiPoly a, const BiPoly& b) { return a += b; }
  friend BiPoly operator-(BiPoly a, const BiPoly& b) { return a -= b; }
  friend BiPoly operator*(BiPoly a, double s) { return a *= s; }
  friend BiPoly operator*(double s, BiPoly a) { return a *= s; }
  /// Throws AlgebraError if a product term exceeds kMaxDeg in either variable.
  friend BiPoly operator*(const BiPoly& a, const BiPoly& b);

 private:
  static constexpr int idx(int i, int j) { return i * kDim + j; }
  std::array<double, kDim * kDim> c_;
};

/// Polynomial 3-vector; used for r_j, rdot_j and xi as functions of the ranges.
struct BiPolyVec3 {
  std::array<BiPoly, 3> comp;

  static BiPolyVec3 constant(const Vec3& v);
  /// v * p
  static BiPolyVec3 times(const Vec3& v, const BiPoly& p);

  Vec3 eval(double x, double y) const;
  /// Coefficient vector of rho1^i rho2^j.
  Vec3 coeff(int i, int j) const;
  double norm() const;

  BiPolyVec3& operator+=(const BiPolyVec3& o);
  BiPolyVec3& operator-=(const BiPolyVec3& o);

  friend BiPolyVec3 operator+(BiPolyVec3 a, const BiPolyVec3& b) { return a += b; }
  friend BiPolyVec3 operator-(BiPolyVec3 a, const BiPolyVec3& b) { return a -= b; }
  friend BiPolyVec3 operator*(const BiPoly& s, const BiPolyVec3& v);
  friend BiPolyVec3 operator*(double s, const BiPolyVec3& v);
};

BiPoly dot(const BiPolyVec3& a, const BiPolyVec3& b);
BiPoly dot(const BiPolyVec3& a, const Vec3& b);
BiPolyVec3 cross(const BiPolyVec3& a, const BiPolyVec3& b);

/// Conic q20 rho1^2 + q10 rho1 + q02 rho2^2 + q01 rho2 + q00 (no cross term)
/// and its critical points.
struct ConicQ {
  double q20 = 0.0;
  double q10 = 0.0;
  double q02 = 0.0;
  double q01 = 0.0;
  double q00 = 0.0;
  double rho1_prime = 0.0;
  double rho2_prime = 0.0;
  double rho1_second = 0.0;
  double rho2_second = 0.0;

  double eval(double x, double y) const {
    return q20 * x * x + q10 * x + q02 * y * y + q01 * y + q00;
  }
  BiPoly as_bipoly() const;
  /// b0(rho2) = q02 rho2^2 + q01 rho2 + q00
  UniPoly b0() const { return UniPoly({q00, q01, q02}); }
  double scale() const;
};

/// rho1^h == beta[h](rho2) rho1 + gamma[h](rho2) modulo q, for h = 2..5.
struct QReduction {
  static constexpr int kMaxPower = 5;
  std::array<UniPoly, kMaxPower + 1> beta;
  std::array<UniPoly, kMaxPower + 1> gamma;
};

/// Throws DegenerateError when |q20| <= kEpsDeg * q.scale().
QReduction q_reduction(const ConicQ& q);

struct LinearInRho1 {
  UniPoly a1;  ///< coefficient of rho1
  UniPoly a0;
};

/// p == a1(rho2) rho1 + a0(rho2) modulo q. Requires deg_rho1(p) <= 5.
LinearInRho1 reduce_mod_q(const BiPoly& p, const QReduction& red);

/// res(p, q) with respect to `eliminate`, as a polynomial in the other
/// variable. Evaluation at roots of unity on a circle of radius `radius`
/// followed by inverse DFT; each point is a Sylvester determinant.
UniPoly sylvester_resultant(const BiPoly& p, const BiPoly& q, Var eliminate,
                            double radius = 1.0);

struct PolyRoot {
  Complex z;
  /// |u(z)| on the input coefficients.
  double residual = 0.0;
  /// Roots sharing a cluster id lie within the cluster tolerance.
  int cluster = 0;
  /// Max distance to the cluster centroid (0 for simple roots).
  double cluster_radius = 0.0;
};

struct RootOptions {
  int max_iter = 200;
  int polish_steps = 2;
  double cluster_tol = 1e-6;
};

class RootFinderError : public NumericError {
 public:
  RootFinderError(const std::string& what, std::vector<PolyRoot> partial)
      : NumericError(what), partial_(std::move(partial)) {}
  const std::vector<PolyRoot>& partial() const { return partial_; }

 private:
  std::vector<PolyRoot> partial_;
};

/// All complex roots by Aberth-Ehrlich iteration (deterministic start on a
/// circle), polished by Newton steps on the original coefficients.
std::vector<PolyRoot> poly_roots(const UniPoly& u, const RootOptions& opts = {});

struct Deflation {
  UniPoly quotient;
  double remainder = 0.0;
  /// Remainder exceeded tol * ||u|| * max(1, |root|)^deg.
  bool warning = false;
};

/// Synthetic division of u by (x - root).
Deflation deflate(const UniPoly& u, double root, double tol = 1e-6);

}  // namespace tsalink
