/*
 * Copyright 2026 The tsalink Authors
 *
 * This software is licensed under the terms of the Apache Licence Version 2.0
 * which can be obtained at http://www.apache.org/licenses/LICENSE-2.0.
 */
#include "tsalink/bipoly.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include <Eigen/Dense>

namespace tsalink {

// ---------------------------------------------------------------- UniPoly

int UniPoly::degree(double rel_tol) const {
  const double cut = rel_tol * norm();
  for (int k = degree(); k >= 0; --k) {
    if (std::abs(a_[k]) > cut) return k;
  }
  return is_zero() ? -1 : 0;
}

double& UniPoly::coeff(std::size_t k) {
  if (k >= a_.size()) a_.resize(k + 1, 0.0);
  return a_[k];
}

double UniPoly::eval(double x) const {
  double s = 0.0;
  for (auto it = a_.rbegin(); it != a_.rend(); ++it) s = s * x + *it;
  return s;
}

Complex UniPoly::eval(Complex z) const {
  Complex s = 0.0;
  for (auto it = a_.rbegin(); it != a_.rend(); ++it) s = s * z + *it;
  return s;
}

double UniPoly::abs_eval(double r) const {
  double s = 0.0;
  for (auto it = a_.rbegin(); it != a_.rend(); ++it) s = s * r + std::abs(*it);
  return s;
}

UniPoly UniPoly::derivative() const {
  if (a_.size() <= 1) return UniPoly({0.0});
  std::vector<double> d(a_.size() - 1);
  for (std::size_t k = 1; k < a_.size(); ++k) d[k - 1] = static_cast<double>(k) * a_[k];
  return UniPoly(std::move(d));
}

UniPoly UniPoly::trimmed(double rel_tol) const {
  const int d = std::max(0, degree(rel_tol));
  std::vector<double> out(a_.begin(), a_.begin() + std::min<std::size_t>(a_.size(), d + 1));
  if (out.empty()) out.push_back(0.0);
  return UniPoly(std::move(out));
}

double UniPoly::norm() const {
  double m = 0.0;
  for (double c : a_) m = std::max(m, std::abs(c));
  return m;
}

bool UniPoly::is_zero() const {
  return std::all_of(a_.begin(), a_.end(), [](double c) { return c == 0.0; });
}

UniPoly& UniPoly::operator+=(const UniPoly& o) {
  if (o.a_.size() > a_.size()) a_.resize(o.a_.size(), 0.0);
  for (std::size_t k = 0; k < o.a_.size(); ++k) a_[k] += o.a_[k];
  return *this;
}

UniPoly& UniPoly::operator-=(const UniPoly& o) {
  if (o.a_.size() > a_.size()) a_.resize(o.a_.size(), 0.0);
  for (std::size_t k = 0; k < o.a_.size(); ++k) a_[k] -= o.a_[k];
  return *this;
}

UniPoly& UniPoly::operator*=(double s) {
  for (double& c : a_) c *= s;
  return *this;
}

UniPoly operator*(const UniPoly& a, const UniPoly& b) {
  if (a.a_.empty() || b.a_.empty()) return UniPoly({0.0});
  std::vector<double> out(a.a_.size() + b.a_.size() - 1, 0.0);
  for (std::size_t i = 0; i < a.a_.size(); ++i) {
    for (std::size_t j = 0; j < b.a_.size(); ++j) out[i + j] += a.a_[i] * b.a_[j];
  }
  return UniPoly(std::move(out));
}

// ---------------------------------------------------------------- BiPoly

BiPoly BiPoly::constant(double c) {
  BiPoly p;
  p.at(0, 0) = c;
  return p;
}

BiPoly BiPoly::linear(double a, double b, double c) {
  BiPoly p;
  p.at(1, 0) = a;
  p.at(0, 1) = b;
  p.at(0, 0) = c;
  return p;
}

double& BiPoly::at(int i, int j) {
  if (i < 0 || j < 0 || i > kMaxDeg || j > kMaxDeg) {
    throw AlgebraError("BiPoly: exponent outside storage bounds");
  }
  return c_[idx(i, j)];
}

double BiPoly::eval(double x, double y) const {
  double s = 0.0;
  for (int i = kMaxDeg; i >= 0; --i) {
    double row = 0.0;
    for (int j = kMaxDeg; j >= 0; --j) row = row * y + c_[idx(i, j)];
    s = s * x + row;
  }
  return s;
}

Complex BiPoly::eval(Complex x, Complex y) const {
  Complex s = 0.0;
  for (int i = kMaxDeg; i >= 0; --i) {
    Complex row = 0.0;
    for (int j = kMaxDeg; j >= 0; --j) row = row * y + c_[idx(i, j)];
    s = s * x + row;
  }
  return s;
}

int BiPoly::degree_in(Var v, double rel_tol) const {
  const double cut = rel_tol * norm();
  int deg = -1;
  for (int i = 0; i <= kMaxDeg; ++i) {
    for (int j = 0; j <= kMaxDeg; ++j) {
      if (std::abs(c_[idx(i, j)]) > cut && (c_[idx(i, j)] != 0.0)) {
        deg = std::max(deg, v == Var::Rho1 ? i : j);
      }
    }
  }
  return deg;
}

int BiPoly::total_degree(double rel_tol) const {
  const double cut = rel_tol * norm();
  int deg = -1;
  for (int i = 0; i <= kMaxDeg; ++i) {
    for (int j = 0; j <= kMaxDeg; ++j) {
      if (std::abs(c_[idx(i, j)]) > cut && c_[idx(i, j)] != 0.0) deg = std::max(deg, i + j);
    }
  }
  return deg;
}

double BiPoly::norm() const {
  double m = 0.0;
  for (double c : c_) m = std::max(m, std::abs(c));
  return m;
}

std::vector<UniPoly> BiPoly::in_rho1() const {
  std::vector<UniPoly> out(kDim);
  for (int i = 0; i <= kMaxDeg; ++i) {
    std::vector<double> a(kDim);
    for (int j = 0; j <= kMaxDeg; ++j) a[j] = c_[idx(i, j)];
    out[i] = UniPoly(std::move(a));
  }
  return out;
}

std::vector<UniPoly> BiPoly::in_rho2() const { return transposed().in_rho1(); }

BiPoly BiPoly::transposed() const {
  BiPoly t;
  for (int i = 0; i <= kMaxDeg; ++i) {
    for (int j = 0; j <= kMaxDeg; ++j) t.c_[idx(j, i)] = c_[idx(i, j)];
  }
  return t;
}

BiPoly& BiPoly::operator+=(const BiPoly& o) {
  for (std::size_t k = 0; k < c_.size(); ++k) c_[k] += o.c_[k];
  return *this;
}

BiPoly& BiPoly::operator-=(const BiPoly& o) {
  for (std::size_t k = 0; k < c_.size(); ++k) c_[k] -= o.c_[k];
  return *this;
}

BiPoly& BiPoly::operator*=(double s) {
  for (double& c : c_) c *= s;
  return *this;
}

BiPoly operator*(const BiPoly& a, const BiPoly& b) {
  BiPoly out;
  for (int i1 = 0; i1 <= BiPoly::kMaxDeg; ++i1) {
    for (int j1 = 0; j1 <= BiPoly::kMaxDeg; ++j1) {
      const double x = a.c_[BiPoly::idx(i1, j1)];
      if (x == 0.0) continue;
      for (int i2 = 0; i2 <= BiPoly::kMaxDeg; ++i2) {
        for (int j2 = 0; j2 <= BiPoly::kMaxDeg; ++j2) {
          const double y = b.c_[BiPoly::idx(i2, j2)];
          if (y == 0.0) continue;
          if (i1 + i2 > BiPoly::kMaxDeg || j1 + j2 > BiPoly::kMaxDeg) {
            throw AlgebraError("BiPoly: product degree exceeds storage bounds");
          }
          out.c_[BiPoly::idx(i1 + i2, j1 + j2)] += x * y;
        }
      }
    }
  }
  return out;
}

// ---------------------------------------------------------------- BiPolyVec3

BiPolyVec3 BiPolyVec3::constant(const Vec3& v) {
  BiPolyVec3 out;
  for (int k = 0; k < 3; ++k) out.comp[k] = BiPoly::constant(v[k]);
  return out;
}

BiPolyVec3 BiPolyVec3::times(const Vec3& v, const BiPoly& p) {
  BiPolyVec3 out;
  for (int k = 0; k < 3; ++k) out.comp[k] = v[k] * p;
  return out;
}

Vec3 BiPolyVec3::eval(double x, double y) const {
  return Vec3(comp[0].eval(x, y), comp[1].eval(x, y), comp[2].eval(x, y));
}

Vec3 BiPolyVec3::coeff(int i, int j) const {
  return Vec3(comp[0](i, j), comp[1](i, j), comp[2](i, j));
}

double BiPolyVec3::norm() const {
  return std::max({comp[0].norm(), comp[1].norm(), comp[2].norm()});
}

BiPolyVec3& BiPolyVec3::operator+=(const BiPolyVec3& o) {
  for (int k = 0; k < 3; ++k) comp[k] += o.comp[k];
  return *this;
}

BiPolyVec3& BiPolyVec3::operator-=(const BiPolyVec3& o) {
  for (int k = 0; k < 3; ++k) comp[k] -= o.comp[k];
  return *this;
}

BiPolyVec3 operator*(const BiPoly& s, const BiPolyVec3& v) {
  BiPolyVec3 out;
  for (int k = 0; k < 3; ++k) out.comp[k] = s * v.comp[k];
  return out;
}

BiPolyVec3 operator*(double s, const BiPolyVec3& v) {
  BiPolyVec3 out;
  for (int k = 0; k < 3; ++k) out.comp[k] = s * v.comp[k];
  return out;
}

BiPoly dot(const BiPolyVec3& a, const BiPolyVec3& b) {
  return a.comp[0] * b.comp[0] + a.comp[1] * b.comp[1] + a.comp[2] * b.comp[2];
}

BiPoly dot(const BiPolyVec3& a, const Vec3& b) {
  return b.x() * a.comp[0] + b.y() * a.comp[1] + b.z() * a.comp[2];
}

BiPolyVec3 cross(const BiPolyVec3& a, const BiPolyVec3& b) {
  BiPolyVec3 out;
  out.comp[0] = a.comp[1] * b.comp[2] - a.comp[2] * b.comp[1];
  out.comp[1] = a.comp[2] * b.comp[0] - a.comp[0] * b.comp[2];
  out.comp[2] = a.comp[0] * b.comp[1] - a.comp[1] * b.comp[0];
  return out;
}

// ---------------------------------------------------------------- conic

BiPoly ConicQ::as_bipoly() const {
  BiPoly p;
  p.at(2, 0) = q20;
  p.at(1, 0) = q10;
  p.at(0, 2) = q02;
  p.at(0, 1) = q01;
  p.at(0, 0) = q00;
  return p;
}

double ConicQ::scale() const {
  return std::max({std::abs(q20), std::abs(q10), std::abs(q02), std::abs(q01), std::abs(q00)});
}

QReduction q_reduction(const ConicQ& q) {
  if (!(std::abs(q.q20) > kEpsDeg * q.scale())) {
    throw DegenerateError("q_reduction: q20 vanishes (conic not quadratic in rho1)");
  }
  QReduction red;
  red.beta[0] = UniPoly({0.0});
  red.gamma[0] = UniPoly({1.0});
  red.beta[1] = UniPoly({1.0});
  red.gamma[1] = UniPoly({0.0});
  red.beta[2] = UniPoly({-q.q10 / q.q20});
  red.gamma[2] = q.b0() * (-1.0 / q.q20);
  for (int h = 2; h < QReduction::kMaxPower; ++h) {
    red.beta[h + 1] = red.beta[h] * red.beta[2] + red.gamma[h];
    red.gamma[h + 1] = red.beta[h] * red.gamma[2];
  }
  return red;
}

LinearInRho1 reduce_mod_q(const BiPoly& p, const QReduction& red) {
  const std::vector<UniPoly> a = p.in_rho1();
  for (int h = QReduction::kMaxPower + 1; h <= BiPoly::kMaxDeg; ++h) {
    if (!a[h].is_zero()) throw AlgebraError("reduce_mod_q: degree in rho1 exceeds 5");
  }
  LinearInRho1 out{a[1], a[0]};
  for (int h = 2; h <= QReduction::kMaxPower; ++h) {
    if (a[h].is_zero()) continue;
    out.a1 += a[h] * red.beta[h];
    out.a0 += a[h] * red.gamma[h];
  }
  return out;
}

// ---------------------------------------------------------------- resultant

UniPoly sylvester_resultant(const BiPoly& p, const BiPoly& q, Var eliminate,
                            double radius) {
  const std::vector<UniPoly> pc = eliminate == Var::Rho1 ? p.in_rho1() : p.in_rho2();
  const std::vector<UniPoly> qc = eliminate == Var::Rho1 ? q.in_rho1() : q.in_rho2();
  const Var keep = eliminate == Var::Rho1 ? Var::Rho2 : Var::Rho1;

  const int m = p.degree_in(eliminate);
  const int n = q.degree_in(eliminate);
  if (m < 1 || n < 1) {
    throw DegenerateError("sylvester_resultant: polynomial constant in the eliminated variable");
  }

  const int bound_partial = m * q.degree_in(keep) + n * p.degree_in(keep);
  const int bound_total = p.total_degree() * q.total_degree();
  const int nres = std::max(0, std::min(bound_partial, bound_total));
  const int npts = nres + 1;

  const int size = m + n;
  std::vector<Complex> values(npts);
  for (int k = 0; k < npts; ++k) {
    const Complex z = std::polar(radius, 2.0 * std::numbers::pi * k / npts);
    Eigen::MatrixXcd s = Eigen::MatrixXcd::Zero(size, size);
    for (int row = 0; row < n; ++row) {
      for (int d = 0; d <= m; ++d) s(row, row + d) = pc[m - d].eval(z);
    }
    for (int row = 0; row < m; ++row) {
      for (int d = 0; d <= n; ++d) s(n + row, row + d) = qc[n - d].eval(z);
    }
    values[k] = s.partialPivLu().determinant();
  }

  std::vector<double> coef(npts, 0.0);
  for (int j = 0; j < npts; ++j) {
    Complex acc = 0.0;
    for (int k = 0; k < npts; ++k) {
      acc += values[k] * std::polar(1.0, -2.0 * std::numbers::pi * j * k / npts);
    }
    coef[j] = (acc / static_cast<double>(npts)).real() / std::pow(radius, j);
  }
  return UniPoly(std::move(coef));
}

// ---------------------------------------------------------------- roots

namespace {

void assign_clusters(std::vector<PolyRoot>& roots, double tol) {
  const std::size_t n = roots.size();
  std::vector<int> label(n, -1);
  int next = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (label[i] >= 0) continue;
    label[i] = next;
    // single-link grouping
    std::vector<std::size_t> stack{i};
    while (!stack.empty()) {
      const std::size_t a = stack.back();
      stack.pop_back();
      for (std::size_t b = 0; b < n; ++b) {
        if (label[b] < 0 && std::abs(roots[a].z - roots[b].z) < tol) {
          label[b] = next;
          stack.push_back(b);
        }
      }
    }
    ++next;
  }
  for (int c = 0; c < next; ++c) {
    Complex centroid = 0.0;
    int count = 0;
    for (std::size_t i = 0; i < n; ++i) {
      if (label[i] == c) {
        centroid += roots[i].z;
        ++count;
      }
    }
    centroid /= static_cast<double>(count);
    double radius = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      if (label[i] == c) radius = std::max(radius, std::abs(roots[i].z - centroid));
    }
    for (std::size_t i = 0; i < n; ++i) {
      if (label[i] == c) {
        roots[i].cluster = c;
        roots[i].cluster_radius = count > 1 ? radius : 0.0;
      }
    }
  }
}

}  // namespace

std::vector<PolyRoot> poly_roots(const UniPoly& u_in, const RootOptions& opts) {
  const UniPoly u = u_in.trimmed(1e-12);
  const int deg = u.degree();
  if (deg < 1) throw Error(ErrorCode::InvalidArgument, "poly_roots: degree < 1 after trimming");

  // zero roots are exact
  int nzero = 0;
  while (nzero < deg && u[nzero] == 0.0) ++nzero;
  std::vector<double> reduced(u.coeffs().begin() + nzero, u.coeffs().end());
  const int n = deg - nzero;

  std::vector<Complex> z(n);
  const double lead = reduced[n];
  std::vector<double> monic(n + 1);
  for (int k = 0; k <= n; ++k) monic[k] = reduced[k] / lead;
  const UniPoly pm(monic);
  const UniPoly dpm = pm.derivative();

  bool converged = true;
  if (n > 0) {
    const Complex center = -monic[n - 1] / static_cast<double>(n);
    // geometric mean of the root moduli about the centroid
    double radius = std::pow(std::abs(pm.eval(center)), 1.0 / n);
    if (!(radius > 0.0) || !std::isfinite(radius)) radius = 1.0;
    for (int k = 0; k < n; ++k) {
      z[k] = center + std::polar(radius, 2.0 * std::numbers::pi * k / n + 0.4);
    }

    std::vector<bool> done(n, false);
    converged = false;
    for (int iter = 0; iter < opts.max_iter && !converged; ++iter) {
      converged = true;
      for (int k = 0; k < n; ++k) {
        if (done[k]) continue;
        const Complex pv = pm.eval(z[k]);
        const double scale = pm.abs_eval(std::abs(z[k]));
        if (std::abs(pv) <= 4.0 * std::numeric_limits<double>::epsilon() * scale) {
          done[k] = true;
          continue;
        }
        const Complex ratio = pv / dpm.eval(z[k]);
        Complex sum = 0.0;
        for (int j = 0; j < n; ++j) {
          if (j != k) sum += 1.0 / (z[k] - z[j]);
        }
        const Complex w = ratio / (1.0 - ratio * sum);
        z[k] -= w;
        if (std::abs(w) <= 1e-15 * std::max(1.0, std::abs(z[k]))) {
          done[k] = true;
        } else {
          converged = false;
        }
      }
    }
  }

  std::vector<PolyRoot> roots;
  roots.reserve(deg);
  for (int k = 0; k < nzero; ++k) roots.push_back(PolyRoot{Complex(0.0, 0.0), 0.0, 0, 0.0});

  const UniPoly du = u.derivative();
  for (int k = 0; k < n; ++k) {
    Complex zk = z[k];
    for (int s = 0; s < opts.polish_steps; ++s) {
      const Complex d = du.eval(zk);
      if (d == Complex(0.0)) break;
      const Complex cand = zk - u.eval(zk) / d;
      if (!(std::isfinite(cand.real()) && std::isfinite(cand.imag()))) break;
      if (std::abs(u.eval(cand)) <= std::abs(u.eval(zk))) zk = cand;
      else break;
    }
    roots.push_back(PolyRoot{zk, std::abs(u.eval(zk)), 0, 0.0});
  }

  double scale = 1.0;
  for (const auto& r : roots) scale = std::max(scale, std::abs(r.z));
  assign_clusters(roots, opts.cluster_tol * scale);

  if (!converged) {
    // accept when every root is backward stable anyway
    for (const auto& r : roots) {
      if (r.residual > 1e-10 * u.abs_eval(std::abs(r.z))) {
        throw RootFinderError("poly_roots: Aberth iteration did not converge", roots);
      }
    }
  }
  return roots;
}

Deflation deflate(const UniPoly& u_in, double root, double tol) {
  const UniPoly u = u_in.trimmed(0.0);
  const int deg = u.degree();
  if (deg < 1) throw Error(ErrorCode::InvalidArgument, "deflate: degree < 1");

  // forward division is stable for |root| <= 1, backward for |root| > 1
  std::vector<double> q(deg);
  double carry;
  if (std::abs(root) <= 1.0) {
    carry = u[deg];
    for (int k = deg - 1; k >= 0; --k) {
      q[k] = carry;
      carry = u[k] + carry * root;
    }
  } else {
    q[0] = -u[0] / root;
    for (int k = 1; k < deg; ++k) q[k] = (q[k - 1] - u[k]) / root;
    // u - (x - root) q = mismatch x^deg, so u(root) = mismatch root^deg
    carry = (u[deg] - q[deg - 1]) * std::pow(root, deg);
  }
  Deflation out;
  out.quotient = UniPoly(std::move(q));
  out.remainder = carry;
  const double bound = tol * u.norm() * std::pow(std::max(1.0, std::abs(root)), deg);
  out.warning = std::abs(carry) > bound;
  return out;
}

}  // namespace tsalink
