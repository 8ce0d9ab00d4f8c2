#pragma once

#include <array>
#include <cmath>
#include <numbers>
#include <ostream>
#include <vector>

#include "hkq/error.hpp"

namespace hkq {

/// Quaternion re + i_*i + j_*j + k_*k over a real scalar type.
///
/// The scalar is a template parameter so the same arithmetic can be run on
/// dual numbers when derivatives of coordinate maps are needed.
template <class T = double>
struct Quaternion {
  T re{}, i{}, j{}, k{};

  constexpr Quaternion() = default;
  constexpr Quaternion(T r, T a, T b, T c) : re(r), i(a), j(b), k(c) {}
  constexpr explicit Quaternion(T r) : re(r), i(T{}), j(T{}), k(T{}) {}

  static constexpr Quaternion unit(int axis) {
    Quaternion q;
    q[axis] = T(1);
    return q;
  }

  constexpr T& operator[](int c) { return c == 0 ? re : c == 1 ? i : c == 2 ? j : k; }
  constexpr const T& operator[](int c) const { return c == 0 ? re : c == 1 ? i : c == 2 ? j : k; }

  constexpr Quaternion conj() const { return {re, -i, -j, -k}; }
  constexpr T norm2() const { return re * re + i * i + j * j + k * k; }
  T norm() const {
    using std::sqrt;
    return sqrt(norm2());
  }
  constexpr std::array<T, 3> imag() const { return {i, j, k}; }

  constexpr Quaternion& operator+=(const Quaternion& o) {
    re += o.re; i += o.i; j += o.j; k += o.k;
    return *this;
  }
  constexpr Quaternion& operator-=(const Quaternion& o) {
    re -= o.re; i -= o.i; j -= o.j; k -= o.k;
    return *this;
  }
  constexpr Quaternion& operator*=(const T& s) {
    re *= s; i *= s; j *= s; k *= s;
    return *this;
  }
};

template <class T>
constexpr Quaternion<T> operator+(Quaternion<T> a, const Quaternion<T>& b) { return a += b; }
template <class T>
constexpr Quaternion<T> operator-(Quaternion<T> a, const Quaternion<T>& b) { return a -= b; }
template <class T>
constexpr Quaternion<T> operator-(const Quaternion<T>& a) { return {-a.re, -a.i, -a.j, -a.k}; }
template <class T>
constexpr Quaternion<T> operator*(Quaternion<T> a, const T& s) { return a *= s; }
template <class T>
constexpr Quaternion<T> operator*(const T& s, Quaternion<T> a) { return a *= s; }

/// Hamilton product.
template <class T>
constexpr Quaternion<T> qmul(const Quaternion<T>& a, const Quaternion<T>& b) {
  return {a.re * b.re - a.i * b.i - a.j * b.j - a.k * b.k,
          a.re * b.i + a.i * b.re + a.j * b.k - a.k * b.j,
          a.re * b.j - a.i * b.k + a.j * b.re + a.k * b.i,
          a.re * b.k + a.i * b.j - a.j * b.i + a.k * b.re};
}
template <class T>
constexpr Quaternion<T> operator*(const Quaternion<T>& a, const Quaternion<T>& b) { return qmul(a, b); }

template <class T>
constexpr bool operator==(const Quaternion<T>& a, const Quaternion<T>& b) {
  return a.re == b.re && a.i == b.i && a.j == b.j && a.k == b.k;
}

/// Euclidean inner product of the four real coordinates.
template <class T>
constexpr T dot(const Quaternion<T>& a, const Quaternion<T>& b) {
  return a.re * b.re + a.i * b.i + a.j * b.j + a.k * b.k;
}

/// e^{i t} = cos t + i sin t.
template <class T>
Quaternion<T> exp_i(const T& t) {
  using std::cos;
  using std::sin;
  return {cos(t), sin(t), T{}, T{}};
}

inline std::ostream& operator<<(std::ostream& os, const Quaternion<double>& q) {
  return os << '(' << q.re << ", " << q.i << ", " << q.j << ", " << q.k << ')';
}

using Quat = Quaternion<double>;
template <class T = double>
using QVectorT = std::vector<Quaternion<T>>;
using QVector = QVectorT<double>;

template <class T = double>
using Vec3 = std::array<T, 3>;

inline double inner(const QVector& a, const QVector& b) {
  double s = 0.0;
  for (std::size_t n = 0; n < a.size(); ++n) s += dot(a[n], b[n]);
  return s;
}

// ---------------------------------------------------------------------------
// Hypercomplex structure J_1 = R_{-i}, J_2 = R_{-j}, J_3 = R_{-k}.

template <class T>
constexpr Quaternion<T> right_structure(int axis, const Quaternion<T>& v) {
  return qmul(v, -Quaternion<T>::unit(axis));
}

inline QVector right_structure(int axis, const QVector& v) {
  QVector out(v.size());
  for (std::size_t n = 0; n < v.size(); ++n) out[n] = right_structure(axis, v[n]);
  return out;
}

// ---------------------------------------------------------------------------
// Monopole coordinates W = e^{i psi/2} a, a pure imaginary, r = conj(W) i W.

/// Im-part of conj(W) i W as (i, j, k) components; its norm is |W|^2.
template <class T>
constexpr Vec3<T> r_vector(const Quaternion<T>& w) {
  const T& u = w.re;
  const T& y = w.i;
  const T& z = w.j;
  const T& x = w.k;
  return {u * u + y * y - z * z - x * x, T(2) * (y * z - u * x), T(2) * (y * x + u * z)};
}

struct MonopoleCoords {
  double psi = 0.0;  ///< in (0, 2 pi]; the other half of (0, 4 pi] is reached through branch = -1
  Vec3<double> r{};
  int branch = 1;  ///< sign of the i-component of a (or of its j-component on the string)
};

/// Pure-imaginary acceptance threshold, relative to |W|.
inline constexpr double kPureImaginaryTol = 1e-12;

/// Splits W into (psi, r). psi/2 is the smallest angle in (0, pi] rotating W
/// to a pure imaginary quaternion; the branch cut sits at Re W = 0 where
/// psi/2 wraps from pi back to 0+.
inline MonopoleCoords monopole_coords(const Quat& w) {
  const double n2 = w.norm2();
  if (n2 == 0.0) throw Error(ErrorCode::ZeroQuaternion, "monopole coordinates undefined at W = 0");
  constexpr double pi = std::numbers::pi;

  double half;  // psi / 2 before reduction
  const bool off_string = std::hypot(w.re, w.i) > 1e-15 * std::sqrt(n2);
  if (off_string) {
    // (u, y) = a_i (-sin t, cos t)
    half = std::atan2(w.i, w.re) - pi / 2;
  } else {
    // a has no i-component; absorb the phase of z + w i so that a = +-|W| j
    half = std::atan2(w.k, w.j);
  }
  half -= pi * std::ceil(half / pi - 1.0);
  if (half <= 0.0) half += pi;

  MonopoleCoords mc;
  mc.psi = 2.0 * half;
  mc.r = r_vector(w);
  const Quat a = qmul(exp_i(-half), w);
  if (std::abs(a.re) > kPureImaginaryTol * std::sqrt(n2))
    throw Error(ErrorCode::ZeroQuaternion, "rotated quaternion is not pure imaginary");
  mc.branch = (off_string ? a.i : a.j) >= 0.0 ? 1 : -1;
  return mc;
}

/// Inverse of monopole_coords. Accepts any real psi (the universal cover).
template <class T>
Quaternion<T> from_monopole(const T& psi, const Vec3<T>& r, int branch = 1) {
  using std::sqrt;
  const T rn = sqrt(r[0] * r[0] + r[1] * r[1] + r[2] * r[2]);
  const T denom = rn + r[0];
  Quaternion<T> a;
  if (denom > T(0)) {
    const T s = sqrt(T(2) * denom);
    a = Quaternion<T>(T{}, (rn + r[0]) / s, r[1] / s, r[2] / s);
  } else {
    a = Quaternion<T>(T{}, T{}, sqrt(rn), T{});
  }
  if (branch < 0) a = -a;
  return qmul(exp_i(psi / T(2)), a);
}

inline Quat from_monopole(const MonopoleCoords& mc) { return from_monopole(mc.psi, mc.r, mc.branch); }

}  // namespace hkq
