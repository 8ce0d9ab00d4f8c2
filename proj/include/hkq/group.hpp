#pragma once

#include <Eigen/Dense>
#include <cmath>

#include "hkq/liealg.hpp"
#include "hkq/quaternion.hpp"
#include "hkq/spec.hpp"

namespace hkq {

/// (X, W) in G_theta = R^{s+k} x_theta H^q.
struct GroupElement {
  Eigen::VectorXd x;
  QVector w;

  static GroupElement identity(const HKGroupSpec& spec) {
    return {Eigen::VectorXd::Zero(spec.base_dim()), QVector(spec.q)};
  }
  /// Flattened (X, W) real coordinates; the ambient Euclidean coordinates of G_theta.
  Eigen::VectorXd coords() const {
    Eigen::VectorXd v(x.size() + 4 * static_cast<Eigen::Index>(w.size()));
    v << x, fiber_from_quaternions(w);
    return v;
  }
  static GroupElement from_coords(const HKGroupSpec& spec, const Eigen::VectorXd& v) {
    return {v.head(spec.base_dim()), fiber_to_quaternions(v.tail(4 * spec.q))};
  }
};

/// Angles phi_beta of an element of the maximal torus T^q of Sp(q).
struct TorusElement {
  Eigen::VectorXd phi;
};

/// theta(X) W: left multiplication of W_beta by e^{i <X, theta_beta>}.
inline QVector twist(const HKGroupSpec& spec, const Eigen::Ref<const Eigen::VectorXd>& x, const QVector& w) {
  QVector out(w.size());
  for (int b = 0; b < spec.q; ++b) out[b] = qmul(exp_i(spec.pairing(b, x)), w[b]);
  return out;
}

inline QVector operator+(const QVector& a, const QVector& b) {
  QVector out(a.size());
  for (std::size_t n = 0; n < a.size(); ++n) out[n] = a[n] + b[n];
  return out;
}

inline QVector operator-(const QVector& a, const QVector& b) {
  QVector out(a.size());
  for (std::size_t n = 0; n < a.size(); ++n) out[n] = a[n] - b[n];
  return out;
}

inline QVector operator-(const QVector& a) {
  QVector out(a.size());
  for (std::size_t n = 0; n < a.size(); ++n) out[n] = -a[n];
  return out;
}

/// (X, W) . (X', W') = (X + X', W + theta(X) W').
inline GroupElement multiply(const HKGroupSpec& spec, const GroupElement& g1, const GroupElement& g2) {
  return {g1.x + g2.x, g1.w + twist(spec, g1.x, g2.w)};
}

/// (X, W)^{-1} = (-X, -theta(-X) W).
inline GroupElement inverse(const HKGroupSpec& spec, const GroupElement& g) {
  return {-g.x, -twist(spec, -g.x, g.w)};
}

/// Ad(X, W)(X', W') = (X', theta(X) W' - rho(X') W).
inline AlgebraElement adjoint(const HKGroupSpec& spec, const GroupElement& g, const AlgebraElement& a) {
  AlgebraElement out;
  out.t_part = a.t_part;
  out.w_part = fiber_from_quaternions(twist(spec, g.x, a.w_quaternions())) - rho(spec, a.t_part) * fiber_from_quaternions(g.w);
  return out;
}

/// Embeds V in R^l as the first l acting directions e_1..e_l of the base.
inline Eigen::VectorXd embed_l(const HKGroupSpec& spec, const Eigen::Ref<const Eigen::VectorXd>& v) {
  Eigen::VectorXd x = Eigen::VectorXd::Zero(spec.base_dim());
  x.head(v.size()) = v;
  return x;
}

/// Left translation by (V, 0) in L: (V + X, theta(V) W).
inline GroupElement act_L(const HKGroupSpec& spec, const Eigen::Ref<const Eigen::VectorXd>& v, const GroupElement& g) {
  const Eigen::VectorXd vx = embed_l(spec, v);
  return {vx + g.x, twist(spec, vx, g.w)};
}

/// B(phi) W: per block, rotation by phi_beta in the (u, y) and (z, w) planes,
/// i.e. left multiplication by e^{i phi_beta}.
inline GroupElement act_torus(const HKGroupSpec& spec, const TorusElement& t, const GroupElement& g) {
  (void)spec;
  GroupElement out = g;
  for (std::size_t b = 0; b < g.w.size(); ++b) {
    const double c = std::cos(t.phi(b)), s = std::sin(t.phi(b));
    const Quat& w = g.w[b];
    out.w[b] = Quat(c * w.re - s * w.i, s * w.re + c * w.i, c * w.j - s * w.k, s * w.j + c * w.k);
  }
  return out;
}

/// The 4x4 block B(phi) as a matrix.
inline Eigen::Matrix4d torus_block(double phi) {
  const double c = std::cos(phi), s = std::sin(phi);
  Eigen::Matrix4d b;
  b << c, -s, 0, 0, s, c, 0, 0, 0, 0, c, -s, 0, 0, s, c;
  return b;
}

/// Differential of left translation by h in (X, W) coordinates: the identity
/// on the base and theta(X_h) on the fiber.
inline Eigen::MatrixXd left_translation_differential(const HKGroupSpec& spec, const GroupElement& h) {
  const int n = spec.base_dim() + 4 * spec.q;
  Eigen::MatrixXd d = Eigen::MatrixXd::Identity(n, n);
  for (int b = 0; b < spec.q; ++b)
    d.block<4, 4>(spec.base_dim() + 4 * b, spec.base_dim() + 4 * b) = torus_block(spec.pairing(b, h.x));
  return d;
}

}  // namespace hkq
