#pragma once

#include <Eigen/Dense>
#include <array>
#include <string>

#include "hkq/error.hpp"
#include "hkq/group.hpp"
#include "hkq/liealg.hpp"
#include "hkq/spec.hpp"

namespace hkq {

/// L = R^l generated by the first l acting directions e_1..e_l.
struct LSpec {
  int l = 1;
};

/// l x 3 array; row a holds (mu_1, mu_2, mu_3) evaluated on e_a.
using MomentValue = Eigen::Matrix<double, Eigen::Dynamic, 3>;

inline constexpr double kIsotropyTol = 1e-12;

/// Throws IsotropyViolation unless span{e_1..e_l} is isotropic for all three
/// Kaehler forms (and SpecInvalid for non-quaternionic specs).
inline void validate(const HKGroupSpec& spec, const LSpec& lspec) {
  validate(spec);
  if (!spec.quaternionic()) throw Error(ErrorCode::SpecInvalid, "moment maps need mode hyperkahler");
  if (lspec.l < 0 || lspec.l > spec.k)
    throw Error(ErrorCode::IsotropyViolation, "l must lie in [0, k]");
  for (int axis = 1; axis <= 3; ++axis) {
    const Eigen::MatrixXd j = complex_structure(spec, axis);
    for (int a = 0; a < lspec.l; ++a)
      for (int b = 0; b < lspec.l; ++b)
        if (std::abs(j(b, a)) > kIsotropyTol)
          throw Error(ErrorCode::IsotropyViolation,
                      "omega_" + std::to_string(axis) + "(e_" + std::to_string(a + 1) + ", e_" +
                          std::to_string(b + 1) + ") != 0");
  }
}

/// mu(X, W) row a = -Im X_a + 1/2 sum_beta theta_beta^a conj(W_beta) i W_beta.
inline MomentValue moment(const HKGroupSpec& spec, const LSpec& lspec, const GroupElement& g) {
  validate(spec, lspec);
  const QVector xq = base_to_quaternions(spec, g.x);
  MomentValue mu = MomentValue::Zero(lspec.l, 3);
  for (int a = 0; a < lspec.l; ++a) {
    for (int c = 0; c < 3; ++c) mu(a, c) = -xq[a][c + 1];
    for (int b = 0; b < spec.q; ++b) {
      const Vec3<double> r = r_vector(g.w[b]);
      for (int c = 0; c < 3; ++c) mu(a, c) += 0.5 * spec.theta(b, a) * r[c];
    }
  }
  return mu;
}

/// Same map through the Kaehler forms: mu_alpha(X,W)(V) = omega_alpha(V, X) + 1/2 omega_alpha(rho(V) W, W).
inline MomentValue moment_abstract(const HKGroupSpec& spec, const LSpec& lspec, const GroupElement& g) {
  validate(spec, lspec);
  const auto js = complex_structures(spec);
  const Eigen::VectorXd w = fiber_from_quaternions(g.w);
  AlgebraElement xel{g.x, Eigen::VectorXd::Zero(spec.fiber_dim())};
  AlgebraElement wel{Eigen::VectorXd::Zero(spec.base_dim()), w};
  MomentValue mu(lspec.l, 3);
  for (int a = 0; a < lspec.l; ++a) {
    const AlgebraElement v = AlgebraElement::basis(spec, a);
    const AlgebraElement rw{Eigen::VectorXd::Zero(spec.base_dim()), rho(spec, v.t_part) * w};
    for (int c = 0; c < 3; ++c)
      mu(a, c) = kahler_form(js[c], v.to_vector(), xel.to_vector()) +
                 0.5 * kahler_form(js[c], rw.to_vector(), wel.to_vector());
  }
  return mu;
}

/// Real-coordinate form contracted with T = sum t_a e_a, written out in
/// (x, b, s, p) base and (u, y, z, w) fiber coordinates.
inline Vec3<double> moment_components(const HKGroupSpec& spec, const LSpec& lspec, const GroupElement& g,
                                      const Eigen::Ref<const Eigen::VectorXd>& t) {
  validate(spec, lspec);
  const QVector xq = base_to_quaternions(spec, g.x);
  Vec3<double> out{0.0, 0.0, 0.0};
  for (int a = 0; a < lspec.l; ++a) {
    const double b_a = xq[a].i, s_a = xq[a].j, p_a = xq[a].k;
    double s1 = 0.0, s2 = 0.0, s3 = 0.0;
    for (int beta = 0; beta < spec.q; ++beta) {
      const double th = spec.theta(beta, a);
      const double u = g.w[beta].re, y = g.w[beta].i, z = g.w[beta].j, w = g.w[beta].k;
      s1 += th * (u * u + y * y - z * z - w * w);
      s2 += th * (-u * w + z * y);
      s3 += th * (u * z + w * y);
    }
    out[0] += -b_a * t(a) + 0.5 * t(a) * s1;
    out[1] += -s_a * t(a) + t(a) * s2;
    out[2] += -p_a * t(a) + t(a) * s3;
  }
  return out;
}

/// Free coordinates of (mu)^{-1}(0): all base quaternions except the
/// imaginary parts of the first l (which the level-set relations determine).
struct LevelSetCoords {
  QVector base;  ///< p quaternions; Im part of base[a], a < l, is ignored
  QVector w;     ///< q fiber quaternions
};

/// Point of (mu)^{-1}(0) with the given free coordinates:
///   b_a = 1/2 sum theta_beta^a (u^2 + y^2 - z^2 - w^2),
///   s_a = -sum theta_beta^a (u w - z y),
///   p_a = sum theta_beta^a (u z + w y).
inline GroupElement level_set_lift(const HKGroupSpec& spec, const LSpec& lspec, const LevelSetCoords& free) {
  validate(spec, lspec);
  QVector xq = free.base;
  for (int a = 0; a < lspec.l; ++a) {
    double b = 0.0, s = 0.0, p = 0.0;
    for (int beta = 0; beta < spec.q; ++beta) {
      const double th = spec.theta(beta, a);
      const double u = free.w[beta].re, y = free.w[beta].i, z = free.w[beta].j, w = free.w[beta].k;
      b += 0.5 * th * (u * u + y * y - z * z - w * w);
      s -= th * (u * w - z * y);
      p += th * (u * z + w * y);
    }
    xq[a] = Quat(xq[a].re, b, s, p);
  }
  return {base_from_quaternions(spec, xq), free.w};
}

/// max |mu(act_L(V, g)) - mu(g)|; L is abelian so equivariance is invariance.
inline double check_invariance(const HKGroupSpec& spec, const LSpec& lspec, const GroupElement& g,
                               const Eigen::Ref<const Eigen::VectorXd>& v) {
  const MomentValue diff = moment(spec, lspec, act_L(spec, v, g)) - moment(spec, lspec, g);
  return diff.size() == 0 ? 0.0 : diff.cwiseAbs().maxCoeff();
}

/// 3l x (4p + 4q) Jacobian of the moment components in ambient coordinates.
/// The map is quadratic, so central differences are exact up to rounding.
inline Eigen::MatrixXd moment_jacobian(const HKGroupSpec& spec, const LSpec& lspec, const GroupElement& g,
                                       double h = 1e-3) {
  const Eigen::VectorXd c0 = g.coords();
  Eigen::MatrixXd jac(3 * lspec.l, c0.size());
  for (Eigen::Index n = 0; n < c0.size(); ++n) {
    Eigen::VectorXd cp = c0, cm = c0;
    cp(n) += h;
    cm(n) -= h;
    const MomentValue dp = moment(spec, lspec, GroupElement::from_coords(spec, cp));
    const MomentValue dm = moment(spec, lspec, GroupElement::from_coords(spec, cm));
    const MomentValue d = (dp - dm) / (2 * h);
    for (int a = 0; a < lspec.l; ++a)
      for (int c = 0; c < 3; ++c) jac(3 * a + c, n) = d(a, c);
  }
  return jac;
}

}  // namespace hkq
