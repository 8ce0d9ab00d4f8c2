#pragma once

#include <Eigen/Dense>
#include <string>

#include "hkq/error.hpp"
#include "hkq/quaternion.hpp"

namespace hkq {

enum class FiberKind {
  Quaternionic,  ///< fiber H^q, blocks of 4 real coordinates
  Complex2m,     ///< fiber R^{2m}, blocks of 2 real coordinates (plain flat algebras)
};

/// R^s x (R^k semidirect_theta fiber). theta has one row per fiber block.
///
/// Base coordinates are stored with the k acting directions first and the
/// s central directions last. In quaternionic mode the base R^{s+k} = H^p is
/// identified slot-wise: real slot n is component n / p of quaternion n % p,
/// so e_1..e_p are the real axes of the p base quaternions.
struct HKGroupSpec {
  int s = 0;
  int k = 1;
  int q = 1;
  Eigen::MatrixXd theta = Eigen::MatrixXd::Ones(1, 1);
  FiberKind mode = FiberKind::Quaternionic;

  int block() const { return mode == FiberKind::Quaternionic ? 4 : 2; }
  int base_dim() const { return s + k; }
  int fiber_dim() const { return block() * q; }
  int dim() const { return base_dim() + fiber_dim(); }
  bool quaternionic() const { return mode == FiberKind::Quaternionic; }
  /// Quaternionic dimension of the base; only meaningful when s + k = 4p.
  int p() const { return base_dim() / 4; }

  /// <T, theta_beta> for T in R^k (extra trailing entries of T are ignored).
  double pairing(int beta, const Eigen::Ref<const Eigen::VectorXd>& t) const {
    return theta.row(beta).dot(t.head(k));
  }
};

inline constexpr double kRankTol = 1e-10;

/// Throws SpecInvalid unless theta has shape q x k, full column rank, no zero
/// rows, and (quaternionic mode) s + k divisible by 4.
inline void validate(const HKGroupSpec& spec) {
  if (spec.s < 0 || spec.k < 1 || spec.q < 1)
    throw Error(ErrorCode::SpecInvalid, "need s >= 0, k >= 1, q >= 1");
  if (spec.theta.rows() != spec.q || spec.theta.cols() != spec.k)
    throw Error(ErrorCode::SpecInvalid, "theta must be q x k = " + std::to_string(spec.q) + " x " +
                                            std::to_string(spec.k));
  if (!spec.theta.allFinite()) throw Error(ErrorCode::SpecInvalid, "theta has non-finite entries");
  const double scale = std::max(1.0, spec.theta.cwiseAbs().maxCoeff());
  for (int b = 0; b < spec.q; ++b)
    if (spec.theta.row(b).norm() <= kRankTol * scale)
      throw Error(ErrorCode::SpecInvalid, "theta row " + std::to_string(b + 1) + " is zero");
  if (spec.k > spec.q) throw Error(ErrorCode::SpecInvalid, "rank(theta) = k requires k <= q");
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(spec.theta);
  if (svd.singularValues()(spec.k - 1) <= kRankTol * scale)
    throw Error(ErrorCode::SpecInvalid, "theta does not have full column rank k");
  if (spec.quaternionic() && spec.base_dim() % 4 != 0)
    throw Error(ErrorCode::SpecInvalid, "hyper-Kaehler mode requires s + k = 4p");
}

// ---------------------------------------------------------------------------
// Base layout R^{s+k} = H^p.

/// Real slot of component c (0 = real, 1..3 = i, j, k) of base quaternion a.
inline int base_slot(const HKGroupSpec& spec, int a, int c) { return c * spec.p() + a; }

inline QVector base_to_quaternions(const HKGroupSpec& spec, const Eigen::VectorXd& x) {
  QVector out(spec.p());
  for (int a = 0; a < spec.p(); ++a)
    for (int c = 0; c < 4; ++c) out[a][c] = x(base_slot(spec, a, c));
  return out;
}

inline Eigen::VectorXd base_from_quaternions(const HKGroupSpec& spec, const QVector& xq) {
  Eigen::VectorXd x(spec.base_dim());
  for (int a = 0; a < spec.p(); ++a)
    for (int c = 0; c < 4; ++c) x(base_slot(spec, a, c)) = xq[a][c];
  return x;
}

// Fiber layout: quaternion beta occupies real coordinates 4 beta .. 4 beta + 3.

inline QVector fiber_to_quaternions(const Eigen::VectorXd& w) {
  QVector out(w.size() / 4);
  for (std::size_t b = 0; b < out.size(); ++b)
    out[b] = Quat(w(4 * b), w(4 * b + 1), w(4 * b + 2), w(4 * b + 3));
  return out;
}

inline Eigen::VectorXd fiber_from_quaternions(const QVector& wq) {
  Eigen::VectorXd w(4 * wq.size());
  for (std::size_t b = 0; b < wq.size(); ++b)
    for (int c = 0; c < 4; ++c) w(4 * b + c) = wq[b][c];
  return w;
}

}  // namespace hkq
