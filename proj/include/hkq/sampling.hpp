#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>

#include "hkq/quaternion.hpp"

namespace hkq {

/// Seeded generator with platform-independent uniform/normal draws
/// (std distributions are implementation-defined).
class Rng {
 public:
  explicit Rng(std::uint64_t seed = 0) : engine_(seed) {}

  /// Uniform in [0, 1).
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  /// Log-uniform in [lo, hi].
  double log_uniform(double lo, double hi) { return std::exp(uniform(std::log(lo), std::log(hi))); }
  int uniform_int(int lo, int hi_inclusive) {
    return lo + static_cast<int>(engine_() % static_cast<std::uint64_t>(hi_inclusive - lo + 1));
  }
  bool coin() { return (engine_() >> 63) != 0; }

  double normal() {
    // Box-Muller; 1 - u keeps the log argument in (0, 1]
    const double u1 = 1.0 - uniform(), u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
  }

  Eigen::VectorXd normal_vector(Eigen::Index n) {
    Eigen::VectorXd v(n);
    for (Eigen::Index i = 0; i < n; ++i) v(i) = normal();
    return v;
  }

  Quat quaternion() { return {normal(), normal(), normal(), normal()}; }

  QVector qvector(std::size_t n) {
    QVector v(n);
    for (auto& e : v) e = quaternion();
    return v;
  }

  Vec3<double> unit_vector() {
    for (;;) {
      const Vec3<double> v{normal(), normal(), normal()};
      const double n = std::sqrt(v[0] * v[0] + v[1] * v[1] + v[2] * v[2]);
      if (n > 1e-8) return {v[0] / n, v[1] / n, v[2] / n};
    }
  }

  /// Random orthogonal n x n matrix (QR of a Gaussian matrix, sign-fixed).
  Eigen::MatrixXd orthogonal(int n) {
    Eigen::MatrixXd g(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) g(i, j) = normal();
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(g);
    Eigen::MatrixXd q = qr.householderQ() * Eigen::MatrixXd::Identity(n, n);
    const Eigen::MatrixXd r = qr.matrixQR().triangularView<Eigen::Upper>();
    for (int i = 0; i < n; ++i)
      if (r(i, i) < 0) q.col(i) *= -1.0;
    return q;
  }

  std::mt19937_64& engine() { return engine_; }

 private:
  std::mt19937_64 engine_;
};

}  // namespace hkq
