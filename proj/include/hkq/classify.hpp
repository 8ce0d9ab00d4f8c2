#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <optional>
#include <vector>

#include "hkq/error.hpp"
#include "hkq/spec.hpp"

namespace hkq {

/// Orbit invariants of theta under theta -> P S theta A.
struct EquivalenceInvariants {
  int s = 0, k = 0, q = 0;
  std::vector<double> row_norms;   ///< sorted ascending
  std::vector<double> gram_eigen;  ///< eigenvalues of theta^t theta, ascending

  /// Largest multiplicity among row norms or Gram eigenvalues (within tol).
  int max_multiplicity(double tol = 1e-9) const {
    auto mult = [tol](const std::vector<double>& v) {
      int best = v.empty() ? 0 : 1, run = 1;
      for (std::size_t n = 1; n < v.size(); ++n) {
        run = std::abs(v[n] - v[n - 1]) <= tol * std::max(1.0, std::abs(v[n])) ? run + 1 : 1;
        best = std::max(best, run);
      }
      return best;
    };
    return std::max(mult(row_norms), mult(gram_eigen));
  }
};

inline EquivalenceInvariants invariants(const HKGroupSpec& spec) {
  EquivalenceInvariants inv;
  inv.s = spec.s;
  inv.k = spec.k;
  inv.q = spec.q;
  for (int b = 0; b < spec.theta.rows(); ++b) inv.row_norms.push_back(spec.theta.row(b).norm());
  std::sort(inv.row_norms.begin(), inv.row_norms.end());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(spec.theta.transpose() * spec.theta, Eigen::EigenvaluesOnly);
  for (Eigen::Index n = 0; n < es.eigenvalues().size(); ++n) inv.gram_eigen.push_back(es.eigenvalues()(n));
  return inv;
}

inline bool same_invariants(const EquivalenceInvariants& a, const EquivalenceInvariants& b, double tol = 1e-9) {
  if (a.s != b.s || a.k != b.k || a.q != b.q) return false;
  auto close = [tol](const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size()) return false;
    for (std::size_t n = 0; n < x.size(); ++n)
      if (std::abs(x[n] - y[n]) > tol * std::max(1.0, std::abs(x[n]))) return false;
    return true;
  };
  return close(a.row_norms, b.row_norms) && close(a.gram_eigen, b.gram_eigen);
}

/// theta' = P S theta A: row perm[b] of theta', scaled by signs[b], equals row b of theta A.
struct MonomialWitness {
  std::vector<int> perm;
  std::vector<int> signs;
  Eigen::MatrixXd a;
  double residual = 0.0;

  Eigen::MatrixXd apply(const Eigen::MatrixXd& theta) const {
    Eigen::MatrixXd out(theta.rows(), a.cols());
    const Eigen::MatrixXd ta = theta * a;
    for (Eigen::Index b = 0; b < theta.rows(); ++b) out.row(perm[b]) = signs[b] * ta.row(b);
    return out;
  }
};

struct MonomialVerdict {
  bool equivalent = false;
  std::optional<MonomialWitness> witness;
  EquivalenceInvariants invariants1, invariants2;
  bool invariants_differ = false;
  /// Non-monomial torus-preserving conjugations may exist; "false" is then inconclusive.
  bool degenerate_spectrum = false;
};

inline constexpr double kWitnessTol = 1e-9;
inline constexpr int kMaxMonomialQ = 8;

/// Orthogonal Procrustes: A in O(k) minimizing |X A - Y|_F.
inline Eigen::MatrixXd procrustes(const Eigen::MatrixXd& x, const Eigen::MatrixXd& y) {
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(x.transpose() * y, Eigen::ComputeFullU | Eigen::ComputeFullV);
  return svd.matrixU() * svd.matrixV().transpose();
}

/// Searches signed permutations P S of the rows and solves for A in O(k).
inline MonomialVerdict equivalent_monomial(const HKGroupSpec& s1, const HKGroupSpec& s2, double tol = kWitnessTol) {
  if (s1.s != s2.s || s1.k != s2.k || s1.q != s2.q || s1.mode != s2.mode)
    throw Error(ErrorCode::ShapeMismatch, "specs differ in (s, k, q) or mode");
  if (s1.q > kMaxMonomialQ) throw Error(ErrorCode::ProblemTooLarge, "monomial search limited to q <= 8");
  MonomialVerdict v;
  v.invariants1 = invariants(s1);
  v.invariants2 = invariants(s2);
  v.invariants_differ = !same_invariants(v.invariants1, v.invariants2);
  v.degenerate_spectrum = std::max(v.invariants1.max_multiplicity(), v.invariants2.max_multiplicity()) > 1;
  if (v.invariants_differ) return v;

  const int q = s1.q;
  const Eigen::MatrixXd& t1 = s1.theta;
  const Eigen::MatrixXd& t2 = s2.theta;
  const double scale = std::max(1.0, t1.cwiseAbs().maxCoeff());
  std::vector<double> n1(q), n2(q);
  for (int b = 0; b < q; ++b) {
    n1[b] = t1.row(b).norm();
    n2[b] = t2.row(b).norm();
  }

  std::vector<int> perm(q, -1);
  std::vector<bool> used(q, false);
  std::optional<MonomialWitness> best;

  auto try_signs = [&]() {
    Eigen::MatrixXd target(q, s1.k);  // rows of theta' pulled back through perm
    for (int b = 0; b < q; ++b) target.row(b) = t2.row(perm[b]);
    for (unsigned mask = 0; mask < (1u << q); ++mask) {
      Eigen::MatrixXd signed_target = target;
      std::vector<int> signs(q);
      for (int b = 0; b < q; ++b) {
        signs[b] = (mask >> b) & 1u ? -1 : 1;
        signed_target.row(b) *= signs[b];
      }
      // signs[b] * (theta' row perm[b]) = (theta A) row b
      const Eigen::MatrixXd a = procrustes(t1, signed_target);
      const double res = (t1 * a - signed_target).cwiseAbs().maxCoeff();
      if (res <= tol * scale) {
        best = MonomialWitness{perm, signs, a, res};
        return true;
      }
    }
    return false;
  };

  auto search = [&](auto&& self, int b) -> bool {
    if (b == q) return try_signs();
    for (int c = 0; c < q; ++c) {
      if (used[c] || std::abs(n1[b] - n2[c]) > 1e-9 * std::max(1.0, n1[b])) continue;
      used[c] = true;
      perm[b] = c;
      if (self(self, b + 1)) return true;
      used[c] = false;
    }
    return false;
  };
  v.equivalent = search(search, 0);
  v.witness = best;
  return v;
}

}  // namespace hkq
