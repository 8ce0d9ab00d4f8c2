#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <array>
#include <string>
#include <vector>

#include "hkq/error.hpp"
#include "hkq/quaternion.hpp"
#include "hkq/spec.hpp"

namespace hkq {

/// Element of g_theta: base coordinates (acting directions first, center last)
/// and real fiber coordinates.
struct AlgebraElement {
  Eigen::VectorXd t_part;
  Eigen::VectorXd w_part;

  static AlgebraElement zero(const HKGroupSpec& spec) {
    return {Eigen::VectorXd::Zero(spec.base_dim()), Eigen::VectorXd::Zero(spec.fiber_dim())};
  }
  static AlgebraElement from_vector(const HKGroupSpec& spec, const Eigen::VectorXd& v) {
    return {v.head(spec.base_dim()), v.tail(spec.fiber_dim())};
  }
  static AlgebraElement basis(const HKGroupSpec& spec, int n) {
    return from_vector(spec, Eigen::VectorXd::Unit(spec.dim(), n));
  }
  Eigen::VectorXd to_vector() const {
    Eigen::VectorXd v(t_part.size() + w_part.size());
    v << t_part, w_part;
    return v;
  }
  QVector w_quaternions() const { return fiber_to_quaternions(w_part); }
};

/// rho_theta(T) on the fiber: a 2x2 (or doubled 4x4) rotation generator of
/// angle <T, theta_beta> per block.
inline Eigen::MatrixXd rho(const HKGroupSpec& spec, const Eigen::Ref<const Eigen::VectorXd>& t) {
  const int b = spec.block();
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(spec.fiber_dim(), spec.fiber_dim());
  for (int beta = 0; beta < spec.q; ++beta) {
    const double c = spec.pairing(beta, t);
    for (int pair = 0; pair < b / 2; ++pair) {
      const int o = b * beta + 2 * pair;
      m(o + 1, o) = c;
      m(o, o + 1) = -c;
    }
  }
  return m;
}

/// [(X, W), (X', W')] = (0, rho(X) W' - rho(X') W).
inline AlgebraElement bracket(const HKGroupSpec& spec, const AlgebraElement& a, const AlgebraElement& b) {
  AlgebraElement out = AlgebraElement::zero(spec);
  out.w_part = rho(spec, a.t_part) * b.w_part - rho(spec, b.t_part) * a.w_part;
  return out;
}

/// A Lie algebra with orthonormal basis, stored through its ad matrices:
/// ad(i) column j holds [e_i, e_j]. The Levi-Civita connection of the
/// left-invariant metric is precomputed from the Koszul formula.
class MetricLieAlgebra {
 public:
  explicit MetricLieAlgebra(std::vector<Eigen::MatrixXd> ad) : ad_(std::move(ad)) { build_connection(); }

  explicit MetricLieAlgebra(const HKGroupSpec& spec) {
    validate(spec);
    const int n = spec.dim();
    ad_.assign(n, Eigen::MatrixXd::Zero(n, n));
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        ad_[i].col(j) =
            hkq::bracket(spec, AlgebraElement::basis(spec, i), AlgebraElement::basis(spec, j)).to_vector();
    build_connection();
  }

  int dim() const { return static_cast<int>(ad_.size()); }
  const Eigen::MatrixXd& ad(int i) const { return ad_[i]; }
  /// (nabla_{e_i})_{mj} = g(nabla_{e_i} e_j, e_m).
  const Eigen::MatrixXd& nabla(int i) const { return nabla_[i]; }

  Eigen::MatrixXd ad_of(const Eigen::VectorXd& x) const { return combine(ad_, x); }
  Eigen::MatrixXd nabla_of(const Eigen::VectorXd& x) const { return combine(nabla_, x); }

  Eigen::VectorXd bracket(const Eigen::VectorXd& x, const Eigen::VectorXd& y) const { return ad_of(x) * y; }
  Eigen::VectorXd connection(const Eigen::VectorXd& x, const Eigen::VectorXd& y) const {
    return nabla_of(x) * y;
  }
  Eigen::VectorXd curvature(const Eigen::VectorXd& x, const Eigen::VectorXd& y, const Eigen::VectorXd& z) const {
    return curvature_operator(x, y) * z;
  }
  /// R(X, Y) = [nabla_X, nabla_Y] - nabla_{[X, Y]}.
  Eigen::MatrixXd curvature_operator(const Eigen::VectorXd& x, const Eigen::VectorXd& y) const {
    const Eigen::MatrixXd nx = nabla_of(x), ny = nabla_of(y);
    return nx * ny - ny * nx - nabla_of(bracket(x, y));
  }

 private:
  static Eigen::MatrixXd combine(const std::vector<Eigen::MatrixXd>& ms, const Eigen::VectorXd& x) {
    const int n = static_cast<int>(ms.size());
    Eigen::MatrixXd out = Eigen::MatrixXd::Zero(n, n);
    for (int i = 0; i < n; ++i)
      if (x(i) != 0.0) out += x(i) * ms[i];
    return out;
  }

  void build_connection() {
    const int n = dim();
    auto c = [&](int i, int j, int m) { return ad_[i](m, j); };  // [e_i, e_j] = c_ij^m e_m
    nabla_.assign(n, Eigen::MatrixXd::Zero(n, n));
    // 2 g(nabla_i e_j, e_m) = g([e_i,e_j],e_m) - g([e_j,e_m],e_i) + g([e_m,e_i],e_j)
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        for (int m = 0; m < n; ++m) nabla_[i](m, j) = 0.5 * (c(i, j, m) - c(j, m, i) + c(m, i, j));
  }

  std::vector<Eigen::MatrixXd> ad_;
  std::vector<Eigen::MatrixXd> nabla_;
};

inline AlgebraElement levi_civita(const HKGroupSpec& spec, const AlgebraElement& x, const AlgebraElement& y) {
  MetricLieAlgebra alg(spec);
  return AlgebraElement::from_vector(spec, alg.connection(x.to_vector(), y.to_vector()));
}

inline AlgebraElement curvature_alg(const HKGroupSpec& spec, const AlgebraElement& x, const AlgebraElement& y,
                                    const AlgebraElement& z) {
  MetricLieAlgebra alg(spec);
  return AlgebraElement::from_vector(spec, alg.curvature(x.to_vector(), y.to_vector(), z.to_vector()));
}

// ---------------------------------------------------------------------------
// Complex structures.

/// Matrix of J_axis (axis 1, 2, 3) on g_theta: right multiplication by
/// -i, -j, -k on the fiber H^q and on the base H^p.
inline Eigen::MatrixXd complex_structure(const HKGroupSpec& spec, int axis) {
  if (!spec.quaternionic() || spec.base_dim() % 4 != 0)
    throw Error(ErrorCode::SpecInvalid, "hypercomplex structure needs a quaternionic spec with s + k = 4p");
  const int n = spec.dim();
  Eigen::MatrixXd j = Eigen::MatrixXd::Zero(n, n);
  for (int col = 0; col < n; ++col) {
    const AlgebraElement e = AlgebraElement::basis(spec, col);
    AlgebraElement img;
    img.t_part = base_from_quaternions(spec, right_structure(axis, base_to_quaternions(spec, e.t_part)));
    img.w_part = fiber_from_quaternions(right_structure(axis, e.w_quaternions()));
    j.col(col) = img.to_vector();
  }
  return j;
}

inline std::array<Eigen::MatrixXd, 3> complex_structures(const HKGroupSpec& spec) {
  return {complex_structure(spec, 1), complex_structure(spec, 2), complex_structure(spec, 3)};
}

/// N_J(X,Y) = J([X,Y] - [JX,JY]) - ([JX,Y] + [X,JY]).
inline Eigen::VectorXd nijenhuis(const MetricLieAlgebra& alg, const Eigen::MatrixXd& j, const Eigen::VectorXd& x,
                                 const Eigen::VectorXd& y) {
  const Eigen::VectorXd jx = j * x, jy = j * y;
  return j * (alg.bracket(x, y) - alg.bracket(jx, jy)) - (alg.bracket(jx, y) + alg.bracket(x, jy));
}

inline AlgebraElement nijenhuis(const HKGroupSpec& spec, int axis, const AlgebraElement& x, const AlgebraElement& y) {
  MetricLieAlgebra alg(spec);
  return AlgebraElement::from_vector(spec,
                                     nijenhuis(alg, complex_structure(spec, axis), x.to_vector(), y.to_vector()));
}

/// omega(X, Y) = g(J X, Y).
inline double kahler_form(const Eigen::MatrixXd& j, const Eigen::VectorXd& x, const Eigen::VectorXd& y) {
  return (j * x).dot(y);
}

inline double kahler_form(const HKGroupSpec& spec, int axis, const AlgebraElement& x, const AlgebraElement& y) {
  return kahler_form(complex_structure(spec, axis), x.to_vector(), y.to_vector());
}

/// Left-invariant exterior derivative of omega:
/// d omega(X,Y,Z) = -omega([X,Y],Z) - omega([Y,Z],X) - omega([Z,X],Y).
inline double d_omega(const MetricLieAlgebra& alg, const Eigen::MatrixXd& j, const Eigen::VectorXd& x,
                      const Eigen::VectorXd& y, const Eigen::VectorXd& z) {
  return -kahler_form(j, alg.bracket(x, y), z) - kahler_form(j, alg.bracket(y, z), x) -
         kahler_form(j, alg.bracket(z, x), y);
}

inline double d_omega(const HKGroupSpec& spec, int axis, const AlgebraElement& x, const AlgebraElement& y,
                      const AlgebraElement& z) {
  MetricLieAlgebra alg(spec);
  return d_omega(alg, complex_structure(spec, axis), x.to_vector(), y.to_vector(), z.to_vector());
}

// ---------------------------------------------------------------------------
// Exhaustive basis scans.

struct AxiomCheck {
  std::string name;
  double residual = 0.0;
  bool pass = false;
};

struct VerificationReport {
  std::vector<AxiomCheck> checks;
  double tolerance = 0.0;

  bool pass() const {
    return std::all_of(checks.begin(), checks.end(), [](const AxiomCheck& c) { return c.pass; });
  }
  const AxiomCheck* find(const std::string& name) const {
    for (const auto& c : checks)
      if (c.name == name) return &c;
    return nullptr;
  }
};

namespace detail {

inline double max_abs(const Eigen::MatrixXd& m) { return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff(); }

inline double jacobi_residual(const MetricLieAlgebra& alg) {
  // Jacobi on all triples <=> ad is a homomorphism: [ad_i, ad_j] = ad_{[e_i, e_j]}
  double r = 0.0;
  const int n = alg.dim();
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      r = std::max(r, max_abs(alg.ad(i) * alg.ad(j) - alg.ad(j) * alg.ad(i) - alg.ad_of(alg.ad(i).col(j))));
  return r;
}

inline double curvature_residual(const MetricLieAlgebra& alg) {
  double r = 0.0;
  const int n = alg.dim();
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      r = std::max(r, max_abs(alg.curvature_operator(Eigen::VectorXd::Unit(n, i), Eigen::VectorXd::Unit(n, j))));
  return r;
}

inline double nijenhuis_residual(const MetricLieAlgebra& alg, const Eigen::MatrixXd& j) {
  double r = 0.0;
  const int n = alg.dim();
  for (int a = 0; a < n; ++a)
    for (int b = a + 1; b < n; ++b)
      r = std::max(r,
                   nijenhuis(alg, j, Eigen::VectorXd::Unit(n, a), Eigen::VectorXd::Unit(n, b)).cwiseAbs().maxCoeff());
  return r;
}

inline double d_omega_residual(const MetricLieAlgebra& alg, const Eigen::MatrixXd& j) {
  const int n = alg.dim();
  // omega(e_a, e_b) = J(b, a); brackets of basis pairs from ad columns
  const Eigen::MatrixXd om = j.transpose();
  double r = 0.0;
  for (int a = 0; a < n; ++a)
    for (int b = a + 1; b < n; ++b)
      for (int c = b + 1; c < n; ++c) {
        const double v = -(alg.ad(a).col(b).dot(om.col(c))) - (alg.ad(b).col(c).dot(om.col(a))) -
                         (alg.ad(c).col(a).dot(om.col(b)));
        r = std::max(r, std::abs(v));
      }
  return r;
}

inline double nabla_j_residual(const MetricLieAlgebra& alg, const Eigen::MatrixXd& j) {
  double r = 0.0;
  for (int i = 0; i < alg.dim(); ++i) r = std::max(r, max_abs(alg.nabla(i) * j - j * alg.nabla(i)));
  return r;
}

inline double compatibility_residual(const Eigen::MatrixXd& j) {
  return max_abs(j.transpose() * j - Eigen::MatrixXd::Identity(j.rows(), j.cols()));
}

inline double square_residual(const Eigen::MatrixXd& j) {
  return max_abs(j * j + Eigen::MatrixXd::Identity(j.rows(), j.cols()));
}

}  // namespace detail

inline constexpr double kAlgebraTol = 1e-12;

/// Tolerance scaled by the largest entry of theta (residuals are quadratic in theta).
inline double algebra_tolerance(const HKGroupSpec& spec, double tol = kAlgebraTol) {
  const double m = std::max(1.0, spec.theta.cwiseAbs().maxCoeff());
  return tol * m * m;
}

/// Checks the hyper-Kaehler axioms of g_theta on the full orthonormal basis.
inline VerificationReport verify_hyperkahler(const HKGroupSpec& spec, double tol = kAlgebraTol) {
  validate(spec);
  if (!spec.quaternionic()) throw Error(ErrorCode::SpecInvalid, "verify_hyperkahler needs mode hyperkahler");
  const MetricLieAlgebra alg(spec);
  const auto js = complex_structures(spec);
  VerificationReport rep;
  rep.tolerance = algebra_tolerance(spec, tol);
  auto add = [&](std::string name, double residual) {
    rep.checks.push_back({std::move(name), residual, residual <= rep.tolerance});
  };

  add("jacobi", detail::jacobi_residual(alg));
  add("curvature", detail::curvature_residual(alg));
  double quat = std::max({detail::square_residual(js[0]), detail::square_residual(js[1]),
                          detail::square_residual(js[2]), detail::max_abs(js[0] * js[1] - js[2]),
                          detail::max_abs(js[1] * js[0] + js[2])});
  add("quaternion_relations", quat);
  double nij = 0.0, dom = 0.0, nab = 0.0, comp = 0.0;
  for (const auto& j : js) {
    nij = std::max(nij, detail::nijenhuis_residual(alg, j));
    dom = std::max(dom, detail::d_omega_residual(alg, j));
    nab = std::max(nab, detail::nabla_j_residual(alg, j));
    comp = std::max(comp, detail::compatibility_residual(j));
  }
  add("nijenhuis", nij);
  add("d_omega", dom);
  add("nabla_J", nab);
  add("compatibility", comp);
  return rep;
}

struct KahlerFlatResult {
  Eigen::MatrixXd j;
  VerificationReport report;
};

/// Complex structure on an even-dimensional flat algebra: consecutive real
/// coordinates are paired, J e_{2i+1} = e_{2i}, on the base and on each fiber plane.
inline KahlerFlatResult kahler_structure_flat(const HKGroupSpec& spec, double tol = kAlgebraTol) {
  if (spec.dim() % 2 != 0)
    throw Error(ErrorCode::OddDimension, "total dimension " + std::to_string(spec.dim()) + " is odd");
  if (spec.base_dim() % 2 != 0)
    throw Error(ErrorCode::OddDimension, "base R^s x R^k must be even dimensional");
  const MetricLieAlgebra alg(spec);
  const int n = spec.dim();
  KahlerFlatResult out;
  out.j = Eigen::MatrixXd::Zero(n, n);
  for (int a = 0; a + 1 < n; a += 2) {
    out.j(a, a + 1) = 1.0;
    out.j(a + 1, a) = -1.0;
  }
  out.report.tolerance = algebra_tolerance(spec, tol);
  auto add = [&](std::string name, double residual) {
    out.report.checks.push_back({std::move(name), residual, residual <= out.report.tolerance});
  };
  add("curvature", detail::curvature_residual(alg));
  add("j_squared", detail::square_residual(out.j));
  add("compatibility", detail::compatibility_residual(out.j));
  add("nijenhuis", detail::nijenhuis_residual(alg, out.j));
  add("nabla_J", detail::nabla_j_residual(alg, out.j));
  return out;
}

}  // namespace hkq
