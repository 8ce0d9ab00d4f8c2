#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include "hkq/error.hpp"
#include "hkq/group.hpp"
#include "hkq/moment.hpp"
#include "hkq/quaternion.hpp"
#include "hkq/sampling.hpp"
#include "hkq/spec.hpp"

namespace hkq {

/// Symmetric matrix of metric components together with the chart it lives in.
struct MetricTensor {
  Eigen::MatrixXd g;
  std::string chart;
};

/// Coordinates on L \ (mu)^{-1}(0):
/// Euclidean part (x_g, Im X_g) for g = l+1..p, then tau_1..tau_q, then r_1..r_q.
struct QuotientChartPoint {
  QVector flat;              ///< p - l quaternions x_g + Im X_g
  Eigen::VectorXd tau;       ///< q lifted angles
  std::vector<Vec3<double>> r;  ///< q monopole positions

  int dim() const { return static_cast<int>(4 * flat.size() + tau.size() + 3 * r.size()); }

  Eigen::VectorXd to_vector() const {
    Eigen::VectorXd v(dim());
    int n = 0;
    for (const auto& f : flat)
      for (int c = 0; c < 4; ++c) v(n++) = f[c];
    for (Eigen::Index b = 0; b < tau.size(); ++b) v(n++) = tau(b);
    for (const auto& rb : r)
      for (int c = 0; c < 3; ++c) v(n++) = rb[c];
    return v;
  }

  static QuotientChartPoint from_vector(int flat_quaternions, int q, const Eigen::VectorXd& v) {
    QuotientChartPoint pt;
    pt.flat.resize(flat_quaternions);
    pt.tau.resize(q);
    pt.r.resize(q);
    int n = 0;
    for (auto& f : pt.flat)
      for (int c = 0; c < 4; ++c) f[c] = v(n++);
    for (int b = 0; b < q; ++b) pt.tau(b) = v(n++);
    for (auto& rb : pt.r)
      for (int c = 0; c < 3; ++c) rb[c] = v(n++);
    return pt;
  }
};

inline int quotient_dimension(const HKGroupSpec& spec, const LSpec& lspec) {
  return 4 * spec.p() + 4 * spec.q - 4 * lspec.l;
}

inline std::vector<std::string> chart_coordinate_names(const HKGroupSpec& spec, const LSpec& lspec) {
  std::vector<std::string> names;
  for (int g = lspec.l; g < spec.p(); ++g)
    for (const char* c : {"x", "b", "s", "p"}) names.push_back(std::string(c) + std::to_string(g + 1));
  for (int b = 0; b < spec.q; ++b) names.push_back("tau" + std::to_string(b + 1));
  for (int b = 0; b < spec.q; ++b)
    for (int c = 1; c <= 3; ++c) names.push_back("r" + std::to_string(b + 1) + "_" + std::to_string(c));
  return names;
}

// ---------------------------------------------------------------------------
// Monopole data.

/// Coordinate singularities (monopole centers, Dirac strings) are kept at
/// least this far away in numerical work.
inline constexpr double kChartExclusion = 1e-3;

template <class T>
T norm3(const Vec3<T>& r) {
  using std::sqrt;
  return sqrt(r[0] * r[0] + r[1] * r[1] + r[2] * r[2]);
}

/// Distance from r to the Dirac string, the half-line {-t e_1 : t >= 0}.
template <class T>
T string_distance(const Vec3<T>& r) {
  using std::hypot;
  return r[0] <= T(0) ? hypot(r[1], r[2]) : norm3(r);
}

/// Unit-monopole potential in the gauge of the psi coordinate:
/// Omega . dr = (r_2 dr_3 - r_3 dr_2) / (|r| (|r| + r_1)), so that
/// d psi + Omega . dr is regular away from the negative first axis and
/// curl Omega = r / |r|^3.
template <class T>
Vec3<T> dirac_potential(const Vec3<T>& r, double exclusion = 0.0) {
  if (!(string_distance(r) > T(exclusion)))
    throw Error(ErrorCode::StringLocus, "r lies on the Dirac string (negative first axis)");
  const T rn = norm3(r);
  const T d = rn * (rn + r[0]);
  return {T(0), -r[2] / d, r[1] / d};
}

template <class T>
Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic> h_matrix(const HKGroupSpec& spec, const LSpec& lspec,
                                                           const std::vector<Vec3<T>>& r) {
  if (static_cast<int>(r.size()) != spec.q) throw Error(ErrorCode::ShapeMismatch, "need q monopole positions");
  const Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic> tt = spec.theta.leftCols(lspec.l).cast<T>();
  Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic> h = tt * tt.transpose();
  for (int b = 0; b < spec.q; ++b) {
    const T rb = norm3(r[b]);
    if (!(rb > T(0))) throw Error(ErrorCode::ZeroRadius, "r_" + std::to_string(b + 1) + " = 0");
    h(b, b) += T(1) / rb;
  }
  return h;
}

/// H_{bc} = (theta~ theta~^t)_{bc} + delta_{bc} / r_b with theta~ the first l columns of theta.
inline Eigen::MatrixXd h_matrix(const HKGroupSpec& spec, const LSpec& lspec, const std::vector<Vec3<double>>& r) {
  return h_matrix<double>(spec, lspec, r);
}

struct PPMetricData {
  Eigen::MatrixXd H;
  Eigen::MatrixXd Hinv;
  std::vector<Vec3<double>> omega;  ///< diagonal gauge: Omega_{bd} = delta_{bd} omega[b]
};

inline PPMetricData pp_data(const HKGroupSpec& spec, const LSpec& lspec, const std::vector<Vec3<double>>& r,
                            double exclusion = kChartExclusion) {
  PPMetricData d;
  for (int b = 0; b < spec.q; ++b)
    if (norm3(r[b]) < exclusion) throw Error(ErrorCode::ZeroRadius, "r_" + std::to_string(b + 1) + " too small");
  d.H = h_matrix(spec, lspec, r);
  d.Hinv = d.H.llt().solve(Eigen::MatrixXd::Identity(spec.q, spec.q));
  d.Hinv = (0.5 * (d.Hinv + d.Hinv.transpose())).eval();
  for (int b = 0; b < spec.q; ++b) d.omega.push_back(dirac_potential(r[b], exclusion));
  return d;
}

/// Quotient metric on the packed chart vector (flat block, tau, r), any scalar
/// type. No validation of the spec; radii and string distances are checked
/// against the chart exclusion zone.
template <class T>
Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic> pp_metric_coords(const HKGroupSpec& spec, const LSpec& lspec,
                                                                   const Eigen::Matrix<T, Eigen::Dynamic, 1>& x) {
  using Mat = Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic>;
  const int q = spec.q;
  const int nf = 4 * (spec.p() - lspec.l);
  const int n = nf + 4 * q;
  if (x.size() != n) throw Error(ErrorCode::ShapeMismatch, "chart point does not match spec");
  const int t0 = nf, r0 = nf + q;
  std::vector<Vec3<T>> r(q);
  std::vector<Vec3<T>> omega(q);
  for (int b = 0; b < q; ++b) {
    r[b] = {x(r0 + 3 * b), x(r0 + 3 * b + 1), x(r0 + 3 * b + 2)};
    if (norm3(r[b]) < T(kChartExclusion))
      throw Error(ErrorCode::ZeroRadius, "r_" + std::to_string(b + 1) + " too small");
    omega[b] = dirac_potential(r[b], kChartExclusion);
  }
  const Mat H = h_matrix<T>(spec, lspec, r);
  Mat Hinv = H.llt().solve(Mat::Identity(q, q));
  Hinv = (T(0.5) * (Hinv + Hinv.transpose())).eval();

  Mat g = Mat::Zero(n, n);
  g.topLeftCorner(nf, nf).setIdentity();
  for (int b = 0; b < q; ++b)
    for (int c = 0; c < q; ++c) {
      const T hi = T(0.25) * Hinv(b, c);
      g(t0 + b, t0 + c) = hi;
      for (int j = 0; j < 3; ++j) {
        g(t0 + b, r0 + 3 * c + j) = hi * omega[c][j];
        g(r0 + 3 * c + j, t0 + b) = hi * omega[c][j];
        for (int i = 0; i < 3; ++i)
          g(r0 + 3 * b + i, r0 + 3 * c + j) = (i == j ? T(0.25) * H(b, c) : T(0)) + hi * omega[b][i] * omega[c][j];
      }
    }
  return (T(0.5) * (g + g.transpose())).eval();
}

/// Quotient metric h = h0 + h1 with h0 Euclidean on the flat block and
/// h1 = 1/4 H_{bc} dr_b . dr_c + 1/4 H^{bc} (dtau_b + Omega_b . dr_b)(dtau_c + Omega_c . dr_c).
inline MetricTensor pp_metric(const HKGroupSpec& spec, const LSpec& lspec, const QuotientChartPoint& pt) {
  validate(spec, lspec);
  if (static_cast<int>(pt.flat.size()) != spec.p() - lspec.l || pt.tau.size() != spec.q ||
      static_cast<int>(pt.r.size()) != spec.q)
    throw Error(ErrorCode::ShapeMismatch, "chart point does not match spec");
  return {pp_metric_coords<double>(spec, lspec, pt.to_vector()), "pp"};
}

// ---------------------------------------------------------------------------
// Flat H^q in (psi, r) coordinates.

/// Coordinates (psi_1..psi_q, r_1..r_q) of W together with the branch signs.
struct FlatChart {
  Eigen::VectorXd coords;
  std::vector<int> branch;
};

inline FlatChart flat_chart_coords(const QVector& w) {
  const int q = static_cast<int>(w.size());
  FlatChart fc{Eigen::VectorXd(4 * q), std::vector<int>(q)};
  for (int b = 0; b < q; ++b) {
    const MonopoleCoords mc = monopole_coords(w[b]);
    fc.coords(b) = mc.psi;
    for (int c = 0; c < 3; ++c) fc.coords(q + 3 * b + c) = mc.r[c];
    fc.branch[b] = mc.branch;
  }
  return fc;
}

/// 1/4 sum_b (dr_b^2 / r_b + r_b (dpsi_b + Omega_b . dr_b)^2) at W.
inline MetricTensor flat_chart_metric(const QVector& w) {
  const int q = static_cast<int>(w.size());
  Eigen::MatrixXd g = Eigen::MatrixXd::Zero(4 * q, 4 * q);
  for (int b = 0; b < q; ++b) {
    if (w[b].norm2() == 0.0) throw Error(ErrorCode::ZeroQuaternion, "W_" + std::to_string(b + 1) + " = 0");
    const Vec3<double> r = r_vector(w[b]);
    const double rn = norm3(r);
    const Vec3<double> om = dirac_potential(r);
    const int rb = q + 3 * b;
    g(b, b) = 0.25 * rn;
    for (int i = 0; i < 3; ++i) {
      g(b, rb + i) = g(rb + i, b) = 0.25 * rn * om[i];
      for (int j = 0; j < 3; ++j) g(rb + i, rb + j) = (i == j ? 0.25 / rn : 0.0) + 0.25 * rn * om[i] * om[j];
    }
  }
  return {g, "flat-psi-r"};
}

// ---------------------------------------------------------------------------
// Reduction oracle: induced metric on the level set, projected orthogonally
// to the L-orbits.

/// Point of (mu)^{-1}(0) over a chart point, with L-coordinates x_1..x_l.
inline GroupElement quotient_lift(const HKGroupSpec& spec, const LSpec& lspec, const QuotientChartPoint& pt,
                                  const Eigen::Ref<const Eigen::VectorXd>& x_l) {
  LevelSetCoords free;
  free.base.resize(spec.p());
  for (int a = 0; a < lspec.l; ++a) free.base[a] = Quat(x_l(a));
  for (int g = lspec.l; g < spec.p(); ++g) free.base[g] = pt.flat[g - lspec.l];
  free.w.resize(spec.q);
  for (int b = 0; b < spec.q; ++b) {
    double psi = pt.tau(b);
    for (int a = 0; a < lspec.l; ++a) psi += 2.0 * spec.theta(b, a) * x_l(a);
    free.w[b] = from_monopole(psi, pt.r[b], 1);
  }
  return level_set_lift(spec, lspec, free);
}

namespace detail {

/// Fourth-order central difference Jacobian of f at z.
template <class F>
Eigen::MatrixXd jacobian5(const F& f, const Eigen::VectorXd& z, const Eigen::VectorXd& steps) {
  const Eigen::VectorXd f0 = f(z);
  Eigen::MatrixXd jac(f0.size(), z.size());
  for (Eigen::Index n = 0; n < z.size(); ++n) {
    const double h = steps(n);
    auto at = [&](double t) {
      Eigen::VectorXd zz = z;
      zz(n) += t;
      return f(zz);
    };
    jac.col(n) = (at(-2 * h) - 8.0 * at(-h) + 8.0 * at(h) - at(2 * h)) / (12.0 * h);
  }
  return jac;
}

}  // namespace detail

inline MetricTensor reduction_oracle(const HKGroupSpec& spec, const LSpec& lspec, const QuotientChartPoint& pt,
                                     double step = 1e-4) {
  validate(spec, lspec);
  for (int b = 0; b < spec.q; ++b) {
    if (norm3(pt.r[b]) < kChartExclusion) throw Error(ErrorCode::ZeroRadius, "r too small");
    if (string_distance(pt.r[b]) < kChartExclusion) throw Error(ErrorCode::StringLocus, "r on the Dirac string");
  }
  const int nc = pt.dim();
  const int l = lspec.l;
  const int nf = 4 * (spec.p() - l);
  Eigen::VectorXd z(nc + l);
  z << pt.to_vector(), Eigen::VectorXd::Zero(l);

  // scale steps on r_b by the local length scale min(1, |r_b|, distance to string)
  Eigen::VectorXd steps = Eigen::VectorXd::Constant(nc + l, step);
  for (int b = 0; b < spec.q; ++b) {
    const double scale = std::min({1.0, norm3(pt.r[b]), string_distance(pt.r[b])});
    steps.segment(nf + spec.q + 3 * b, 3).setConstant(step * scale);
  }

  const int q = spec.q, pl = spec.p() - l;
  auto embed = [&](const Eigen::VectorXd& zz) {
    const QuotientChartPoint p = QuotientChartPoint::from_vector(pl, q, zz.head(nc));
    return quotient_lift(spec, lspec, p, zz.tail(l)).coords();
  };
  const Eigen::MatrixXd jac = detail::jacobian5(embed, z, steps);
  const Eigen::MatrixXd gind = jac.transpose() * jac;  // ambient metric is Euclidean

  Eigen::MatrixXd g = gind.topLeftCorner(nc, nc);
  if (l > 0) {
    const Eigen::MatrixXd gcx = gind.topRightCorner(nc, l);
    const Eigen::MatrixXd gxx = gind.bottomRightCorner(l, l);
    g -= gcx * gxx.ldlt().solve(gcx.transpose());
  }
  return {0.5 * (g + g.transpose()), "pp"};
}

// ---------------------------------------------------------------------------
// L \ G_theta (no moment constraint).

/// Dimension 4p + 4q - l; coordinates are the base slots l..s+k-1 followed by W.
inline int orbit_space_dimension(const HKGroupSpec& spec, const LSpec& lspec) {
  return spec.base_dim() - lspec.l + 4 * spec.q;
}

/// Submersion metric of L \ G_theta on the slice x_1 = .. = x_l = 0:
/// Euclidean minus the projection onto the orbit directions (e_a, i theta^a_b W_b).
inline Eigen::MatrixXd orbit_space_metric(const HKGroupSpec& spec, const LSpec& lspec, const Eigen::VectorXd& y) {
  const int l = lspec.l;
  const int nb = spec.base_dim() - l;
  const int n = nb + 4 * spec.q;
  Eigen::MatrixXd k = Eigen::MatrixXd::Zero(l + n, l);
  for (int a = 0; a < l; ++a) {
    k(a, a) = 1.0;
    for (int b = 0; b < spec.q; ++b) {
      const Quat w(y(nb + 4 * b), y(nb + 4 * b + 1), y(nb + 4 * b + 2), y(nb + 4 * b + 3));
      const Quat iw = qmul(Quat(0, 1, 0, 0), w);
      for (int c = 0; c < 4; ++c) k(l + nb + 4 * b + c, a) = spec.theta(b, a) * iw[c];
    }
  }
  const Eigen::MatrixXd kt = k.bottomRows(n);  // tangent components seen by slice vectors
  const Eigen::MatrixXd ktk = k.transpose() * k;
  Eigen::MatrixXd g = Eigen::MatrixXd::Identity(n, n) - kt * ktk.ldlt().solve(kt.transpose());
  return 0.5 * (g + g.transpose());
}

// ---------------------------------------------------------------------------
// Presets.

struct Preset {
  std::string name;
  HKGroupSpec spec;
  LSpec lspec;
};

/// H x_theta H with L = R acting on the real part: Taub-NUT.
inline Preset taub_nut(double theta = 1.0) {
  Preset p{"taub-nut", {3, 1, 1, Eigen::MatrixXd::Constant(1, 1, theta), FiberKind::Quaternionic}, {1}};
  validate(p.spec, p.lspec);
  return p;
}

/// H x_theta H^m with theta_b given per fiber; all ones is Taubian-Calabi.
inline Preset taubian_calabi(const Eigen::VectorXd& theta) {
  Preset p{"taubian-calabi",
           {3, 1, static_cast<int>(theta.size()), Eigen::MatrixXd(theta), FiberKind::Quaternionic},
           {1}};
  validate(p.spec, p.lspec);
  return p;
}

inline Preset taubian_calabi(int m) { return taubian_calabi(Eigen::VectorXd::Ones(m)); }

/// H^m x_theta H^m with L = R^m, theta in GL(m): Lee-Weinberg-Yi.
inline Preset lwy(const Eigen::MatrixXd& theta) {
  const int m = static_cast<int>(theta.rows());
  if (theta.cols() != m) throw Error(ErrorCode::SingularTheta, "lwy theta must be square");
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(theta);
  const Eigen::VectorXd sv = svd.singularValues();
  if (sv(m - 1) <= 1e-12 * std::max(1.0, sv(0))) throw Error(ErrorCode::SingularTheta, "lwy theta is singular");
  Preset p{"lwy", {3 * m, m, m, theta, FiberKind::Quaternionic}, {m}};
  validate(p.spec, p.lspec);
  return p;
}

// ---------------------------------------------------------------------------
// Sampling of chart points.

/// Random chart point: |r_b| log-uniform in [r_min, r_max], direction at
/// least min_angle (radians) away from the Dirac string, tau in [0, 4 pi).
inline QuotientChartPoint sample_chart_point(const HKGroupSpec& spec, const LSpec& lspec, Rng& rng,
                                             double r_min = 0.1, double r_max = 100.0, double min_angle = 0.1) {
  QuotientChartPoint pt;
  pt.flat.resize(spec.p() - lspec.l);
  for (auto& f : pt.flat) f = rng.quaternion();
  pt.tau.resize(spec.q);
  pt.r.resize(spec.q);
  for (int b = 0; b < spec.q; ++b) {
    pt.tau(b) = rng.uniform(0.0, 4.0 * std::numbers::pi);
    const double rad = rng.log_uniform(r_min, r_max);
    Vec3<double> u;
    do {
      u = rng.unit_vector();
    } while (std::acos(std::clamp(-u[0], -1.0, 1.0)) < min_angle);
    pt.r[b] = {rad * u[0], rad * u[1], rad * u[2]};
  }
  return pt;
}

/// Same with radius of r_1 fixed (used for log-spaced sweeps).
inline QuotientChartPoint sample_chart_point_at_radius(const HKGroupSpec& spec, const LSpec& lspec, Rng& rng,
                                                       double radius, double min_angle = 0.1) {
  QuotientChartPoint pt = sample_chart_point(spec, lspec, rng, 0.1, 100.0, min_angle);
  const double s = radius / norm3(pt.r[0]);
  for (auto& c : pt.r[0]) c *= s;
  return pt;
}

// ---------------------------------------------------------------------------
// Fixed points of the torus action on the quotient.

struct FixedPointReport {
  bool applicable = false;      ///< l = p = q
  bool identity_fixed = false;  ///< class of (0, 0) fixed by T^q and commutator criterion
  int samples = 0;
  int not_fixed = 0;            ///< sampled (X, W), W != 0, failing the commutator criterion
};

/// (V,0)(X,W)(V,0)^{-1}(X,W)^{-1} for V in R^k.
inline GroupElement torus_commutator(const HKGroupSpec& spec, const Eigen::VectorXd& v, const GroupElement& g) {
  GroupElement vg{embed_l(spec, v), QVector(spec.q)};
  return multiply(spec, multiply(spec, multiply(spec, vg, g), inverse(spec, vg)), inverse(spec, g));
}

/// Whether an element lies in L: W = 0 and X in span{e_1..e_l}.
inline bool in_L(const HKGroupSpec& spec, const LSpec& lspec, const GroupElement& g, double tol = 1e-12) {
  for (const auto& w : g.w)
    if (w.norm() > tol) return false;
  for (int n = lspec.l; n < spec.base_dim(); ++n)
    if (std::abs(g.x(n)) > tol) return false;
  return true;
}

/// A point of the quotient is T^q-fixed iff the commutator lies in L for all
/// V; checks the identity class and `samples` random level-set points with W != 0.
inline FixedPointReport fixed_point_check(const HKGroupSpec& spec, const LSpec& lspec, int samples, Rng& rng,
                                          int directions = 4) {
  validate(spec, lspec);
  FixedPointReport rep;
  rep.applicable = lspec.l == spec.p() && spec.p() == spec.q;
  rep.samples = samples;

  const GroupElement e = GroupElement::identity(spec);
  bool fixed = in_L(spec, lspec, act_torus(spec, {rng.normal_vector(spec.q)}, e), 0.0);
  for (int d = 0; d < directions; ++d) {
    fixed = fixed && in_L(spec, lspec, torus_commutator(spec, rng.normal_vector(spec.k), e));
    // X in l is in the same class
    const GroupElement xl{embed_l(spec, rng.normal_vector(lspec.l)), QVector(spec.q)};
    fixed = fixed && in_L(spec, lspec, torus_commutator(spec, rng.normal_vector(spec.k), xl));
  }
  rep.identity_fixed = fixed;

  for (int n = 0; n < samples; ++n) {
    LevelSetCoords free{rng.qvector(spec.p()), rng.qvector(spec.q)};
    const GroupElement g = level_set_lift(spec, lspec, free);
    bool any_outside = false;
    for (int d = 0; d < directions && !any_outside; ++d)
      any_outside = !in_L(spec, lspec, torus_commutator(spec, rng.normal_vector(spec.k), g), 1e-9);
    if (any_outside) ++rep.not_fixed;
  }
  return rep;
}

}  // namespace hkq
