#pragma once

#include <Eigen/Dense>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "hkq/error.hpp"
#include "hkq/moment.hpp"
#include "hkq/parallel.hpp"
#include "hkq/quotient.hpp"
#include "hkq/sampling.hpp"

namespace hkq {

/// Scalar used for finite-difference jets and curvature contractions.
using Real = long double;
using MatrixR = Eigen::Matrix<Real, Eigen::Dynamic, Eigen::Dynamic>;
using VectorR = Eigen::Matrix<Real, Eigen::Dynamic, 1>;

/// A metric given pointwise in some chart, plus its domain.
struct MetricField {
  std::function<Eigen::MatrixXd(const Eigen::VectorXd&)> eval;
  int dim = 0;
  std::string chart;
  std::function<bool(const Eigen::VectorXd&)> inside = [](const Eigen::VectorXd&) { return true; };
  /// Optional extended-precision evaluator; stencils use it when set.
  std::function<MatrixR(const VectorR&)> eval_ext;
  /// Local length scale per coordinate; the FD step along coordinate a is
  /// step * scale(x)(a). Unset means unit scales (absolute steps).
  std::function<Eigen::VectorXd(const Eigen::VectorXd&)> scale;

  Eigen::VectorXd steps(const Eigen::VectorXd& x, double h) const {
    return scale ? Eigen::VectorXd(h * scale(x)) : Eigen::VectorXd::Constant(dim, h);
  }

  MatrixR eval_at(const VectorR& y) const {
    if (eval_ext) return eval_ext(y);
    return eval(y.cast<double>()).cast<Real>();
  }
};

struct FDOptions {
  double step = 1e-3;
  bool richardson = false;  ///< combine h and h/2 derivatives: (4 D(h/2) - D(h)) / 3
};

/// Dense rank-4 array, index order (i, j, k, l).
class Rank4 {
 public:
  explicit Rank4(int n = 0) : n_(n), data_(static_cast<std::size_t>(n) * n * n * n, 0.0) {}
  int dim() const { return n_; }
  double& operator()(int i, int j, int k, int l) { return data_[((i * n_ + j) * n_ + k) * n_ + l]; }
  double operator()(int i, int j, int k, int l) const { return data_[((i * n_ + j) * n_ + k) * n_ + l]; }
  double max_abs() const {
    double m = 0.0;
    for (double v : data_) m = std::max(m, std::abs(v));
    return m;
  }

 private:
  int n_;
  std::vector<double> data_;
};

/// Christoffel symbols of the second kind: gamma[i](j, k) = Gamma^i_{jk}.
using Christoffel = std::vector<Eigen::MatrixXd>;

namespace detail {

struct MetricJet {
  MatrixR g;
  std::vector<MatrixR> dg;                // dg[a] = d_a g
  std::vector<std::vector<MatrixR>> ddg;  // ddg[a][b] = d_a d_b g
};

/// Steps rounded so that x +- h is exact in double (double-only evaluators
/// would otherwise see a perturbed step).
inline VectorR stencil_steps(const MetricField& f, const Eigen::VectorXd& x, double step) {
  const Eigen::VectorXd h = f.steps(x, step);
  VectorR out(h.size());
  for (Eigen::Index a = 0; a < h.size(); ++a) {
    const volatile double up = x(a) + h(a);
    out(a) = static_cast<Real>(up) - static_cast<Real>(x(a));
  }
  return out;
}

inline void check_inside(const MetricField& f, const VectorR& y) {
  if (!f.inside(y.cast<double>()))
    throw Error(ErrorCode::DomainBoundary, "finite-difference stencil leaves the chart domain");
}

inline MetricJet metric_jet_raw(const MetricField& f, const Eigen::VectorXd& x, double step) {
  const int n = f.dim;
  const VectorR h = stencil_steps(f, x, step);
  const VectorR xr = x.cast<Real>();
  auto at = [&](int a, Real sa, int b, Real sb) {
    VectorR y = xr;
    if (a >= 0) y(a) += sa;
    if (b >= 0) y(b) += sb;
    check_inside(f, y);
    return f.eval_at(y);
  };
  MetricJet jet;
  jet.g = at(-1, 0, -1, 0);
  jet.dg.resize(n);
  jet.ddg.assign(n, std::vector<MatrixR>(n));
  for (int a = 0; a < n; ++a) {
    const MatrixR plus = at(a, h(a), -1, 0);
    const MatrixR minus = at(a, -h(a), -1, 0);
    jet.dg[a] = (plus - minus) / (2 * h(a));
    jet.ddg[a][a] = (plus - 2 * jet.g + minus) / (h(a) * h(a));
  }
  for (int a = 0; a < n; ++a)
    for (int b = a + 1; b < n; ++b) {
      jet.ddg[a][b] = (at(a, h(a), b, h(b)) - at(a, h(a), b, -h(b)) - at(a, -h(a), b, h(b)) +
                       at(a, -h(a), b, -h(b))) /
                      (4 * h(a) * h(b));
      jet.ddg[b][a] = jet.ddg[a][b];
    }
  return jet;
}

inline MetricJet metric_jet(const MetricField& f, const Eigen::VectorXd& x, const FDOptions& opt) {
  MetricJet coarse = metric_jet_raw(f, x, opt.step);
  if (!opt.richardson) return coarse;
  const MetricJet fine = metric_jet_raw(f, x, opt.step / 2);
  const int n = f.dim;
  for (int a = 0; a < n; ++a) {
    coarse.dg[a] = (4 * fine.dg[a] - coarse.dg[a]) / 3;
    for (int b = 0; b < n; ++b) coarse.ddg[a][b] = (4 * fine.ddg[a][b] - coarse.ddg[a][b]) / 3;
  }
  return coarse;
}

/// first[l](j, k) = Gamma_{ljk}, second[i](j, k) = Gamma^i_{jk}.
struct ChristoffelR {
  std::vector<MatrixR> first, second;
};

inline ChristoffelR christoffel_from_jet(const MetricJet& jet) {
  const int n = static_cast<int>(jet.g.rows());
  const MatrixR ginv = jet.g.inverse();
  ChristoffelR c;
  c.first.assign(n, MatrixR::Zero(n, n));
  for (int l = 0; l < n; ++l)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k) c.first[l](j, k) = (jet.dg[j](l, k) + jet.dg[k](j, l) - jet.dg[l](j, k)) / 2;
  c.second.assign(n, MatrixR::Zero(n, n));
  for (int i = 0; i < n; ++i)
    for (int l = 0; l < n; ++l)
      if (ginv(i, l) != 0) c.second[i] += ginv(i, l) * c.first[l];
  return c;
}

/// R_{iklm} = 1/2 (g_im,kl + g_kl,im - g_il,km - g_km,il) + g_np (G^n_kl G^p_im - G^n_km G^p_il);
/// unit sphere: R_{iklm} = g_il g_km - g_im g_kl.
inline std::vector<MatrixR> riemann_from_jet_r(const MetricJet& jet) {
  const int n = static_cast<int>(jet.g.rows());
  const ChristoffelR gam = christoffel_from_jet(jet);
  // flattened: out[i * n + k](l, m) = R_{iklm}
  std::vector<MatrixR> out(static_cast<std::size_t>(n) * n, MatrixR::Zero(n, n));
  for (int i = 0; i < n; ++i)
    for (int k = 0; k < n; ++k)
      for (int l = 0; l < n; ++l)
        for (int m = 0; m < n; ++m) {
          Real v = (jet.ddg[k][l](i, m) + jet.ddg[i][m](k, l) - jet.ddg[k][m](i, l) - jet.ddg[i][l](k, m)) / 2;
          for (int p = 0; p < n; ++p)
            v += gam.first[p](k, l) * gam.second[p](i, m) - gam.first[p](k, m) * gam.second[p](i, l);
          out[i * n + k](l, m) = v;
        }
  return out;
}

inline Rank4 to_rank4(const std::vector<MatrixR>& r, int n) {
  Rank4 out(n);
  for (int i = 0; i < n; ++i)
    for (int k = 0; k < n; ++k)
      for (int l = 0; l < n; ++l)
        for (int m = 0; m < n; ++m) out(i, k, l, m) = static_cast<double>(r[i * n + k](l, m));
  return out;
}

inline Rank4 riemann_from_jet(const MetricJet& jet) {
  return to_rank4(riemann_from_jet_r(jet), static_cast<int>(jet.g.rows()));
}

/// R_{km} = g^{il} R_{iklm}.
inline Eigen::MatrixXd ricci_from_jet(const MetricJet& jet, const std::vector<MatrixR>& riem) {
  const int n = static_cast<int>(jet.g.rows());
  const MatrixR ginv = jet.g.inverse();
  Eigen::MatrixXd ric(n, n);
  for (int k = 0; k < n; ++k)
    for (int m = 0; m < n; ++m) {
      Real v = 0;
      for (int i = 0; i < n; ++i)
        for (int l = 0; l < n; ++l) v += ginv(i, l) * riem[i * n + k](l, m);
      ric(k, m) = static_cast<double>(v);
    }
  return ric;
}

}  // namespace detail

inline Christoffel christoffel(const MetricField& f, const Eigen::VectorXd& x, const FDOptions& opt = {}) {
  // only first derivatives needed
  const int n = f.dim;
  const VectorR xr = x.cast<Real>();
  auto first_derivs = [&](double step) {
    const VectorR h = detail::stencil_steps(f, x, step);
    std::vector<MatrixR> dg(n);
    for (int a = 0; a < n; ++a) {
      VectorR up = xr, down = xr;
      up(a) += h(a);
      down(a) -= h(a);
      detail::check_inside(f, up);
      detail::check_inside(f, down);
      dg[a] = (f.eval_at(up) - f.eval_at(down)) / (2 * h(a));
    }
    return dg;
  };
  if (!f.inside(x)) throw Error(ErrorCode::DomainBoundary, "point outside the chart domain");
  detail::MetricJet jet;
  jet.g = f.eval_at(xr);
  jet.dg = first_derivs(opt.step);
  if (opt.richardson) {
    const auto fine = first_derivs(opt.step / 2);
    for (int a = 0; a < n; ++a) jet.dg[a] = (4 * fine[a] - jet.dg[a]) / 3;
  }
  const detail::ChristoffelR c = detail::christoffel_from_jet(jet);
  Christoffel out;
  for (const auto& m : c.second) out.push_back(m.cast<double>());
  return out;
}

inline Rank4 riemann(const MetricField& f, const Eigen::VectorXd& x, const FDOptions& opt = {}) {
  return detail::riemann_from_jet(detail::metric_jet(f, x, opt));
}

inline Eigen::MatrixXd ricci(const MetricField& f, const Eigen::VectorXd& x, const FDOptions& opt = {}) {
  const detail::MetricJet jet = detail::metric_jet(f, x, opt);
  return detail::ricci_from_jet(jet, detail::riemann_from_jet_r(jet));
}

/// Sectional curvature of the plane spanned by u, v from a precomputed Riemann tensor.
inline double sectional(const Rank4& r, const Eigen::MatrixXd& g, const Eigen::VectorXd& u, const Eigen::VectorXd& v) {
  const int n = r.dim();
  double num = 0.0;
  for (int i = 0; i < n; ++i)
    for (int k = 0; k < n; ++k) {
      if (u(i) == 0.0 || v(k) == 0.0) continue;
      for (int l = 0; l < n; ++l)
        for (int m = 0; m < n; ++m) num += r(i, k, l, m) * u(i) * v(k) * u(l) * v(m);
    }
  const double uu = u.dot(g * u), vv = v.dot(g * v), uv = u.dot(g * v);
  return num / (uu * vv - uv * uv);
}

inline double sectional(const MetricField& f, const Eigen::VectorXd& x, const Eigen::VectorXd& u,
                        const Eigen::VectorXd& v, const FDOptions& opt = {}) {
  const detail::MetricJet jet = detail::metric_jet(f, x, opt);
  return sectional(detail::riemann_from_jet(jet), jet.g.cast<double>(), u, v);
}

// ---------------------------------------------------------------------------
// Metric fields of the quotient constructions.

inline MetricField pp_metric_field(const HKGroupSpec& spec, const LSpec& lspec) {
  MetricField f;
  f.dim = quotient_dimension(spec, lspec);
  f.chart = "pp";
  const int pl = spec.p() - lspec.l, q = spec.q;
  f.eval = [spec, lspec](const Eigen::VectorXd& x) { return pp_metric_coords<double>(spec, lspec, x); };
  f.eval_ext = [spec, lspec](const VectorR& x) { return pp_metric_coords<Real>(spec, lspec, x); };
  f.inside = [pl, q](const Eigen::VectorXd& x) {
    const QuotientChartPoint pt = QuotientChartPoint::from_vector(pl, q, x);
    for (const auto& r : pt.r)
      if (norm3(r) < kChartExclusion || string_distance(r) < kChartExclusion) return false;
    return true;
  };
  // In r_b the metric varies on the scale min(|r_b|, distance to the string).
  f.scale = [pl, q](const Eigen::VectorXd& x) {
    const QuotientChartPoint pt = QuotientChartPoint::from_vector(pl, q, x);
    Eigen::VectorXd s = Eigen::VectorXd::Ones(x.size());
    for (int b = 0; b < q; ++b)
      s.segment(4 * pl + q + 3 * b, 3).setConstant(std::min(norm3(pt.r[b]), string_distance(pt.r[b])));
    return s;
  };
  return f;
}

inline MetricField orbit_space_field(const HKGroupSpec& spec, const LSpec& lspec) {
  MetricField f;
  f.dim = orbit_space_dimension(spec, lspec);
  f.chart = "orbit-space";
  f.eval = [spec, lspec](const Eigen::VectorXd& y) { return orbit_space_metric(spec, lspec, y); };
  return f;
}

struct CurvatureReport {
  Eigen::VectorXd point;
  double step = 0.0;
  bool richardson = false;
  double max_ricci = 0.0;  ///< max |Ricci| entry with the requested options
  std::optional<double> max_riemann;
  double central_h = 0.0;   ///< plain central differences, step h
  double central_h2 = 0.0;  ///< plain central differences, step h/2
  double truncation_estimate = 0.0;  ///< max |Ric(h) - Ric(h/2)|, plain central differences

  double convergence_ratio() const { return central_h / central_h2; }
};

inline constexpr double kRicciTol = 5e-4;
inline constexpr double kSectionalTol = 1e-4;

struct SamplePlan {
  int points = 20;
  int sectional_points = 50;
  int planes = 10;
  std::uint64_t seed = 1;
  FDOptions fd{1e-3, true};
  double r_min = 0.1;
  double r_max = 100.0;
  double string_margin = 0.1;  ///< radians
  bool log_spaced = true;      ///< |r_1| log-spaced over the samples, otherwise log-uniform
  double ricci_tol = kRicciTol;
  double sectional_tol = kSectionalTol;
};

struct QuotientVerification {
  std::vector<CurvatureReport> ricci;
  std::vector<double> sectional;  ///< sampled sectional curvatures of L \ G_theta
  double ricci_tol = kRicciTol;
  double sectional_tol = kSectionalTol;

  double max_ricci() const {
    double m = 0.0;
    for (const auto& r : ricci) m = std::max(m, r.max_ricci);
    return m;
  }
  /// Fraction of Ricci samples whose central-difference residual drops by at
  /// least `factor` when the step is halved.
  double converged_fraction(double factor = 3.0) const {
    if (ricci.empty()) return 1.0;
    int n = 0;
    for (const auto& r : ricci) n += r.central_h >= factor * r.central_h2;
    return static_cast<double>(n) / static_cast<double>(ricci.size());
  }
  double min_sectional() const {
    double m = std::numeric_limits<double>::infinity();
    for (double s : sectional) m = std::min(m, s);
    return m;
  }
  bool pass() const { return max_ricci() <= ricci_tol && (sectional.empty() || min_sectional() >= -sectional_tol); }
};

/// Chart points of the plan, deterministic in the seed.
inline std::vector<QuotientChartPoint> plan_points(const HKGroupSpec& spec, const LSpec& lspec, const SamplePlan& plan) {
  Rng rng(plan.seed);
  std::vector<QuotientChartPoint> pts;
  for (int n = 0; n < plan.points; ++n) {
    if (plan.log_spaced) {
      const double t = plan.points > 1 ? static_cast<double>(n) / (plan.points - 1) : 0.0;
      const double rad = plan.r_min * std::pow(plan.r_max / plan.r_min, t);
      pts.push_back(sample_chart_point_at_radius(spec, lspec, rng, rad, plan.string_margin));
    } else {
      pts.push_back(sample_chart_point(spec, lspec, rng, plan.r_min, plan.r_max, plan.string_margin));
    }
  }
  return pts;
}

inline CurvatureReport ricci_report(const MetricField& f, const Eigen::VectorXd& x, const FDOptions& fd,
                                    bool with_riemann = false) {
  CurvatureReport rep;
  rep.point = x;
  rep.step = fd.step;
  rep.richardson = fd.richardson;
  const detail::MetricJet coarse = detail::metric_jet_raw(f, x, fd.step);
  const detail::MetricJet fine = detail::metric_jet_raw(f, x, fd.step / 2);
  const Eigen::MatrixXd ric_h = detail::ricci_from_jet(coarse, detail::riemann_from_jet_r(coarse));
  const Eigen::MatrixXd ric_h2 = detail::ricci_from_jet(fine, detail::riemann_from_jet_r(fine));
  rep.central_h = ric_h.cwiseAbs().maxCoeff();
  rep.central_h2 = ric_h2.cwiseAbs().maxCoeff();
  rep.truncation_estimate = (ric_h - ric_h2).cwiseAbs().maxCoeff();

  detail::MetricJet jet = coarse;
  if (fd.richardson)
    for (int a = 0; a < f.dim; ++a) {
      jet.dg[a] = (4 * fine.dg[a] - coarse.dg[a]) / 3;
      for (int b = 0; b < f.dim; ++b) jet.ddg[a][b] = (4 * fine.ddg[a][b] - coarse.ddg[a][b]) / 3;
    }
  const std::vector<MatrixR> riem = detail::riemann_from_jet_r(jet);
  rep.max_ricci = detail::ricci_from_jet(jet, riem).cwiseAbs().maxCoeff();
  if (with_riemann) rep.max_riemann = detail::to_rank4(riem, f.dim).max_abs();
  return rep;
}

/// Ricci-flatness of the quotient metric at the plan's chart points, and
/// sectional curvatures of L \ G_theta at random points and planes.
inline QuotientVerification verify_quotient(const HKGroupSpec& spec, const LSpec& lspec, const SamplePlan& plan) {
  validate(spec, lspec);
  QuotientVerification out;
  out.ricci_tol = plan.ricci_tol;
  out.sectional_tol = plan.sectional_tol;

  const MetricField field = pp_metric_field(spec, lspec);
  const auto pts = plan_points(spec, lspec, plan);
  out.ricci = parallel_map(pts.size(), [&](std::size_t n) { return ricci_report(field, pts[n].to_vector(), plan.fd); });

  const MetricField base = orbit_space_field(spec, lspec);
  Rng rng(plan.seed ^ 0x9e3779b97f4a7c15ULL);
  struct Job {
    Eigen::VectorXd y;
    std::vector<std::pair<Eigen::VectorXd, Eigen::VectorXd>> planes;
  };
  std::vector<Job> jobs(plan.sectional_points);
  for (auto& job : jobs) {
    job.y = rng.normal_vector(base.dim);
    for (int k = 0; k < plan.planes; ++k) job.planes.emplace_back(rng.normal_vector(base.dim), rng.normal_vector(base.dim));
  }
  const auto per_point = parallel_map(jobs.size(), [&](std::size_t n) {
    const detail::MetricJet jet = detail::metric_jet(base, jobs[n].y, plan.fd);
    const Rank4 riem = detail::riemann_from_jet(jet);
    std::vector<double> ks;
    const Eigen::MatrixXd g = jet.g.cast<double>();
    for (const auto& [u, v] : jobs[n].planes) ks.push_back(sectional(riem, g, u, v));
    return ks;
  });
  for (const auto& ks : per_point) out.sectional.insert(out.sectional.end(), ks.begin(), ks.end());
  return out;
}

}  // namespace hkq
