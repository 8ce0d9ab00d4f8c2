// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any fail.

#include <Eigen/Dense>
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numeric>
#include <string>
#include <vector>

#include "hkq/hkq.hpp"
#include "oracles.hpp"

using namespace hkq;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

struct Outcome {
  bool pass;
  std::string detail;
};

int failures = 0;

void criterion(const char* name, const std::function<Outcome()>& body) {
  const auto t0 = Clock::now();
  Outcome o;
  try {
    o = body();
  } catch (const std::exception& e) {
    o = {false, std::string("threw: ") + e.what()};
  }
  std::printf("%s  %-26s %s [%.1f s]\n", o.pass ? "PASS" : "FAIL", name, o.detail.c_str(), seconds_since(t0));
  std::fflush(stdout);
  if (!o.pass) ++failures;
}

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

std::vector<Preset> presets() {
  Eigen::MatrixXd t(2, 2);
  t << 1, 0, 1, 2;
  return {taub_nut(1.0),      taub_nut(2.0), taubian_calabi(2), taubian_calabi(3), lwy(Eigen::MatrixXd::Identity(2, 2)),
          lwy(t)};
}

std::string label(const Preset& p) {
  if (p.name == "taub-nut") return fmt("taub-nut(%g)", p.spec.theta(0, 0));
  if (p.name == "taubian-calabi") return fmt("taubian-calabi(%d)", p.spec.q);
  return p.spec.theta.isIdentity() ? "lwy(id)" : "lwy(1,0;1,2)";
}

double max_abs(const Eigen::MatrixXd& m) { return m.size() ? m.cwiseAbs().maxCoeff() : 0.0; }

Outcome algebraic_axioms() {
  const auto t0 = Clock::now();
  Rng rng(1001);
  double worst = 0;
  int failed = 0;
  for (int n = 0; n < 50; ++n) {
    const VerificationReport rep = verify_hyperkahler(oracle::random_hk_spec(rng, 4), 1e-12);
    for (const auto& c : rep.checks) {
      worst = std::max(worst, c.residual);
      if (c.residual > 1e-12) ++failed;
    }
  }
  const double t = seconds_since(t0);
  return {failed == 0 && t <= 10.0, fmt("50 specs, max residual %.2e (tol 1e-12), %.2f s (limit 10 s)", worst, t)};
}

Outcome moment_consistency() {
  Rng rng(1002);
  double form = 0, inv = 0;
  for (const auto& p : presets())
    for (int n = 0; n < 1000; ++n) {
      const GroupElement g{rng.normal_vector(p.spec.base_dim()), rng.qvector(p.spec.q)};
      const MomentValue mu = moment(p.spec, p.lspec, g);
      form = std::max(form, max_abs(mu - moment_abstract(p.spec, p.lspec, g)));
      const Eigen::VectorXd t = rng.normal_vector(p.lspec.l);
      const Vec3<double> comp = moment_components(p.spec, p.lspec, g, t);
      const Eigen::RowVector3d contracted = t.transpose() * mu;
      for (int c = 0; c < 3; ++c) form = std::max(form, std::abs(comp[c] - contracted(c)));
      inv = std::max(inv, check_invariance(p.spec, p.lspec, g, rng.normal_vector(p.lspec.l)));
    }
  return {form <= 1e-12 && inv <= 1e-10,
          fmt("6 presets x 1000 points, form residual %.2e (tol 1e-12), invariance %.2e (tol 1e-10)", form, inv)};
}

Outcome level_set_identity() {
  Rng rng(1003);
  double worst = 0;
  for (const auto& p : presets())
    for (int n = 0; n < 1000; ++n) {
      const LevelSetCoords free{rng.qvector(p.spec.p()), rng.qvector(p.spec.q)};
      worst = std::max(worst, max_abs(moment(p.spec, p.lspec, level_set_lift(p.spec, p.lspec, free))));
    }
  return {worst <= 1e-12, fmt("6 presets x 1000 tuples, max |moment| %.2e (tol 1e-12)", worst)};
}

Outcome oracle_equivalence() {
  const auto t0 = Clock::now();
  Rng rng(1004);
  double worst = 0;
  std::string per;
  for (const auto& p : presets()) {
    std::vector<QuotientChartPoint> pts;
    for (int n = 0; n < 20; ++n) pts.push_back(sample_chart_point(p.spec, p.lspec, rng));
    const auto dev = parallel_map(pts.size(), [&](std::size_t n) {
      return max_abs(pp_metric(p.spec, p.lspec, pts[n]).g - reduction_oracle(p.spec, p.lspec, pts[n]).g);
    });
    const double m = *std::max_element(dev.begin(), dev.end());
    worst = std::max(worst, m);
    per += fmt(" %s=%.1e", label(p).c_str(), m);
  }
  const double t = seconds_since(t0);
  return {worst <= 1e-6 && t <= 60.0, fmt("20 points per preset, max deviation %.2e (tol 1e-6), %.1f s (limit 60 s);%s",
                                          worst, t, per.c_str())};
}

Outcome ricci_flatness() {
  const auto t0 = Clock::now();
  SamplePlan plan;  // 20 points, step 1e-3, Richardson over 1e-3 and 5e-4
  plan.sectional_points = 0;
  double worst = 0, plain = 0, conv_min = 1;
  bool ok = true;
  std::string per;
  for (const auto& p : presets()) {
    const QuotientVerification v = verify_quotient(p.spec, p.lspec, plan);
    const double conv = v.converged_fraction(3.0);
    double pm = 0;
    for (const auto& r : v.ricci) pm = std::max(pm, r.central_h);
    worst = std::max(worst, v.max_ricci());
    plain = std::max(plain, pm);
    conv_min = std::min(conv_min, conv);
    ok = ok && v.max_ricci() <= 5e-4 && conv >= 0.8;
    per += fmt(" %s=%.1e/%.0f%%", label(p).c_str(), v.max_ricci(), 100 * conv);
  }
  const double t = seconds_since(t0);
  return {ok && t <= 300.0,
          fmt("max |Ricci| %.2e (tol 5e-4, extrapolated), halving >= 3x on min %.0f%% (need 80%%), "
              "plain-CD max %.2e, %.1f s (limit 300 s);%s",
              worst, 100 * conv_min, plain, t, per.c_str())};
}

// g = 1/4 (H |dr|^2 + H^-1 (dtau + Omega . dr)^2), string on the negative first axis
Eigen::Matrix4d taub_nut_by_hand(double theta, const Eigen::Vector3d& r) {
  const double rn = r.norm();
  const double h = theta * theta + 1.0 / rn;
  const Eigen::Vector3d omega(0.0, -r(2) / (rn * (rn + r(0))), r(1) / (rn * (rn + r(0))));
  Eigen::Vector4d a;
  a << 1.0, omega;
  Eigen::Matrix4d g = a * a.transpose() / h;
  g.bottomRightCorner<3, 3>() += h * Eigen::Matrix3d::Identity();
  return g / 4.0;
}

Outcome taub_nut_identification() {
  double h_dev = 0, g_dev = 0;
  const std::vector<Eigen::Vector3d> dirs{{0, 0, 1}, {0, 0.6, 0.8}, {0.6, 0, 0.8}, {-0.28, 0.96, 0}};
  for (double th : {1.0, 2.0, 3.0}) {
    const Preset tn = taub_nut(th);
    for (double r : {0.1, 1.0, 10.0})
      for (const auto& u : dirs) {
        const Eigen::Vector3d rv = r * u;
        const Eigen::MatrixXd h = h_matrix(tn.spec, tn.lspec, {{rv(0), rv(1), rv(2)}});
        h_dev = std::max(h_dev, std::abs(h(0, 0) - (th * th + 1.0 / rv.norm())));
        const QuotientChartPoint pt{{}, Eigen::VectorXd::Constant(1, 0.7), {{rv(0), rv(1), rv(2)}}};
        g_dev = std::max(g_dev, max_abs(pp_metric(tn.spec, tn.lspec, pt).g - Eigen::MatrixXd(taub_nut_by_hand(th, rv))));
      }
  }
  // theta = 1 on the axis: H = 1 + 1/r with no rounding slack
  bool exact = true;
  const Preset tn1 = taub_nut(1.0);
  for (double r : {0.1, 1.0, 10.0}) exact = exact && h_matrix(tn1.spec, tn1.lspec, {{0.0, 0.0, r}})(0, 0) == 1.0 + 1.0 / r;
  return {exact && h_dev <= 1e-12 && g_dev <= 1e-12,
          fmt("theta 1,2,3 x r 0.1,1,10 x 4 directions, H exact at theta=1: %s, |H - (theta^2 + 1/r)| %.1e, "
              "metric vs hand form %.2e (tol 1e-12)",
              exact ? "yes" : "no", h_dev, g_dev)};
}

Outcome dimension_and_fixed_point() {
  bool ok = true;
  std::string detail;
  for (const auto& p : presets()) {
    const int expect = 4 * p.spec.p() + 4 * p.spec.q - 4 * p.lspec.l;
    const int chart = static_cast<int>(chart_coordinate_names(p.spec, p.lspec).size());
    Rng rng(1007);
    const int metric = static_cast<int>(pp_metric(p.spec, p.lspec, sample_chart_point(p.spec, p.lspec, rng)).g.rows());
    ok = ok && quotient_dimension(p.spec, p.lspec) == expect && chart == expect && metric == expect;
  }
  detail += ok ? "dimensions agree on 6 presets;" : "dimension mismatch;";
  for (int m : {1, 2}) {
    Rng rng(1070 + m);
    const FixedPointReport rep = fixed_point_check(lwy(Eigen::MatrixXd::Identity(m, m)).spec,
                                                   lwy(Eigen::MatrixXd::Identity(m, m)).lspec, 200, rng);
    ok = ok && rep.applicable && rep.identity_fixed && rep.samples == 200 && rep.not_fixed == 200;
    detail += fmt(" lwy(id_%d): origin fixed %s, %d/%d samples not fixed;", m, rep.identity_fixed ? "yes" : "no",
                  rep.not_fixed, rep.samples);
  }
  return {ok, detail};
}

Outcome classification() {
  bool ok = true;
  for (double a : {1.0, 2.0, 3.0})
    for (double b : {1.0, 2.0, 3.0}) {
      if (a >= b) continue;
      const HKGroupSpec sa{3, 1, 1, Eigen::MatrixXd::Constant(1, 1, a), FiberKind::Quaternionic};
      const HKGroupSpec sb{3, 1, 1, Eigen::MatrixXd::Constant(1, 1, b), FiberKind::Quaternionic};
      const MonomialVerdict v = equivalent_monomial(sa, sb);
      ok = ok && !v.equivalent && v.invariants_differ;
    }
  Rng rng(1008);
  double worst = 0;
  int recovered = 0;
  for (int n = 0; n < 100; ++n) {
    const HKGroupSpec spec = oracle::random_hk_spec(rng, 4);
    MonomialWitness w;
    w.perm.resize(spec.q);
    std::iota(w.perm.begin(), w.perm.end(), 0);
    std::shuffle(w.perm.begin(), w.perm.end(), rng.engine());
    for (int b = 0; b < spec.q; ++b) w.signs.push_back(rng.coin() ? 1 : -1);
    w.a = rng.orthogonal(spec.k);
    HKGroupSpec moved = spec;
    moved.theta = w.apply(spec.theta);
    const MonomialVerdict v = equivalent_monomial(spec, moved);
    if (v.equivalent && v.witness) {
      ++recovered;
      worst = std::max(worst, max_abs(v.witness->apply(spec.theta) - moved.theta));
    }
  }
  ok = ok && recovered == 100 && worst <= 1e-9;
  return {ok, fmt("theta=(1),(2),(3) pairwise inequivalent: %s; %d/100 witnesses recovered, max residual %.2e (tol 1e-9)",
                  ok ? "yes" : "check", recovered, worst)};
}

Outcome sectional_nonnegative() {
  SamplePlan plan;
  plan.points = 0;
  plan.sectional_points = 50;
  plan.planes = 10;
  double worst = 1e300;
  std::size_t count = 0;
  std::string per;
  for (const auto& p : presets()) {
    const QuotientVerification v = verify_quotient(p.spec, p.lspec, plan);
    count += v.sectional.size();
    worst = std::min(worst, v.min_sectional());
    per += fmt(" %s=%.1e", label(p).c_str(), v.min_sectional());
  }
  return {count == 6u * 500u && worst >= -1e-4,
          fmt("%zu samples (50 points x 10 planes per preset), min sectional %.2e (tol -1e-4);%s", count, worst,
              per.c_str())};
}

}  // namespace

int main() {
  criterion("algebraic-axioms", algebraic_axioms);
  criterion("moment-consistency", moment_consistency);
  criterion("level-set-identity", level_set_identity);
  criterion("oracle-equivalence", oracle_equivalence);
  criterion("ricci-flatness", ricci_flatness);
  criterion("taub-nut-identification", taub_nut_identification);
  criterion("dimension-fixed-point", dimension_and_fixed_point);
  criterion("classification", classification);
  criterion("sectional-nonnegative", sectional_nonnegative);
  std::printf("%d of 9 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
