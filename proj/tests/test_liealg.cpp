#include <gtest/gtest.h>

#include "hkq/liealg.hpp"
#include "hkq/sampling.hpp"
#include "oracles.hpp"

using namespace hkq;

namespace {

HKGroupSpec eight_dim(double a) { return {3, 1, 1, Eigen::MatrixXd::Constant(1, 1, a), FiberKind::Quaternionic}; }

// twelve-dimensional family: theta rows (1) and (s)
HKGroupSpec g_family(double s) {
  Eigen::MatrixXd th(2, 1);
  th << 1, s;
  return {3, 1, 2, th, FiberKind::Quaternionic};
}

Eigen::VectorXd vec(const HKGroupSpec& spec, const AlgebraElement& e) { return e.to_vector(); }

AlgebraElement random_element(const HKGroupSpec& spec, Rng& rng) {
  return AlgebraElement::from_vector(spec, rng.normal_vector(spec.dim()));
}

// Koszul formula evaluated directly against the bracket.
Eigen::VectorXd koszul(const HKGroupSpec& spec, const Eigen::VectorXd& x, const Eigen::VectorXd& y) {
  const int n = spec.dim();
  auto br = [&](const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
    return bracket(spec, AlgebraElement::from_vector(spec, a), AlgebraElement::from_vector(spec, b)).to_vector();
  };
  Eigen::VectorXd out(n);
  for (int m = 0; m < n; ++m) {
    const Eigen::VectorXd e = Eigen::VectorXd::Unit(n, m);
    out(m) = 0.5 * (br(x, y).dot(e) - br(y, e).dot(x) + br(e, x).dot(y));
  }
  return out;
}

double max_abs(const Eigen::VectorXd& v) { return v.size() ? v.cwiseAbs().maxCoeff() : 0.0; }

}  // namespace

TEST(Rho, MatchesDisplayedMatrix) {
  const double th = 1.7;
  const HKGroupSpec spec = eight_dim(th);
  Eigen::Matrix4d expect;
  expect << 0, -th, 0, 0, th, 0, 0, 0, 0, 0, 0, -th, 0, 0, th, 0;
  EXPECT_EQ(rho(spec, Eigen::VectorXd::Unit(1, 0)), Eigen::MatrixXd(expect));
  EXPECT_EQ(rho(spec, Eigen::VectorXd::Zero(1)), Eigen::MatrixXd::Zero(4, 4));
}

TEST(Rho, SkewAndCommutesWithComplexStructures) {
  Rng rng(21);
  for (int n = 0; n < 20; ++n) {
    const HKGroupSpec spec = oracle::random_hk_spec(rng);
    const Eigen::MatrixXd r = rho(spec, rng.normal_vector(spec.k));
    EXPECT_LT((r + r.transpose()).cwiseAbs().maxCoeff(), 1e-15);
    for (int axis = 1; axis <= 3; ++axis) {
      const Eigen::MatrixXd j = complex_structure(spec, axis).bottomRightCorner(spec.fiber_dim(), spec.fiber_dim());
      EXPECT_LT((r * j - j * r).cwiseAbs().maxCoeff(), 1e-13);
    }
  }
}

TEST(Bracket, ActingDirectionOnFiber) {
  const double th = 2.5;
  const HKGroupSpec spec = eight_dim(th);
  const AlgebraElement e1 = AlgebraElement::basis(spec, 0);
  const AlgebraElement f1 = AlgebraElement::basis(spec, spec.base_dim());
  const AlgebraElement out = bracket(spec, e1, f1);
  Eigen::VectorXd expect = Eigen::VectorXd::Zero(spec.dim());
  expect(spec.base_dim() + 1) = th;  // theta f1 i
  EXPECT_EQ(out.to_vector(), expect);
  EXPECT_EQ(bracket(spec, e1, AlgebraElement::basis(spec, 1)).to_vector(), Eigen::VectorXd::Zero(spec.dim()));
}

TEST(Bracket, AntisymmetricCentralAndJacobi) {
  Rng rng(22);
  for (int n = 0; n < 10; ++n) {
    const HKGroupSpec spec = oracle::random_hk_spec(rng, 3);
    const int dim = spec.dim();
    for (int t = 0; t < 5; ++t) {
      const AlgebraElement a = random_element(spec, rng), b = random_element(spec, rng);
      const AlgebraElement ab = bracket(spec, a, b);
      EXPECT_LT(max_abs(ab.to_vector() + bracket(spec, b, a).to_vector()), 1e-13);
      EXPECT_LT(max_abs(ab.t_part), 1e-15);
    }
    for (int c = spec.k; c < spec.base_dim(); ++c)
      for (int m = 0; m < dim; ++m)
        EXPECT_EQ(max_abs(bracket(spec, AlgebraElement::basis(spec, c), AlgebraElement::basis(spec, m)).to_vector()),
                  0.0);
    double worst = 0.0;
    for (int i = 0; i < dim; ++i)
      for (int j = 0; j < dim; ++j)
        for (int k = 0; k < dim; ++k) {
          const AlgebraElement x = AlgebraElement::basis(spec, i), y = AlgebraElement::basis(spec, j),
                               z = AlgebraElement::basis(spec, k);
          const Eigen::VectorXd jac = bracket(spec, x, bracket(spec, y, z)).to_vector() +
                                      bracket(spec, y, bracket(spec, z, x)).to_vector() +
                                      bracket(spec, z, bracket(spec, x, y)).to_vector();
          worst = std::max(worst, max_abs(jac));
        }
    EXPECT_LE(worst, algebra_tolerance(spec));
  }
}

TEST(LeviCivita, MatchesKoszulFormula) {
  Rng rng(23);
  for (int n = 0; n < 10; ++n) {
    const HKGroupSpec spec = oracle::random_hk_spec(rng);
    const MetricLieAlgebra alg(spec);
    for (int t = 0; t < 5; ++t) {
      const Eigen::VectorXd x = rng.normal_vector(spec.dim()), y = rng.normal_vector(spec.dim());
      EXPECT_LT(max_abs(alg.connection(x, y) - koszul(spec, x, y)), 1e-12);
    }
  }
}

TEST(LeviCivita, TorsionFreeAndMetric) {
  Rng rng(24);
  const HKGroupSpec spec = g_family(2.0);
  const MetricLieAlgebra alg(spec);
  for (int t = 0; t < 20; ++t) {
    const Eigen::VectorXd x = rng.normal_vector(spec.dim()), y = rng.normal_vector(spec.dim()),
                          z = rng.normal_vector(spec.dim());
    EXPECT_LT(max_abs(alg.connection(x, y) - alg.connection(y, x) - alg.bracket(x, y)), 1e-12);
    EXPECT_NEAR(alg.connection(x, y).dot(z) + y.dot(alg.connection(x, z)), 0.0, 1e-12);
  }
}

TEST(LeviCivita, DisplayedExamples) {
  const HKGroupSpec spec = g_family(3.0);
  Rng rng(25);
  const AlgebraElement t1 = AlgebraElement::basis(spec, 0);
  const AlgebraElement v{rng.normal_vector(spec.base_dim()), Eigen::VectorXd::Zero(spec.fiber_dim())};
  const AlgebraElement w{Eigen::VectorXd::Zero(spec.base_dim()), rng.normal_vector(spec.fiber_dim())};
  const AlgebraElement w2{Eigen::VectorXd::Zero(spec.base_dim()), rng.normal_vector(spec.fiber_dim())};
  EXPECT_LT(max_abs(levi_civita(spec, t1, v).to_vector()), 1e-15);
  const AlgebraElement xw = levi_civita(spec, v, w);
  EXPECT_LT(max_abs(xw.w_part - rho(spec, v.t_part) * w.w_part), 1e-13);
  EXPECT_LT(max_abs(xw.t_part), 1e-15);
  EXPECT_LT(max_abs(levi_civita(spec, w, w2).to_vector()), 1e-15);
}

TEST(CurvatureAlg, VanishesOnFamilies) {
  for (double s : {1.0, 2.0, 5.0}) {
    const HKGroupSpec spec = g_family(s);
    const int dim = spec.dim();
    double worst = 0.0;
    for (int i = 0; i < dim; ++i)
      for (int j = 0; j < dim; ++j)
        for (int k = 0; k < dim; ++k)
          worst = std::max(worst, max_abs(curvature_alg(spec, AlgebraElement::basis(spec, i),
                                                        AlgebraElement::basis(spec, j), AlgebraElement::basis(spec, k))
                                              .to_vector()));
    EXPECT_LE(worst, algebra_tolerance(spec));
  }
  const HKGroupSpec spec = eight_dim(1.3);
  const AlgebraElement e1 = AlgebraElement::basis(spec, 0), f1 = AlgebraElement::basis(spec, spec.base_dim());
  EXPECT_LT(max_abs(curvature_alg(spec, e1, f1, f1).to_vector()), 1e-14);
}

TEST(CurvatureAlg, FromKoszulOracle) {
  // R(X,Y)Z assembled from the oracle connection
  Rng rng(26);
  const HKGroupSpec spec = oracle::random_hk_spec(rng);
  const MetricLieAlgebra alg(spec);
  for (int t = 0; t < 10; ++t) {
    const Eigen::VectorXd x = rng.normal_vector(spec.dim()), y = rng.normal_vector(spec.dim()),
                          z = rng.normal_vector(spec.dim());
    const Eigen::VectorXd xy = alg.bracket(x, y);
    const Eigen::VectorXd r = koszul(spec, x, koszul(spec, y, z)) - koszul(spec, y, koszul(spec, x, z)) -
                              koszul(spec, xy, z);
    EXPECT_LT(max_abs(r), 1e-11);
    EXPECT_LT(max_abs(alg.curvature(x, x, y)), 1e-15);
  }
}

TEST(ComplexStructures, QuaternionRelationsAndIsometry) {
  Rng rng(27);
  const HKGroupSpec spec = oracle::random_hk_spec(rng);
  const auto js = complex_structures(spec);
  const Eigen::MatrixXd id = Eigen::MatrixXd::Identity(spec.dim(), spec.dim());
  for (const auto& j : js) {
    EXPECT_LT((j * j + id).cwiseAbs().maxCoeff(), 1e-15);
    EXPECT_LT((j.transpose() * j - id).cwiseAbs().maxCoeff(), 1e-15);
  }
  EXPECT_LT((js[0] * js[1] - js[2]).cwiseAbs().maxCoeff(), 1e-15);
  EXPECT_LT((js[1] * js[0] + js[2]).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(Nijenhuis, AntisymmetricAndZero) {
  const HKGroupSpec spec = eight_dim(1.0);
  const AlgebraElement e1 = AlgebraElement::basis(spec, 0), f1 = AlgebraElement::basis(spec, spec.base_dim());
  for (int axis = 1; axis <= 3; ++axis) {
    EXPECT_LT(max_abs(nijenhuis(spec, axis, e1, f1).to_vector()), 1e-15);
    EXPECT_LT(max_abs(nijenhuis(spec, axis, f1, f1).to_vector()), 1e-15);
  }
  Rng rng(28);
  const HKGroupSpec rs = oracle::random_hk_spec(rng);
  for (int t = 0; t < 10; ++t) {
    const AlgebraElement x = random_element(rs, rng), y = random_element(rs, rng);
    for (int axis = 1; axis <= 3; ++axis) {
      const Eigen::VectorXd nxy = nijenhuis(rs, axis, x, y).to_vector();
      EXPECT_LT(max_abs(nxy + nijenhuis(rs, axis, y, x).to_vector()), 1e-12);
      EXPECT_LT(max_abs(nxy), 1e-12);
    }
  }
}

TEST(KahlerForm, SignAndConsistency) {
  const HKGroupSpec spec = eight_dim(1.0);
  const AlgebraElement f1 = AlgebraElement::basis(spec, spec.base_dim());
  const AlgebraElement f1i = AlgebraElement::basis(spec, spec.base_dim() + 1);
  EXPECT_EQ(kahler_form(spec, 1, f1, f1i), -1.0);
  Rng rng(29);
  const auto js = complex_structures(spec);
  for (int t = 0; t < 20; ++t) {
    const AlgebraElement x = random_element(spec, rng), y = random_element(spec, rng);
    for (int axis = 1; axis <= 3; ++axis) {
      EXPECT_NEAR(kahler_form(spec, axis, x, x), 0.0, 1e-14);
      EXPECT_NEAR(kahler_form(spec, axis, x, y), -kahler_form(spec, axis, y, x), 1e-13);
    }
    // omega_3(X, Y) = g(J_1 J_2 X, Y) = omega_1(J_2 X, Y)
    const AlgebraElement j2x = AlgebraElement::from_vector(spec, js[1] * vec(spec, x));
    EXPECT_NEAR(kahler_form(spec, 3, x, y), kahler_form(spec, 1, j2x, y), 1e-13);
  }
}

TEST(DOmega, ClosedForValidSpecsAndAntisymmetric) {
  Rng rng(30);
  const HKGroupSpec spec = g_family(2.0);
  for (int t = 0; t < 20; ++t) {
    const AlgebraElement x = random_element(spec, rng), y = random_element(spec, rng), z = random_element(spec, rng);
    for (int axis = 1; axis <= 3; ++axis) {
      EXPECT_NEAR(d_omega(spec, axis, x, y, z), 0.0, 1e-12);
      EXPECT_NEAR(d_omega(spec, axis, x, x, y), 0.0, 1e-12);
    }
  }
}

TEST(DOmega, NegativeControlDetectsNonCommutingStructure) {
  // J = left multiplication by j on the fiber does not commute with rho, so
  // its Kaehler form is not closed.
  const HKGroupSpec spec = eight_dim(1.0);
  const MetricLieAlgebra alg(spec);
  Eigen::MatrixXd j = complex_structure(spec, 2);
  for (int c = 0; c < 4; ++c) {
    const Quat img = qmul(Quat::unit(2), Quat::unit(c));
    for (int d = 0; d < 4; ++d) j(spec.base_dim() + d, spec.base_dim() + c) = img[d];
  }
  const Eigen::MatrixXd id = Eigen::MatrixXd::Identity(spec.dim(), spec.dim());
  ASSERT_LT((j * j + id).cwiseAbs().maxCoeff(), 1e-15);
  const Eigen::MatrixXd r = rho(spec, Eigen::VectorXd::Ones(1));
  const Eigen::MatrixXd jf = j.bottomRightCorner(4, 4);
  EXPECT_GT((r * jf - jf * r).cwiseAbs().maxCoeff(), 0.5);

  double worst = 0.0;
  for (int a = 0; a < spec.dim(); ++a)
    for (int b = 0; b < spec.dim(); ++b)
      for (int c = 0; c < spec.dim(); ++c)
        worst = std::max(worst, std::abs(d_omega(alg, j, Eigen::VectorXd::Unit(spec.dim(), a),
                                                 Eigen::VectorXd::Unit(spec.dim(), b),
                                                 Eigen::VectorXd::Unit(spec.dim(), c))));
  EXPECT_GT(worst, 0.5);
  EXPECT_GT(detail::d_omega_residual(alg, j), 0.5);
}

TEST(VerifyHyperkahler, FamiliesPass) {
  for (double a : {1.0, 2.0, -0.5}) {
    const VerificationReport rep = verify_hyperkahler(eight_dim(a));
    EXPECT_TRUE(rep.pass());
    EXPECT_EQ(rep.checks.size(), 7u);
  }
  const VerificationReport rep = verify_hyperkahler(g_family(2.0));
  EXPECT_TRUE(rep.pass());
  for (const char* name : {"jacobi", "curvature", "nijenhuis", "d_omega", "nabla_J", "compatibility"})
    ASSERT_NE(rep.find(name), nullptr) << name;
}

TEST(VerifyHyperkahler, RandomSpecsPass) {
  Rng rng(31);
  for (int n = 0; n < 10; ++n) {
    const HKGroupSpec spec = oracle::random_hk_spec(rng);
    const VerificationReport rep = verify_hyperkahler(spec);
    EXPECT_TRUE(rep.pass());
    for (const auto& c : rep.checks) EXPECT_LE(c.residual, 1e-12) << c.name;
  }
}

TEST(VerifyHyperkahler, InvalidSpecs) {
  auto expect_code = [](const HKGroupSpec& spec, ErrorCode code) {
    try {
      verify_hyperkahler(spec);
      ADD_FAILURE() << "expected " << to_string(code);
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), code);
    }
  };
  Eigen::MatrixXd zero_row(2, 1);
  zero_row << 1, 0;
  expect_code({3, 1, 2, zero_row, FiberKind::Quaternionic}, ErrorCode::SpecInvalid);
  Eigen::MatrixXd low_rank(2, 2);
  low_rank << 1, 2, 2, 4;
  expect_code({2, 2, 2, low_rank, FiberKind::Quaternionic}, ErrorCode::SpecInvalid);
  expect_code({2, 1, 1, Eigen::MatrixXd::Ones(1, 1), FiberKind::Quaternionic}, ErrorCode::SpecInvalid);
  expect_code({3, 1, 2, Eigen::MatrixXd::Ones(1, 1), FiberKind::Quaternionic}, ErrorCode::SpecInvalid);
}

TEST(KahlerFlat, SmallestExample) {
  const HKGroupSpec spec{1, 1, 1, Eigen::MatrixXd::Ones(1, 1), FiberKind::Complex2m};
  ASSERT_EQ(spec.dim(), 4);
  const KahlerFlatResult res = kahler_structure_flat(spec);
  EXPECT_TRUE(res.report.pass());
  const Eigen::MatrixXd r = rho(spec, Eigen::VectorXd::Ones(1));
  const Eigen::MatrixXd jf = res.j.bottomRightCorner(2, 2);
  EXPECT_LT((r * jf - jf * r).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(KahlerFlat, RandomFlatSpecs) {
  Rng rng(32);
  for (int n = 0; n < 20; ++n) {
    HKGroupSpec spec;
    spec.mode = FiberKind::Complex2m;
    spec.q = rng.uniform_int(1, 4);
    spec.k = rng.uniform_int(1, spec.q);
    spec.s = rng.uniform_int(0, 3) * 2 + (spec.k % 2);
    spec.theta = Eigen::MatrixXd(spec.q, spec.k);
    for (int b = 0; b < spec.q; ++b)
      for (int a = 0; a < spec.k; ++a) spec.theta(b, a) = rng.uniform(-2.0, 2.0);
    const KahlerFlatResult res = kahler_structure_flat(spec);
    EXPECT_TRUE(res.report.pass());
    const MetricLieAlgebra alg(spec);
    for (int t = 0; t < 3; ++t) {
      const Eigen::VectorXd x = rng.normal_vector(spec.dim()), y = rng.normal_vector(spec.dim());
      EXPECT_LT(max_abs(nijenhuis(alg, res.j, x, y)), 1e-12);
    }
  }
}

TEST(KahlerFlat, OddDimensionRejected) {
  const HKGroupSpec spec{0, 1, 1, Eigen::MatrixXd::Ones(1, 1), FiberKind::Complex2m};
  try {
    kahler_structure_flat(spec);
    FAIL() << "expected OddDimension";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::OddDimension);
  }
}
