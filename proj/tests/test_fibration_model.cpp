#include <gtest/gtest.h>

#include <random>

#include "hypersym/fibration_model.hpp"
#include "oracles.hpp"

using namespace hypersym;

namespace {

SampleConfig quick(int n_points = 20) { return {n_points, 42, 1e-5}; }

Vector e(const FibrationModel& m, int axis) { return unit(m.total_chart()->dim(), axis); }

// Oracle for the block-sum forms: matrix entries written down directly.
Matrix expected_matrix(int n, const char* which) {
  const int d = 4 * n;
  Matrix m = Matrix::Zero(d, d);
  auto set = [&](int a, int b, double v) {
    m(a, b) += v;
    m(b, a) -= v;
  };
  for (int i = 0; i < n; ++i) {
    const int x = i, y = n + i, p = 2 * n + i, q = 3 * n + i;
    if (std::string(which) == "omega") {
      set(p, x, 1);
      set(q, y, 1);
    } else if (std::string(which) == "chi") {
      set(p, q, -1);
      set(x, y, 1);
    } else {
      set(q, x, 1);
      set(y, p, 1);
    }
  }
  return m;
}

const CheckReport& find(const std::vector<CheckReport>& rs, const std::string& id) {
  for (const auto& r : rs)
    if (r.identity == id) return r;
  throw std::runtime_error("missing report " + id);
}

Polynomial lin(int var, double c = 1.0) { return Polynomial::linear(2, var, c); }
Polynomial zero() { return Polynomial(2); }

}  // namespace

TEST(FibrationModel, Layout) {
  auto m = FibrationModel::standard(2);
  EXPECT_EQ(m.base_chart()->dim(), 4);
  EXPECT_EQ(m.total_chart()->dim(), 8);
  EXPECT_EQ(m.total_chart()->coord_names(), (std::vector<std::string>{"x1", "x2", "y1", "y2", "p1", "p2", "q1", "q2"}));
  ASSERT_EQ(m.lattice_basis().size(), 4u);
  for (const auto& cyc : m.lattice_basis()) {
    EXPECT_GE(cyc.angle_axis, 4);
    EXPECT_DOUBLE_EQ(cyc.period, 2.0 * std::numbers::pi);
  }
  auto conn = m.connection();
  EXPECT_EQ(conn.torsion(Vector::Zero(4)), 0.0);
  EXPECT_THROW(FibrationModel::standard(0), ArgumentError);
}

TEST(StructureTriple, SingleBlockValues) {
  auto m = FibrationModel::standard(1);
  auto t = build_structure_triple(m);
  Point pt(m.total_chart(), Vector{{0.1, 0.2, 1.0, 2.0}});
  const int X = 0, Y = 1, P = 2, Q = 3;
  EXPECT_EQ(evaluate_form(t.omega, pt, {e(m, P), e(m, X)}), 1.0);
  EXPECT_EQ(evaluate_form(t.omega, pt, {e(m, Q), e(m, Y)}), 1.0);
  EXPECT_EQ(evaluate_form(t.chi, pt, {e(m, P), e(m, Q)}), -1.0);
  EXPECT_EQ(evaluate_form(t.chi, pt, {e(m, X), e(m, Y)}), 1.0);
  EXPECT_EQ(evaluate_form(t.sigma, pt, {e(m, Q), e(m, X)}), 1.0);
  EXPECT_EQ(evaluate_form(t.sigma, pt, {e(m, Y), e(m, P)}), 1.0);
  EXPECT_EQ(form_matrix(t.omega, pt), expected_matrix(1, "omega"));
}

TEST(StructureTriple, BlockSumsMatchDirectOracle) {
  for (int n : {2, 3}) {
    auto m = FibrationModel::standard(n);
    auto t = build_structure_triple(m);
    for (const auto& pt : sample_points(m.total_chart(), 5, 42)) {
      EXPECT_EQ(form_matrix(t.omega, pt), expected_matrix(n, "omega"));
      EXPECT_EQ(form_matrix(t.chi, pt), expected_matrix(n, "chi"));
      EXPECT_EQ(form_matrix(t.sigma, pt), expected_matrix(n, "sigma"));
    }
  }
  auto m = FibrationModel::standard(2);
  auto t = build_structure_triple(m);
  Point pt(m.total_chart(), Vector::Zero(8));
  EXPECT_EQ(evaluate_form(t.omega, pt, {e(m, m.p(1)), e(m, m.x(1))}), 1.0);
  EXPECT_EQ(evaluate_form(t.omega, pt, {e(m, m.p(0)), e(m, m.x(1))}), 0.0);
}

TEST(StructureTriple, CoefficientsAreConstant) {
  auto m = FibrationModel::standard(2);
  auto t = build_structure_triple(m);
  auto j = build_complex_triple(m);
  auto pts = sample_points(m.total_chart(), 2, 7);
  for (const auto* f : {&t.omega, &t.chi, &t.sigma}) EXPECT_EQ(f->coefficients(pts[0].coords), f->coefficients(pts[1].coords));
  for (const auto* J : {&j.J_omega, &j.J_chi, &j.J_sigma}) EXPECT_EQ(J->matrix(pts[0]), J->matrix(pts[1]));
}

TEST(ComplexTriple, CovectorTables) {
  auto m = FibrationModel::standard(1);
  auto j = build_complex_triple(m);
  Point pt(m.total_chart(), Vector::Zero(4));
  const int X = 0, Y = 1, P = 2, Q = 3;
  auto cov = [&](const EndomorphismField& J, int axis) { return J.apply_covector(pt, e(m, axis)); };
  EXPECT_EQ(cov(j.J_omega, P), e(m, X));
  EXPECT_EQ(cov(j.J_omega, X), Vector(-e(m, P)));
  EXPECT_EQ(cov(j.J_omega, Q), e(m, Y));
  EXPECT_EQ(cov(j.J_omega, Y), Vector(-e(m, Q)));
  // K = J_sigma: dx -> dq, dy -> -dp, dq -> -dx, dp -> dy
  EXPECT_EQ(cov(j.J_sigma, X), e(m, Q));
  EXPECT_EQ(cov(j.J_sigma, Y), Vector(-e(m, P)));
  EXPECT_EQ(cov(j.J_sigma, Q), Vector(-e(m, X)));
  EXPECT_EQ(cov(j.J_sigma, P), e(m, Y));
  EXPECT_EQ(almost_complex_residual(j.J_sigma.matrix(pt)), 0.0);
}

// Products computed once by brute force from the printed tables (covector action):
// J_omega J_chi = J_sigma, J_chi J_sigma = J_omega, J_sigma J_omega = J_chi, all with sign +1.
TEST(ComplexTriple, QuaternionRelations) {
  for (int n : {1, 3}) {
    auto m = FibrationModel::standard(n);
    auto j = build_complex_triple(m);
    Point pt(m.total_chart(), Vector::Zero(4 * n));
    EXPECT_EQ(endo_compose(j.J_omega, j.J_chi, pt, Action::covector), j.J_sigma.matrix(pt));
    EXPECT_EQ(endo_compose(j.J_chi, j.J_sigma, pt, Action::covector), j.J_omega.matrix(pt));
    EXPECT_EQ(endo_compose(j.J_sigma, j.J_omega, pt, Action::covector), j.J_chi.matrix(pt));
    const std::pair<const EndomorphismField*, const EndomorphismField*> pairs[] = {
        {&j.J_omega, &j.J_chi}, {&j.J_chi, &j.J_sigma}, {&j.J_sigma, &j.J_omega}};
    for (auto [a, b] : pairs)
      EXPECT_EQ(Matrix(a->matrix(pt) * b->matrix(pt)), Matrix(-b->matrix(pt) * a->matrix(pt)));
  }
}

TEST(RecursionOperator, Examples) {
  auto m = FibrationModel::standard(1);
  auto t = build_structure_triple(m);
  Point pt(m.total_chart(), Vector{{0.3, -0.1, 2.0, 4.0}});
  EXPECT_EQ(recursion_operator(t.omega, t.omega, pt), Matrix::Identity(4, 4));

  // Solved by hand from chi(X, Y) = omega(A X, Y) on the frame.
  Matrix fixture(4, 4);
  fixture << 0, 0, 0, -1,
             0, 0, 1, 0,
             0, -1, 0, 0,
             1, 0, 0, 0;
  const Matrix a = recursion_operator(t.omega, t.chi, pt);
  EXPECT_EQ(a, fixture);
  EXPECT_EQ(Matrix(a * a), Matrix(-Matrix::Identity(4, 4)));
  EXPECT_EQ(recursion_operator(t.omega, -t.chi, pt), Matrix(-fixture));

  // defining relation checked directly on random vectors
  std::mt19937_64 rng(1);
  for (int k = 0; k < 20; ++k) {
    const Vector u = oracle::random_vector(rng, 4), v = oracle::random_vector(rng, 4);
    EXPECT_NEAR(evaluate_form(t.chi, pt, {u, v}), evaluate_form(t.omega, pt, {Vector(a * u), v}), 1e-14);
  }
  EXPECT_THROW(recursion_operator(DifferentialForm::zero(m.total_chart(), 2), t.chi, pt), DegenerateForm);
}

TEST(VerifyHypersymplectic, StandardModelPasses) {
  for (int n : {1, 3}) {
    auto reports = verify_hypersymplectic(FibrationModel::standard(n), quick(n == 1 ? 100 : 10));
    EXPECT_EQ(reports.size(), 18u);
    for (const auto& r : reports) EXPECT_TRUE(r.passed) << n << " " << r.identity << " " << r.max_residual << " " << r.detail;
    EXPECT_TRUE(std::is_sorted(reports.begin(), reports.end(),
                               [](const auto& a, const auto& b) { return a.identity < b.identity; }));
  }
}

TEST(VerifyHypersymplectic, DegenerateChiFailsWithoutAborting) {
  auto m = FibrationModel::standard(1);
  auto t = build_structure_triple(m);
  auto c = m.total_chart();
  t.chi = wedge(DifferentialForm::differential(c, 0), DifferentialForm::differential(c, 1));
  auto reports = verify_hypersymplectic(m, t, build_complex_triple(m), quick());
  EXPECT_EQ(reports.size(), 18u);
  EXPECT_FALSE(find(reports, "symplectic(chi)").passed);
  EXPECT_FALSE(find(reports, "recursion_square(chi,sigma)").passed);
  EXPECT_FALSE(find(reports, "recursion_square(omega,chi)").passed);
  EXPECT_TRUE(find(reports, "symplectic(omega)").passed);
  EXPECT_TRUE(find(reports, "almost_complex(J_sigma)").passed);
}

TEST(HolomorphicFrame, PrintedCoordinates) {
  auto m = FibrationModel::standard(1);
  auto j = build_complex_triple(m);
  auto c = m.total_chart();
  auto d = [&](int a) { return DifferentialForm::differential(c, a); };
  const int X = 0, Y = 1, P = 2, Q = 3;
  Point pt(c, Vector::Zero(4));

  auto zw = holomorphic_frame_check(j.J_omega, {{d(X), d(P)}, {d(Y), d(Q)}}, pt);
  EXPECT_EQ(zw.residual, 0.0);
  auto uv = holomorphic_frame_check(j.J_chi, {{d(Q), d(P)}, {d(X), d(Y)}}, pt);
  EXPECT_EQ(uv.residual, 0.0);
  auto ab = holomorphic_frame_check(j.J_sigma, {{d(X), d(Q)}, {d(P), d(Y)}}, pt);
  EXPECT_EQ(ab.residual, 0.0);
  EXPECT_EQ(ab.signs, (std::vector<int>{-1, -1}));
  EXPECT_EQ(zw.signs, (std::vector<int>{1, 1}));

  EXPECT_GT(holomorphic_frame_check(j.J_omega, {{d(X), d(Y)}}, pt).residual, 1.0);
  EXPECT_THROW(holomorphic_frame_check(j.J_omega, {}, pt), ArgumentError);
}

TEST(LagrangianFibres, OmegaAndSigma) {
  for (int n : {1, 2}) {
    auto m = FibrationModel::standard(n);
    auto t = build_structure_triple(m);
    auto pts = sample_points(m.total_chart(), 20, 42);
    auto rw = verify_lagrangian_fibres(m, t.omega, pts);
    EXPECT_TRUE(rw.passed);
    EXPECT_EQ(rw.max_residual, 0.0);
    EXPECT_TRUE(verify_lagrangian_fibres(m, t.sigma, pts, 1e-12, "sigma").passed);
    EXPECT_FALSE(verify_lagrangian_fibres(m, t.chi, pts, 1e-12, "chi").passed);
  }
}

TEST(SectionPullback, Examples) {
  auto m = FibrationModel::standard(1);
  auto t = build_structure_triple(m);
  Point b(m.base_chart(), Vector{{0.3, -0.6}});

  EXPECT_EQ(section_pullback(SectionMap::zero(1), t.omega, b).max_abs(), 0.0);
  // p = y, q = -x: sigma pulls back to (q_y + p_x) dy ^ dx = 0
  SectionMap rot({lin(1)}, {lin(0, -1.0)});
  EXPECT_EQ(section_pullback(rot, t.sigma, b).max_abs(), 0.0);
  // p = x, q = y: sigma pulls back to (q_y + p_x) dy ^ dx = -2 dx ^ dy
  SectionMap grad({lin(0)}, {lin(1)});
  EXPECT_DOUBLE_EQ(section_pullback(grad, t.sigma, b).at({0, 1}), -2.0);
  // omega pulls back to (q_x - p_y) dx ^ dy
  EXPECT_DOUBLE_EQ(section_pullback(rot, t.omega, b).at({0, 1}), -2.0);
  EXPECT_DOUBLE_EQ(section_pullback(grad, t.omega, b).at({0, 1}), 0.0);
  EXPECT_THROW(section_pullback(rot, DifferentialForm::differential(m.total_chart(), 0), b), ArgumentError);
}

TEST(ComplexSubmanifold, Examples) {
  auto m = FibrationModel::standard(1);
  auto j = build_complex_triple(m);
  Point b(m.base_chart(), Vector{{0.3, -0.6}});
  EXPECT_LE(complex_submanifold_check(SectionMap::zero(1), j.J_chi, b), 1e-12);
  SectionMap rot({lin(1)}, {lin(0, -1.0)});
  EXPECT_LE(complex_submanifold_check(rot, j.J_omega, b), 1e-12);
  // tangent d_x + d_p; J_chi of it is d_y - d_q, at distance 1 from span{d_x + d_p, d_y}
  SectionMap px({lin(0)}, {zero()});
  EXPECT_NEAR(complex_submanifold_check(px, j.J_chi, b), 1.0, 1e-12);
}

TEST(ComplexSubmanifold, RankDeficientFrameIsAGeometryError) {
  Matrix frame = Matrix::Zero(4, 2);
  frame(0, 0) = 1.0;
  frame(0, 1) = 1.0;
  EXPECT_THROW(detail::tangent_frame_qr(frame), GeometryError);
}

// A graph is J_chi-complex exactly when (q + i p) is holomorphic in (x + i y), i.e. when it is
// Lagrangian for both omega and sigma. Lagrangian for omega alone is not enough.
TEST(ComplexSubmanifold, OmegaAndSigmaLagrangianImpliesJChiComplex) {
  auto m = FibrationModel::standard(1);
  auto t = build_structure_triple(m);
  auto j = build_complex_triple(m);
  // u = q + i p = v^2 = (x + i y)^2: q = x^2 - y^2, p = 2xy
  SectionMap square({Polynomial(2, {{{1, 1}, 2.0}})}, {Polynomial(2, {{{2, 0}, 1.0}, {{0, 2}, -1.0}})});
  // p = x, q = 0: the gradient of x^2 / 2, omega-Lagrangian only
  SectionMap px({lin(0)}, {zero()});
  for (const auto& b : sample_points(m.base_chart(), 20, 42)) {
    EXPECT_LE(section_pullback(square, t.omega, b).max_abs(), 1e-12);
    EXPECT_LE(section_pullback(square, t.sigma, b).max_abs(), 1e-12);
    EXPECT_LE(complex_submanifold_check(square, j.J_chi, b), 1e-12);

    EXPECT_LE(section_pullback(px, t.omega, b).max_abs(), 1e-12);
    EXPECT_GT(section_pullback(px, t.sigma, b).max_abs(), 0.5);
    EXPECT_GT(complex_submanifold_check(px, j.J_chi, b), 0.5);
  }
}

TEST(SectionMap, ExactJacobianAgreesWithFiniteDifferences) {
  auto m = FibrationModel::standard(2);
  std::vector<Polynomial> p{Polynomial(4, {{{1, 0, 2, 0}, 0.5}, {{0, 3, 0, 0}, -1.0}}), Polynomial::linear(4, 2)},
      q{Polynomial(4, {{{0, 0, 1, 1}, 2.0}}), Polynomial::constant(4, 3.0)};
  SectionMap s(p, q);
  EXPECT_EQ(s.degree(), 3);
  for (const auto& b : sample_points(m.base_chart(), 10, 42))
    EXPECT_LE((s.jacobian(b.coords) - s.fd_jacobian(*m.base_chart(), b.coords, 1e-5)).cwiseAbs().maxCoeff(), 1e-8);
  EXPECT_THROW(SectionMap({Polynomial(4)}, {}), ArgumentError);
  EXPECT_THROW(SectionMap({Polynomial(3)}, {Polynomial(3)}), ArgumentError);
}
