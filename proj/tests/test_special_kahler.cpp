#include <gtest/gtest.h>

#include "hypersym/special_kahler.hpp"

using namespace hypersym;

namespace {

Polynomial lin(int var, double c = 1.0) { return Polynomial::linear(2, var, c); }

const CheckReport& find(const std::vector<CheckReport>& rs, const std::string& id) {
  for (const auto& r : rs)
    if (r.identity == id) return r;
  throw std::runtime_error("missing report " + id);
}

const SectionMap rotation({lin(1)}, {lin(0, -1.0)});       // p = y, q = -x
const SectionMap anti_rotation({lin(1, -1.0)}, {lin(0)});  // p = -y, q = x

EndomorphismField constant_endo(ChartRef c, Matrix m) { return EndomorphismField::constant(std::move(c), std::move(m)); }

}  // namespace

TEST(InducedComplexStructure, Examples) {
  auto m = FibrationModel::standard(1);
  Point b(m.base_chart(), Vector{{0.2, 0.7}});
  EXPECT_EQ(induced_complex_structure(SectionMap::zero(1), b), Matrix::Zero(2, 2));
  Matrix i(2, 2);
  i << 0, -1,
       1, 0;
  EXPECT_EQ(induced_complex_structure(rotation, b), i);
  EXPECT_EQ(induced_complex_structure(anti_rotation, b), Matrix(-i));
  EXPECT_THROW(induced_complex_structure(rotation, Point(m.total_chart(), Vector::Zero(4))), ArgumentError);
}

TEST(SpecialSymplectic, RotationSectionPasses) {
  for (int n : {1, 2}) {
    auto m = FibrationModel::standard(n);
    std::vector<Polynomial> p, q;
    for (int i = 0; i < n; ++i) {
      p.push_back(Polynomial::linear(2 * n, n + i));
      q.push_back(Polynomial::linear(2 * n, i, -1.0));
    }
    auto data = make_special_kahler_data(m, SectionMap(p, q));
    auto pts = sample_points(m.base_chart(), 20, 42);
    auto reports = special_symplectic_check(data, pts, 1e-5, Tolerances{});
    EXPECT_EQ(reports.size(), 5u);
    for (const auto& r : reports) EXPECT_TRUE(r.passed) << r.identity << " " << r.max_residual;
  }
}

// d_nabla of a Jacobian-derived I vanishes by symmetry of second derivatives; the failure of
// this section is in I^2 = -Id.
TEST(SpecialSymplectic, NonlinearSectionFailsOnlyTheSquare) {
  auto m = FibrationModel::standard(1);
  SectionMap s({Polynomial(2, {{{0, 1}, 1.0}, {{2, 0}, 1.0}})}, {lin(0, -1.0)});
  auto data = make_special_kahler_data(m, s);
  auto pts = sample_points(m.base_chart(), 20, 42);
  auto reports = special_symplectic_check(data, pts, 1e-5, Tolerances{});
  EXPECT_TRUE(find(reports, "d_nabla(I)").passed);
  EXPECT_TRUE(find(reports, "covariant_constancy(Omega)").passed);
  EXPECT_FALSE(find(reports, "almost_complex(I)").passed);
}

TEST(SpecialSymplectic, ZeroStructureFailsSquare) {
  auto m = FibrationModel::standard(1);
  SpecialKahlerData data{m.base_chart(), m.base_symplectic_form(), constant_endo(m.base_chart(), Matrix::Zero(2, 2)),
                         m.connection()};
  auto reports = special_symplectic_check(data, sample_points(m.base_chart(), 5, 42), 1e-5, Tolerances{});
  const auto& sq = find(reports, "almost_complex(I)");
  EXPECT_FALSE(sq.passed);
  EXPECT_DOUBLE_EQ(sq.max_residual, 1.0);
}

TEST(SpecialSymplectic, NonConstantIFailsDNabla) {
  auto m = FibrationModel::standard(1);
  // I = R(x) J0 R(x)^T is almost complex everywhere but not parallel
  EndomorphismField I(m.base_chart(), [](const Vector& v) {
    const double a = v[0];
    Matrix r(2, 2);
    r << std::cos(a), -std::sin(a), std::sin(a), std::cos(a);
    Matrix j0(2, 2);
    j0 << 0, -1, 1, 0;
    Matrix s = Matrix::Identity(2, 2);
    s(0, 0) = 1.0 + 0.5 * std::sin(a);
    return Matrix(s * j0 * s.inverse());
  });
  SpecialKahlerData data{m.base_chart(), m.base_symplectic_form(), I, m.connection()};
  auto reports = special_symplectic_check(data, sample_points(m.base_chart(), 5, 42), 1e-5, Tolerances{});
  EXPECT_TRUE(find(reports, "almost_complex(I)").passed);
  EXPECT_FALSE(find(reports, "d_nabla(I)").passed);
}

TEST(KahlerMetric, DefiniteAndNegative) {
  auto m = FibrationModel::standard(1);
  Point b(m.base_chart(), Vector{{0.1, 0.1}});
  auto pos = make_special_kahler_data(m, rotation);
  auto km = kahler_metric(pos.omega, pos.complex_structure, b);
  EXPECT_EQ(km.g, Matrix::Identity(2, 2));
  EXPECT_EQ(km.invariance_residual, 0.0);
  EXPECT_EQ(signature(km.g), (Signature{2, 0}));

  auto neg = make_special_kahler_data(m, anti_rotation);
  const Matrix g = kahler_metric(neg.omega, neg.complex_structure, b).g;
  EXPECT_EQ(g, Matrix(-Matrix::Identity(2, 2)));
  EXPECT_EQ(signature(g), (Signature{0, 2}));

  EXPECT_THROW(kahler_metric(pos.omega, constant_endo(m.base_chart(), Matrix::Zero(2, 2)), b), PreconditionError);
}

TEST(KahlerMetric, Signature) {
  Matrix d = Matrix::Zero(2, 2);
  d.diagonal() << 1.0, -3.0;
  EXPECT_EQ(signature(d), (Signature{1, 1}));
  d(1, 1) = 1e-12;
  EXPECT_THROW(signature(d), DegenerateMetric);
  EXPECT_THROW(signature(Matrix::Zero(2, 3)), ArgumentError);
}

TEST(SpecialKahler, ReportsAndSignatureDetail) {
  auto m = FibrationModel::standard(1);
  auto pts = sample_points(m.base_chart(), 10, 42);

  auto good = special_kahler_check(make_special_kahler_data(m, rotation), pts, Tolerances{});
  ASSERT_EQ(good.size(), 3u);
  for (const auto& r : good) EXPECT_TRUE(r.passed) << r.identity;
  EXPECT_EQ(find(good, "kahler.signature_constant").detail, "signature (2, 0)");

  auto pseudo = special_kahler_check(make_special_kahler_data(m, anti_rotation), pts, Tolerances{});
  for (const auto& r : pseudo) EXPECT_TRUE(r.passed) << r.identity;
  EXPECT_NE(find(pseudo, "kahler.signature_constant").detail.find("pseudo-Kahler"), std::string::npos);

  auto bad = special_kahler_check(make_special_kahler_data(m, SectionMap::zero(1)), pts, Tolerances{});
  for (const auto& r : bad) EXPECT_FALSE(r.passed) << r.identity;
}

TEST(Bridge, InducedStructureMatchesRestrictedJOmega) {
  auto m = FibrationModel::standard(1);
  auto j = build_complex_triple(m);
  for (const auto& b : sample_points(m.base_chart(), 10, 42)) {
    EXPECT_LE(complex_structure_bridge_residual(rotation, j.J_omega, b, 1e-5), 1e-6);
    EXPECT_LE(complex_structure_bridge_residual(anti_rotation, j.J_omega, b, 1e-5), 1e-6);
  }
}
