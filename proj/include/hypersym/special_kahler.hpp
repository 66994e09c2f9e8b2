#pragma once

#include <sstream>
#include <string>
#include <vector>

#include "hypersym/fibration_model.hpp"

namespace hypersym {

/// I = -(sum dp_i (x) d/dx_i + dq_i (x) d/dy_i) on the base, with dp, dq pulled
/// back through the section: the matrix is minus the Jacobian of (p, q) in (x, y).
inline Matrix induced_complex_structure(const SectionMap& section, const Vector& base) {
  return -section.jacobian(base).bottomRows(section.base_dim());
}

inline Matrix induced_complex_structure(const SectionMap& section, const Point& base_pt) {
  if (base_pt.chart->dim() != section.base_dim()) throw ArgumentError("induced_complex_structure: dimension mismatch");
  return induced_complex_structure(section, base_pt.coords);
}

/// Base data: Omega, the induced I, the flat connection and g = Omega(., I .).
struct SpecialKahlerData {
  ChartRef base_chart;
  DifferentialForm omega;
  EndomorphismField complex_structure;
  FlatConnection connection;

  /// g(i, j) = Omega(d_i, I d_j).
  Matrix metric(const Vector& coords) const { return form_matrix(omega, coords) * complex_structure.matrix(coords); }
};

inline SpecialKahlerData make_special_kahler_data(const FibrationModel& model, const SectionMap& section) {
  if (section.n() != model.n()) throw ArgumentError("special Kahler data: section and model have different n");
  EndomorphismField I(model.base_chart(), [section](const Vector& x) { return induced_complex_structure(section, x); });
  return {model.base_chart(), model.base_symplectic_form(), std::move(I), model.connection()};
}

struct KahlerMetric {
  Matrix g;
  double invariance_residual = 0.0;  // max |Omega(I., I.) - Omega(., .)| over the frame
};

inline KahlerMetric kahler_metric(const DifferentialForm& omega, const EndomorphismField& I, const Point& pt,
                                  double almost_complex_tol = 1e-10) {
  require_same_chart(omega.chart(), I.chart(), "kahler_metric");
  const Matrix i = I.matrix(pt);
  const double sq = almost_complex_residual(i);
  if (!(sq <= almost_complex_tol)) {
    std::ostringstream msg;
    msg << "kahler_metric: I is not almost complex (|I^2 + Id| = " << sq << ")";
    throw PreconditionError(msg.str());
  }
  const Matrix w = form_matrix(omega, pt);
  return {w * i, (i.transpose() * w * i - w).cwiseAbs().maxCoeff()};
}

struct Signature {
  int n_plus = 0;
  int n_minus = 0;

  bool operator==(const Signature&) const = default;
};

/// Eigenvalue counts of a symmetric matrix; refuses eigenvalues within `zero_gap` of zero.
inline Signature signature(const Matrix& g, double zero_gap = 1e-10) {
  if (g.rows() != g.cols()) throw ArgumentError("signature: matrix must be square");
  Eigen::SelfAdjointEigenSolver<Matrix> eig(g, Eigen::EigenvaluesOnly);
  Signature s;
  for (Eigen::Index k = 0; k < eig.eigenvalues().size(); ++k) {
    const double l = eig.eigenvalues()[k];
    if (std::abs(l) <= zero_gap) throw DegenerateMetric("signature: eigenvalue within zero gap");
    (l > 0 ? s.n_plus : s.n_minus)++;
  }
  return s;
}

/// nabla Omega = 0, d_nabla I = 0 over coordinate pairs, I^2 = -Id, torsion-free and flat connection.
inline std::vector<CheckReport> special_symplectic_check(const SpecialKahlerData& data, const std::vector<Point>& points,
                                                         double fd_step, const Tolerances& tol) {
  const int n = static_cast<int>(points.size());
  const int d = data.base_chart->dim();
  std::vector<CheckReport> out = check_connection(data.connection, points, fd_step, tol);
  out.push_back(guarded_check("covariant_constancy(Omega)", "Omega is parallel", n, tol.fd, [&] {
    double worst = 0.0;
    for (const auto& p : points) worst = std::max(worst, max_abs(covariant_constancy(data.connection, data.omega, p, fd_step)));
    return worst;
  }));
  out.push_back(guarded_check("d_nabla(I)", "d_nabla I = 0", n, tol.fd, [&] {
    double worst = 0.0;
    for (const auto& p : points)
      for (int i = 0; i < d; ++i)
        for (int j = i + 1; j < d; ++j)
          worst = std::max(worst, d_nabla_endo(data.connection, data.complex_structure,
                                               coordinate_field(data.base_chart, i),
                                               coordinate_field(data.base_chart, j), p, fd_step)
                                      .cwiseAbs()
                                      .maxCoeff());
    return worst;
  }));
  out.push_back(check_almost_complex(data.complex_structure, points, tol.algebraic, "I"));
  sort_reports(out);
  return out;
}

/// The special Kahler upgrade: g symmetric, Omega I-invariant, signature constant.
/// Each report is only meaningful where I is almost complex; otherwise it fails with the I^2 residual.
inline std::vector<CheckReport> special_kahler_check(const SpecialKahlerData& data, const std::vector<Point>& points,
                                                     const Tolerances& tol) {
  const int n = static_cast<int>(points.size());
  std::vector<CheckReport> out;
  out.push_back(guarded_check("kahler.metric_symmetric", "g = Omega(., I .) is symmetric", n, tol.algebraic, [&] {
    double worst = 0.0;
    for (const auto& p : points) {
      const Matrix g = kahler_metric(data.omega, data.complex_structure, p).g;
      worst = std::max(worst, (g - g.transpose()).cwiseAbs().maxCoeff());
    }
    return worst;
  }));
  out.push_back(guarded_check("kahler.omega_invariant", "Omega is I-invariant", n, tol.algebraic, [&] {
    double worst = 0.0;
    for (const auto& p : points)
      worst = std::max(worst, kahler_metric(data.omega, data.complex_structure, p).invariance_residual);
    return worst;
  }));

  CheckReport sig = guarded_check("kahler.signature_constant", "signature of g is constant on the chart", n, 0.0, [&] {
    if (points.empty()) return 0.0;
    const Signature first = signature(kahler_metric(data.omega, data.complex_structure, points.front()).g);
    double mismatches = 0.0;
    for (const auto& p : points)
      if (!(signature(kahler_metric(data.omega, data.complex_structure, p).g) == first)) mismatches += 1.0;
    return mismatches;
  });
  if (sig.passed && !points.empty()) {
    const Signature s = signature(kahler_metric(data.omega, data.complex_structure, points.front()).g);
    sig.detail = "signature (" + std::to_string(s.n_plus) + ", " + std::to_string(s.n_minus) + ")";
    if (s.n_minus > 0) sig.detail += ", indefinite or negative: pseudo-Kahler";
  }
  out.push_back(std::move(sig));
  sort_reports(out);
  return out;
}

/// Max |I - C| between I from the section Jacobian and J_omega restricted to the graph.
inline double complex_structure_bridge_residual(const SectionMap& section, const EndomorphismField& J_omega,
                                                const Point& base_pt, double fd_step) {
  const Matrix direct = induced_complex_structure(section, base_pt);
  const Matrix restricted = restricted_complex_structure(section, J_omega, base_pt, fd_step);
  return (direct - restricted).cwiseAbs().maxCoeff();
}

}  // namespace hypersym
