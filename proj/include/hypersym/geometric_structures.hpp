#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include "hypersym/chart_calculus.hpp"

namespace hypersym {

/// Outcome of one verified identity. `passed` holds exactly when max_residual <= tolerance.
struct CheckReport {
  std::string identity;
  int n_points = 0;
  double max_residual = 0.0;
  double tolerance = 0.0;
  bool passed = false;
  std::string anchor;  // the claim this identity certifies
  std::string detail;
};

inline CheckReport make_report(std::string identity, std::string anchor, int n_points, double residual, double tol,
                               std::string detail = {}) {
  CheckReport r;
  r.identity = std::move(identity);
  r.anchor = std::move(anchor);
  r.n_points = n_points;
  r.max_residual = residual;
  r.tolerance = tol;
  r.passed = residual <= tol;  // NaN fails
  r.detail = std::move(detail);
  return r;
}

/// Runs `body` (returning the max residual) and turns any exception into a failing report.
template <typename Body>
CheckReport guarded_check(std::string identity, std::string anchor, int n_points, double tol, Body&& body) {
  try {
    return make_report(std::move(identity), std::move(anchor), n_points, body(), tol);
  } catch (const std::exception& e) {
    return make_report(std::move(identity), std::move(anchor), n_points, std::numeric_limits<double>::infinity(), tol,
                       e.what());
  }
}

inline void sort_reports(std::vector<CheckReport>& reports) {
  std::stable_sort(reports.begin(), reports.end(),
                   [](const CheckReport& a, const CheckReport& b) { return a.identity < b.identity; });
}

inline bool all_passed(const std::vector<CheckReport>& reports) {
  return std::all_of(reports.begin(), reports.end(), [](const CheckReport& r) { return r.passed; });
}

struct Tolerances {
  double algebraic = 1e-12;
  double fd = 1e-6;
  double nested_fd = 1e-4;
  double nondegenerate = 1e-8;
  double pullback = 1e-10;
};

// ---------------------------------------------------------------------------
// Connections

/// gamma[k](i, j) = Christoffel symbol Gamma^k_{ij}.
using Christoffel = std::vector<Matrix>;

class FlatConnection {
 public:
  using Evaluator = std::function<Christoffel(const Vector&)>;

  FlatConnection(ChartRef chart, Evaluator eval) : chart_(std::move(chart)), eval_(std::move(eval)) {}

  /// All symbols vanish: the connection whose parallel frame is the coordinate frame.
  static FlatConnection trivial(const ChartRef& chart) {
    const int d = chart->dim();
    return {chart, [d](const Vector&) { return Christoffel(d, Matrix::Zero(d, d)); }};
  }

  const ChartRef& chart() const noexcept { return chart_; }
  int dim() const noexcept { return chart_->dim(); }
  Christoffel symbols(const Vector& coords) const { return eval_(coords); }

  /// max |Gamma^k_ij - Gamma^k_ji|.
  double torsion(const Vector& coords) const {
    double worst = 0.0;
    for (const auto& g : symbols(coords)) worst = std::max(worst, (g - g.transpose()).cwiseAbs().maxCoeff());
    return worst;
  }

  /// max |R^l_{kij}| with R^l_{kij} = d_i G^l_{jk} - d_j G^l_{ik} + G^l_{im} G^m_{jk} - G^l_{jm} G^m_{ik}.
  double curvature(const Vector& coords, double step) const {
    const int d = dim();
    const Christoffel g = symbols(coords);
    // dg[a][l](i, j) = d_a Gamma^l_ij
    std::vector<Christoffel> dg(d, Christoffel(d, Matrix::Zero(d, d)));
    Vector probe = coords;
    for (int a = 0; a < d; ++a) {
      const double h = chart_->axis_step(a, step);
      probe[a] = coords[a] + h;
      const Christoffel gp = symbols(probe);
      probe[a] = coords[a] - h;
      const Christoffel gm = symbols(probe);
      probe[a] = coords[a];
      for (int l = 0; l < d; ++l) dg[a][l] = (gp[l] - gm[l]) / (2.0 * h);
    }
    double worst = 0.0;
    for (int l = 0; l < d; ++l)
      for (int k = 0; k < d; ++k)
        for (int i = 0; i < d; ++i)
          for (int j = 0; j < d; ++j) {
            double r = dg[i][l](j, k) - dg[j][l](i, k);
            for (int m = 0; m < d; ++m) r += g[l](i, m) * g[m](j, k) - g[l](j, m) * g[m](i, k);
            worst = std::max(worst, std::abs(r));
          }
    return worst;
  }

 private:
  ChartRef chart_;
  Evaluator eval_;
};

/// (nabla_X Z)^k = X^i d_i Z^k + Gamma^k_ij X^i Z^j.
inline Vector covariant_derivative(const FlatConnection& conn, const VectorField& X, const VectorField& Z,
                                   const Point& pt, double step) {
  require_same_chart(conn.chart(), pt.chart, "covariant_derivative");
  const Vector x = X.at(pt.coords), z = Z.at(pt.coords);
  Vector out = fd_jacobian(*pt.chart, [&](const Vector& y) { return Z.at(y); }, pt.coords, step) * x;
  const Christoffel g = conn.symbols(pt.coords);
  for (int k = 0; k < conn.dim(); ++k) out[k] += x.dot(g[k] * z);
  return out;
}

/// Torsion symmetry (exact) and finite-difference flatness over the sample.
inline std::vector<CheckReport> check_connection(const FlatConnection& conn, const std::vector<Point>& points,
                                                 double step, const Tolerances& tol) {
  const int n = static_cast<int>(points.size());
  std::vector<CheckReport> out;
  out.push_back(guarded_check("connection.torsion_free", "flat connection is torsion-free", n, tol.algebraic, [&] {
    double worst = 0.0;
    for (const auto& p : points) worst = std::max(worst, conn.torsion(p.coords));
    return worst;
  }));
  out.push_back(guarded_check("connection.flat", "flat connection has zero curvature", n, tol.fd, [&] {
    double worst = 0.0;
    for (const auto& p : points) worst = std::max(worst, conn.curvature(p.coords, step));
    return worst;
  }));
  return out;
}

// ---------------------------------------------------------------------------
// Symplectic and complex structures

/// Closed (FD residual of d form <= tol_closed) and nondegenerate (|det| >= tol_nondeg).
/// A degenerate point is reported as an infinite residual.
inline CheckReport check_symplectic(const DifferentialForm& form, const std::vector<Point>& points, double fd_step,
                                    double tol_closed, double tol_nondeg, const std::string& label = "form") {
  if (form.dim() % 2 != 0) throw ArgumentError("check_symplectic: chart dimension must be even");
  const std::string name = "symplectic(" + label + ")";
  const std::string anchor = label + " is closed and nondegenerate";
  if (form.degree() != 2)
    return make_report(name, anchor, 0, std::numeric_limits<double>::infinity(), tol_closed, "degree is not 2");
  try {
    double closed = 0.0;
    double min_det = std::numeric_limits<double>::infinity();
    for (const auto& p : points) {
      if (form.degree() < form.dim()) closed = std::max(closed, exterior_derivative(form, p, fd_step).max_abs());
      min_det = std::min(min_det, std::abs(form_matrix(form, p).determinant()));
    }
    std::ostringstream detail;
    detail << "min |det| = " << min_det;
    if (min_det < tol_nondeg) {
      detail << " below " << tol_nondeg << " (degenerate)";
      return make_report(name, anchor, static_cast<int>(points.size()), std::numeric_limits<double>::infinity(),
                         tol_closed, detail.str());
    }
    return make_report(name, anchor, static_cast<int>(points.size()), closed, tol_closed, detail.str());
  } catch (const std::exception& e) {
    return make_report(name, anchor, static_cast<int>(points.size()), std::numeric_limits<double>::infinity(),
                       tol_closed, e.what());
  }
}

/// N_J(X, Y) = [JX, JY] - J[JX, Y] - J[X, JY] + J^2 [X, Y].
inline Vector nijenhuis(const EndomorphismField& J, const VectorField& X, const VectorField& Y, const Point& pt,
                        double step) {
  require_same_chart(J.chart(), X.chart(), "nijenhuis");
  require_same_chart(J.chart(), Y.chart(), "nijenhuis");
  const VectorField JX = J(X), JY = J(Y);
  const Matrix m = J.matrix(pt);
  return lie_bracket(JX, JY, pt, step) - m * lie_bracket(JX, Y, pt, step) - m * lie_bracket(X, JY, pt, step) +
         m * m * lie_bracket(X, Y, pt, step);
}

inline double almost_complex_residual(const Matrix& m) {
  return (m * m + Matrix::Identity(m.rows(), m.cols())).cwiseAbs().maxCoeff();
}

/// max ||J^2 + Id||_inf over the sample (purely algebraic).
inline CheckReport check_almost_complex(const EndomorphismField& J, const std::vector<Point>& points,
                                        double tol = 1e-12, const std::string& label = "J") {
  return guarded_check("almost_complex(" + label + ")", label + " squares to -Id", static_cast<int>(points.size()),
                       tol, [&] {
                         if (J.dim() % 2 != 0) throw ArgumentError("almost complex structure needs even dimension");
                         double worst = 0.0;
                         for (const auto& p : points) worst = std::max(worst, almost_complex_residual(J.matrix(p)));
                         return worst;
                       });
}

/// Nijenhuis residual over all coordinate frame pairs plus one random constant pair per point.
inline CheckReport check_integrable(const EndomorphismField& J, const std::vector<Point>& points, double step,
                                    double tol, std::uint64_t seed = 42, const std::string& label = "J") {
  return guarded_check("nijenhuis(" + label + ")", label + " is integrable", static_cast<int>(points.size()), tol, [&] {
    const auto& chart = J.chart();
    const int d = chart->dim();
    std::vector<VectorField> frame;
    for (int i = 0; i < d; ++i) frame.push_back(coordinate_field(chart, i));
    std::mt19937_64 rng(seed);
    double worst = 0.0;
    for (const auto& p : points) {
      for (int i = 0; i < d; ++i)
        for (int j = i + 1; j < d; ++j)
          worst = std::max(worst, nijenhuis(J, frame[i], frame[j], p, step).cwiseAbs().maxCoeff());
      Vector a(d), b(d);
      for (int i = 0; i < d; ++i) a[i] = 2.0 * unit_uniform(rng) - 1.0;
      for (int i = 0; i < d; ++i) b[i] = 2.0 * unit_uniform(rng) - 1.0;
      worst = std::max(worst, nijenhuis(J, constant_vector_field(chart, a), constant_vector_field(chart, b), p, step)
                                  .cwiseAbs()
                                  .maxCoeff());
    }
    return worst;
  });
}

/// res[i](j, k) = (nabla_i T)_{jk} = d_i T_jk - Gamma^l_ij T_lk - Gamma^l_ik T_jl.
inline std::vector<Matrix> covariant_constancy(const FlatConnection& conn, const DifferentialForm& T, const Point& pt,
                                               double step) {
  require_same_chart(conn.chart(), T.chart(), "covariant_constancy");
  require_same_chart(conn.chart(), pt.chart, "covariant_constancy");
  const int d = conn.dim();
  const Matrix t = form_matrix(T, pt.coords);
  const Christoffel g = conn.symbols(pt.coords);
  std::vector<Matrix> res(d);
  Vector probe = pt.coords;
  for (int i = 0; i < d; ++i) {
    const double h = pt.chart->axis_step(i, step);
    probe[i] = pt.coords[i] + h;
    const Matrix tp = form_matrix(T, probe);
    probe[i] = pt.coords[i] - h;
    const Matrix tm = form_matrix(T, probe);
    probe[i] = pt.coords[i];
    res[i] = (tp - tm) / (2.0 * h);
    for (int j = 0; j < d; ++j)
      for (int k = 0; k < d; ++k)
        for (int l = 0; l < d; ++l) res[i](j, k) -= g[l](i, j) * t(l, k) + g[l](i, k) * t(j, l);
  }
  return res;
}

inline double max_abs(const std::vector<Matrix>& table) {
  double worst = 0.0;
  for (const auto& m : table) worst = std::max(worst, m.cwiseAbs().maxCoeff());
  return worst;
}

/// d_nabla I (X, Y) = (nabla_X I) Y - (nabla_Y I) X, with (nabla_X I) Y = nabla_X (I Y) - I (nabla_X Y).
inline Vector d_nabla_endo(const FlatConnection& conn, const EndomorphismField& I, const VectorField& X,
                           const VectorField& Y, const Point& pt, double step) {
  require_same_chart(conn.chart(), I.chart(), "d_nabla_endo");
  const Matrix m = I.matrix(pt);
  const Vector xy = covariant_derivative(conn, X, I(Y), pt, step) - m * covariant_derivative(conn, X, Y, pt, step);
  const Vector yx = covariant_derivative(conn, Y, I(X), pt, step) - m * covariant_derivative(conn, Y, X, pt, step);
  return xy - yx;
}

}  // namespace hypersym
