#pragma once

#include <tuple>
#include <utility>

#include "hypersym/chart.hpp"

namespace hypersym {

/// Which side an endomorphism acts on. Vector action is v -> M v; the covector
/// action is the transpose, (J alpha)(X) = alpha(J X).
enum class Action { vector, covector };

/// A (1,1)-tensor field. Columns of the matrix are images of the frame vectors.
class EndomorphismField {
 public:
  using Evaluator = std::function<Matrix(const Vector&)>;

  EndomorphismField(ChartRef chart, Evaluator eval) : chart_(std::move(chart)), eval_(std::move(eval)) {
    if (!chart_) throw ArgumentError("endomorphism field without chart");
  }

  static EndomorphismField constant(ChartRef chart, Matrix m) {
    if (m.rows() != chart->dim() || m.cols() != chart->dim())
      throw ArgumentError("constant endomorphism: matrix must be dim x dim");
    return {std::move(chart), [m = std::move(m)](const Vector&) { return m; }};
  }

  static EndomorphismField identity(const ChartRef& chart) {
    return constant(chart, Matrix::Identity(chart->dim(), chart->dim()));
  }

  /// Builds from covector -> vector terms: each (a, b, c) contributes c * dx^a (x) d_b.
  static EndomorphismField from_terms(const ChartRef& chart, std::initializer_list<std::tuple<int, int, double>> terms) {
    Matrix m = Matrix::Zero(chart->dim(), chart->dim());
    for (auto [a, b, c] : terms) m(b, a) += c;
    return constant(chart, std::move(m));
  }

  const ChartRef& chart() const noexcept { return chart_; }
  int dim() const noexcept { return chart_->dim(); }

  Matrix matrix(const Vector& coords) const { return eval_(coords); }
  Matrix matrix(const Point& pt) const {
    require_same_chart(chart_, pt.chart, "endomorphism evaluation");
    return eval_(pt.coords);
  }

  Vector apply(const Point& pt, const Vector& v) const { return matrix(pt) * v; }
  Vector apply_covector(const Point& pt, const Vector& alpha) const { return matrix(pt).transpose() * alpha; }

  /// Matrix of the requested action: M for vectors, M^T for covector components.
  Matrix action_matrix(const Point& pt, Action action) const {
    Matrix m = matrix(pt);
    return action == Action::vector ? m : Matrix(m.transpose());
  }

  /// Pointwise J X as a vector field.
  VectorField operator()(const VectorField& X) const {
    require_same_chart(chart_, X.chart(), "endomorphism on vector field");
    return VectorField(chart_, [e = eval_, X](const Vector& x) -> Vector { return e(x) * X.at(x); });
  }

 private:
  ChartRef chart_;
  Evaluator eval_;
};

/// Vector-action matrix of the composite "A after B" taken in the given action.
/// In the vector action this is A B. In the covector action A after B sends
/// alpha to A^T B^T alpha, whose vector-action matrix is B A.
inline Matrix endo_compose(const EndomorphismField& a, const EndomorphismField& b, const Point& pt,
                           Action action = Action::vector) {
  require_same_chart(a.chart(), b.chart(), "endo_compose");
  const Matrix ma = a.matrix(pt), mb = b.matrix(pt);
  return action == Action::vector ? Matrix(ma * mb) : Matrix(mb * ma);
}

inline EndomorphismField compose(const EndomorphismField& a, const EndomorphismField& b, Action action = Action::vector) {
  require_same_chart(a.chart(), b.chart(), "compose");
  return {a.chart(), [a, b, action](const Vector& x) -> Matrix {
            const Matrix ma = a.matrix(x), mb = b.matrix(x);
            return action == Action::vector ? Matrix(ma * mb) : Matrix(mb * ma);
          }};
}

inline EndomorphismField operator*(double s, const EndomorphismField& a) {
  return {a.chart(), [s, a](const Vector& x) -> Matrix { return s * a.matrix(x); }};
}

/// [X, Y] = DY X - DX Y with central-difference Jacobians.
inline Vector lie_bracket(const VectorField& X, const VectorField& Y, const Point& pt, double step) {
  require_same_chart(X.chart(), Y.chart(), "lie_bracket");
  require_same_chart(X.chart(), pt.chart, "lie_bracket");
  if (!(step > 0.0)) throw ArgumentError("lie_bracket: step must be positive");
  const Chart& chart = *pt.chart;
  const Matrix dx = fd_jacobian(chart, [&](const Vector& y) { return X.at(y); }, pt.coords, step);
  const Matrix dy = fd_jacobian(chart, [&](const Vector& y) { return Y.at(y); }, pt.coords, step);
  return dy * X.at(pt.coords) - dx * Y.at(pt.coords);
}

inline VectorField lie_bracket_field(const VectorField& X, const VectorField& Y, double step) {
  require_same_chart(X.chart(), Y.chart(), "lie_bracket");
  return VectorField(X.chart(), [X, Y, step](const Vector& x) { return lie_bracket(X, Y, Point(X.chart(), x), step); });
}

}  // namespace hypersym
