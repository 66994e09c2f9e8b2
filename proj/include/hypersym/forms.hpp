#pragma once

#include <cmath>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "hypersym/chart.hpp"

namespace hypersym {

using MultiIndex = std::vector<int>;

inline long binomial(int n, int k) {
  if (k < 0 || k > n) return 0;
  long r = 1;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

/// All strictly increasing multi-indices of length k over {0..dim-1}, lexicographic.
inline std::vector<MultiIndex> increasing_multi_indices(int dim, int k) {
  std::vector<MultiIndex> out;
  if (k < 0 || k > dim) return out;
  MultiIndex idx(static_cast<std::size_t>(k));
  for (int i = 0; i < k; ++i) idx[i] = i;
  while (true) {
    out.push_back(idx);
    int t = k - 1;
    while (t >= 0 && idx[t] == dim - k + t) --t;
    if (t < 0) break;
    ++idx[t];
    for (int s = t + 1; s < k; ++s) idx[s] = idx[s - 1] + 1;
  }
  return out;
}

/// Lexicographic position of a strictly increasing multi-index.
inline long multi_index_rank(const MultiIndex& idx, int dim) {
  const int k = static_cast<int>(idx.size());
  long rank = 0;
  int prev = -1;
  for (int t = 0; t < k; ++t) {
    for (int v = prev + 1; v < idx[t]; ++v) rank += binomial(dim - v - 1, k - t - 1);
    prev = idx[t];
  }
  return rank;
}

/// Sorts in place; returns the permutation sign, or 0 on a repeated index.
inline int sort_with_sign(MultiIndex& idx) {
  int sign = 1;
  for (std::size_t i = 1; i < idx.size(); ++i)
    for (std::size_t j = i; j > 0 && idx[j - 1] > idx[j]; --j) {
      std::swap(idx[j - 1], idx[j]);
      sign = -sign;
    }
  for (std::size_t i = 1; i < idx.size(); ++i)
    if (idx[i] == idx[i - 1]) return 0;
  return sign;
}

/// Coefficients of a k-form at one point, in increasing multi-index order.
struct FormTable {
  int dim = 0;
  int degree = 0;
  Vector coefficients;

  /// Coefficient for an arbitrary-order index, with the alternating sign applied.
  double at(MultiIndex idx) const {
    if (static_cast<int>(idx.size()) != degree) throw ArgumentError("form table: wrong index length");
    const int sign = sort_with_sign(idx);
    if (sign == 0) return 0.0;
    return sign * coefficients[multi_index_rank(idx, dim)];
  }

  double max_abs() const { return coefficients.size() ? coefficients.cwiseAbs().maxCoeff() : 0.0; }
};

class DifferentialForm {
 public:
  using Evaluator = std::function<Vector(const Vector&)>;

  DifferentialForm(ChartRef chart, int degree, Evaluator eval)
      : chart_(std::move(chart)), degree_(degree), eval_(std::move(eval)) {
    if (!chart_) throw ArgumentError("differential form without chart");
    if (degree_ < 0 || degree_ > chart_->dim())
      throw ArgumentError("form degree " + std::to_string(degree_) + " exceeds chart dimension");
  }

  static DifferentialForm zero(ChartRef chart, int degree) {
    const long n = binomial(chart->dim(), degree);
    return {chart, degree, [n](const Vector&) { return Vector::Zero(n); }};
  }

  static DifferentialForm constant(ChartRef chart, int degree, Vector coefficients) {
    if (coefficients.size() != binomial(chart->dim(), degree))
      throw ArgumentError("constant form: coefficient count must equal binomial(dim, degree)");
    return {chart, degree, [c = std::move(coefficients)](const Vector&) { return c; }};
  }

  /// Constant form from (index, coefficient) terms; indices may be in any order.
  static DifferentialForm constant(ChartRef chart, int degree, const std::vector<std::pair<MultiIndex, double>>& terms) {
    Vector c = Vector::Zero(binomial(chart->dim(), degree));
    for (auto [idx, value] : terms) {
      if (static_cast<int>(idx.size()) != degree) throw ArgumentError("constant form: index length != degree");
      for (int i : idx)
        if (i < 0 || i >= chart->dim()) throw ArgumentError("constant form: index out of range");
      const int sign = sort_with_sign(idx);
      if (sign != 0) c[multi_index_rank(idx, chart->dim())] += sign * value;
    }
    return constant(std::move(chart), degree, std::move(c));
  }

  /// The coordinate differential d(coord axis).
  static DifferentialForm differential(const ChartRef& chart, int axis) {
    if (axis < 0 || axis >= chart->dim()) throw ArgumentError("differential: axis out of range");
    return constant(chart, 1, Vector::Unit(chart->dim(), axis));
  }

  static DifferentialForm scalar(ChartRef chart, std::function<double(const Vector&)> f) {
    return {std::move(chart), 0, [f = std::move(f)](const Vector& x) { return Vector::Constant(1, f(x)); }};
  }

  const ChartRef& chart() const noexcept { return chart_; }
  int degree() const noexcept { return degree_; }
  int dim() const noexcept { return chart_->dim(); }
  long slot_count() const { return binomial(dim(), degree_); }
  std::vector<MultiIndex> indices() const { return increasing_multi_indices(dim(), degree_); }

  Vector coefficients(const Vector& coords) const { return eval_(coords); }

  FormTable table(const Vector& coords) const { return {dim(), degree_, eval_(coords)}; }
  FormTable table(const Point& pt) const {
    require_same_chart(chart_, pt.chart, "form table");
    return table(pt.coords);
  }

  friend DifferentialForm operator+(const DifferentialForm& a, const DifferentialForm& b) {
    require_same_chart(a.chart_, b.chart_, "form sum");
    if (a.degree_ != b.degree_) throw ArgumentError("form sum: degree mismatch");
    return {a.chart_, a.degree_, [ea = a.eval_, eb = b.eval_](const Vector& x) -> Vector { return ea(x) + eb(x); }};
  }
  friend DifferentialForm operator-(const DifferentialForm& a) {
    return {a.chart_, a.degree_, [ea = a.eval_](const Vector& x) -> Vector { return -ea(x); }};
  }
  friend DifferentialForm operator-(const DifferentialForm& a, const DifferentialForm& b) { return a + (-b); }
  friend DifferentialForm operator*(double s, const DifferentialForm& a) {
    return {a.chart_, a.degree_, [s, ea = a.eval_](const Vector& x) -> Vector { return s * ea(x); }};
  }
  friend DifferentialForm operator*(const ScalarField& f, const DifferentialForm& a) {
    require_same_chart(f.chart(), a.chart_, "function times form");
    return {a.chart_, a.degree_, [f, ea = a.eval_](const Vector& x) -> Vector { return f.at(x) * ea(x); }};
  }

 private:
  ChartRef chart_;
  int degree_;
  Evaluator eval_;
};

namespace detail {

// Pairing of precomputed coefficients with k vectors: sum over I of c_I * det(V[I, :]).
inline double pair_coefficients(const Vector& coeffs, int dim, int degree, const Matrix& vectors) {
  if (degree == 0) return coeffs[0];
  const auto indices = increasing_multi_indices(dim, degree);
  double total = 0.0;
  Matrix minor(degree, degree);
  for (std::size_t s = 0; s < indices.size(); ++s) {
    if (coeffs[static_cast<Eigen::Index>(s)] == 0.0) continue;
    for (int r = 0; r < degree; ++r) minor.row(r) = vectors.row(indices[s][r]);
    total += coeffs[static_cast<Eigen::Index>(s)] * minor.determinant();
  }
  return total;
}

}  // namespace detail

/// Alternating multilinear evaluation of a k-form on k coordinate vectors.
inline double evaluate_form(const DifferentialForm& form, const Point& pt, std::span<const Vector> vectors) {
  require_same_chart(form.chart(), pt.chart, "evaluate_form");
  if (static_cast<int>(vectors.size()) != form.degree())
    throw ArgumentError("evaluate_form: expected " + std::to_string(form.degree()) + " vectors, got " +
                        std::to_string(vectors.size()));
  Matrix columns(form.dim(), form.degree());
  for (int j = 0; j < form.degree(); ++j) {
    if (vectors[j].size() != form.dim()) throw ArgumentError("evaluate_form: vector length != chart dimension");
    columns.col(j) = vectors[j];
  }
  check_domain(pt);
  return detail::pair_coefficients(form.coefficients(pt.coords), form.dim(), form.degree(), columns);
}

inline double evaluate_form(const DifferentialForm& form, const Point& pt, std::initializer_list<Vector> vectors) {
  std::vector<Vector> v(vectors);
  return evaluate_form(form, pt, std::span<const Vector>(v));
}

inline DifferentialForm wedge(const DifferentialForm& a, const DifferentialForm& b) {
  require_same_chart(a.chart(), b.chart(), "wedge");
  const int dim = a.dim();
  const int ka = a.degree(), kb = b.degree();
  if (ka + kb > dim) throw ArgumentError("wedge: total degree exceeds chart dimension");

  struct Term {
    long ia, ib, out;
    int sign;
  };
  std::vector<Term> terms;
  const auto ia = increasing_multi_indices(dim, ka);
  const auto ib = increasing_multi_indices(dim, kb);
  for (std::size_t s = 0; s < ia.size(); ++s)
    for (std::size_t t = 0; t < ib.size(); ++t) {
      MultiIndex merged = ia[s];
      merged.insert(merged.end(), ib[t].begin(), ib[t].end());
      const int sign = sort_with_sign(merged);
      if (sign != 0)
        terms.push_back({static_cast<long>(s), static_cast<long>(t), multi_index_rank(merged, dim), sign});
    }
  const long out_size = binomial(dim, ka + kb);
  return {a.chart(), ka + kb, [a, b, terms = std::move(terms), out_size](const Vector& x) {
            const Vector ca = a.coefficients(x), cb = b.coefficients(x);
            Vector out = Vector::Zero(out_size);
            for (const auto& t : terms) out[t.out] += t.sign * ca[t.ia] * cb[t.ib];
            return out;
          }};
}

namespace detail {

// Central-difference d of a k-form given its coefficient evaluator.
inline Vector exterior_derivative_coefficients(const DifferentialForm& form, const Vector& x, double step) {
  const Chart& chart = *form.chart();
  const int dim = chart.dim(), k = form.degree();
  const Matrix partials = fd_jacobian(chart, [&](const Vector& y) { return form.coefficients(y); }, x, step);
  Vector out = Vector::Zero(binomial(dim, k + 1));
  const auto indices = increasing_multi_indices(dim, k);
  for (std::size_t s = 0; s < indices.size(); ++s) {
    for (int j = 0; j < dim; ++j) {
      MultiIndex merged{j};
      merged.insert(merged.end(), indices[s].begin(), indices[s].end());
      const int sign = sort_with_sign(merged);
      if (sign == 0) continue;
      out[multi_index_rank(merged, dim)] += sign * partials(static_cast<Eigen::Index>(s), j);
    }
  }
  return out;
}

}  // namespace detail

/// Central-difference exterior derivative at one point. `step` is relative to the box width per axis.
inline FormTable exterior_derivative(const DifferentialForm& form, const Point& pt, double step) {
  require_same_chart(form.chart(), pt.chart, "exterior_derivative");
  if (!(step > 0.0)) throw ArgumentError("exterior_derivative: step must be positive");
  if (form.degree() >= form.dim()) throw ArgumentError("exterior_derivative: degree must be below dimension");
  return {form.dim(), form.degree() + 1, detail::exterior_derivative_coefficients(form, pt.coords, step)};
}

/// The finite-difference d as a field, so it can be differentiated again.
inline DifferentialForm exterior_derivative_field(const DifferentialForm& form, double step) {
  if (!(step > 0.0)) throw ArgumentError("exterior_derivative: step must be positive");
  if (form.degree() >= form.dim()) throw ArgumentError("exterior_derivative: degree must be below dimension");
  return {form.chart(), form.degree() + 1,
          [form, step](const Vector& x) { return detail::exterior_derivative_coefficients(form, x, step); }};
}

/// M(i, j) = form(d_i, d_j) for a 2-form.
inline Matrix form_matrix(const DifferentialForm& form, const Vector& coords) {
  if (form.degree() != 2) throw ArgumentError("form_matrix: degree must be 2");
  const int dim = form.dim();
  const Vector c = form.coefficients(coords);
  Matrix m = Matrix::Zero(dim, dim);
  long s = 0;
  for (int i = 0; i < dim; ++i)
    for (int j = i + 1; j < dim; ++j, ++s) {
      m(i, j) = c[s];
      m(j, i) = -c[s];
    }
  return m;
}

inline Matrix form_matrix(const DifferentialForm& form, const Point& pt) {
  require_same_chart(form.chart(), pt.chart, "form_matrix");
  return form_matrix(form, pt.coords);
}

/// Interior product v -> form(v, .) as a covector.
inline Vector flat(const DifferentialForm& form, const Point& pt, const Vector& v) {
  return form_matrix(form, pt).transpose() * v;
}

/// The unique v with form(v, .) = alpha.
inline Vector sharp(const DifferentialForm& form, const Point& pt, const Vector& alpha) {
  const Matrix m = form_matrix(form, pt);
  if (alpha.size() != m.rows()) throw ArgumentError("sharp: covector length != chart dimension");
  Eigen::FullPivLU<Matrix> lu(m.transpose());
  if (!lu.isInvertible()) throw DegenerateForm("sharp: 2-form is degenerate at this point");
  return lu.solve(alpha);
}

}  // namespace hypersym
