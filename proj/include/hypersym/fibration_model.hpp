#pragma once

#include <cmath>
#include <numbers>
#include <string>
#include <utility>
#include <vector>

#include "hypersym/geometric_structures.hpp"
#include "hypersym/polynomial.hpp"

namespace hypersym {

/// One basis cycle of the period lattice: the circle of a single angle coordinate.
struct AngleCycle {
  int angle_axis = 0;  // axis in the total chart
  double period = 2.0 * std::numbers::pi;
};

/// Integrable system in action-angle coordinates. The total chart is ordered
/// (x_1..x_n, y_1..y_n, p_1..p_n, q_1..q_n): actions I = (x, y), angles (p, q).
class FibrationModel {
 public:
  /// `action_box` gives the 2n action intervals in (x_1..x_n, y_1..y_n) order.
  FibrationModel(int n, std::vector<Interval> action_box, std::string name = "X")
      : n_(n) {
    if (n < 1) throw ArgumentError("fibration model: n must be positive");
    if (static_cast<int>(action_box.size()) != 2 * n) throw ArgumentError("fibration model: need 2n action intervals");
    std::vector<std::string> base_names, total_names;
    for (const char* c : {"x", "y"})
      for (int i = 1; i <= n; ++i) base_names.push_back(c + std::to_string(i));
    total_names = base_names;
    for (const char* c : {"p", "q"})
      for (int i = 1; i <= n; ++i) total_names.push_back(c + std::to_string(i));
    std::vector<Interval> total_box = action_box;
    for (int i = 0; i < 2 * n; ++i) total_box.push_back({0.0, 2.0 * std::numbers::pi});
    base_ = make_chart(name + ".base", base_names, std::move(action_box));
    total_ = make_chart(name, total_names, std::move(total_box));
    for (int i = 0; i < 2 * n; ++i) lattice_.push_back({2 * n + i, 2.0 * std::numbers::pi});
  }

  /// Model with every action in [-1, 1].
  static FibrationModel standard(int n) { return FibrationModel(n, std::vector<Interval>(2 * n, {-1.0, 1.0})); }

  int n() const noexcept { return n_; }
  const ChartRef& base_chart() const noexcept { return base_; }
  const ChartRef& total_chart() const noexcept { return total_; }
  const std::vector<AngleCycle>& lattice_basis() const noexcept { return lattice_; }

  /// The Gauss-Manin connection: in action coordinates all symbols vanish.
  FlatConnection connection() const { return FlatConnection::trivial(base_); }

  int x(int i) const { return i; }
  int y(int i) const { return n_ + i; }
  int p(int i) const { return 2 * n_ + i; }
  int q(int i) const { return 3 * n_ + i; }

  /// Omega = sum dx_i ^ dy_i on the base.
  DifferentialForm base_symplectic_form() const {
    std::vector<std::pair<MultiIndex, double>> terms;
    for (int i = 0; i < n_; ++i) terms.push_back({{i, n_ + i}, 1.0});
    return DifferentialForm::constant(base_, 2, terms);
  }

 private:
  int n_;
  ChartRef base_;
  ChartRef total_;
  std::vector<AngleCycle> lattice_;
};

struct HyperSymplecticTriple {
  DifferentialForm omega;
  DifferentialForm chi;
  DifferentialForm sigma;
};

struct HyperComplexTriple {
  EndomorphismField J_omega;
  EndomorphismField J_chi;
  EndomorphismField J_sigma;
};

/// omega = sum dp^dx + dq^dy, chi = sum -dp^dq + dx^dy, sigma = sum dq^dx + dy^dp.
inline HyperSymplecticTriple build_structure_triple(const FibrationModel& m) {
  std::vector<std::pair<MultiIndex, double>> w, c, s;
  for (int i = 0; i < m.n(); ++i) {
    w.push_back({{m.p(i), m.x(i)}, 1.0});
    w.push_back({{m.q(i), m.y(i)}, 1.0});
    c.push_back({{m.p(i), m.q(i)}, -1.0});
    c.push_back({{m.x(i), m.y(i)}, 1.0});
    s.push_back({{m.q(i), m.x(i)}, 1.0});
    s.push_back({{m.y(i), m.p(i)}, 1.0});
  }
  const auto& chart = m.total_chart();
  return {DifferentialForm::constant(chart, 2, w), DifferentialForm::constant(chart, 2, c),
          DifferentialForm::constant(chart, 2, s)};
}

/// J_omega and J_chi from their coordinate tables; J_sigma is J_omega after J_chi in the covector action.
inline HyperComplexTriple build_complex_triple(const FibrationModel& m) {
  const int d = m.total_chart()->dim();
  Matrix jw = Matrix::Zero(d, d), jc = Matrix::Zero(d, d);
  // entry (b, a) += c encodes the term c * dx^a (x) d_b
  for (int i = 0; i < m.n(); ++i) {
    jw(m.p(i), m.x(i)) += 1.0;   //  dx (x) d_p
    jw(m.x(i), m.p(i)) += -1.0;  // -dp (x) d_x
    jw(m.q(i), m.y(i)) += 1.0;   //  dy (x) d_q
    jw(m.y(i), m.q(i)) += -1.0;  // -dq (x) d_y

    jc(m.q(i), m.p(i)) += -1.0;  // -dp (x) d_q
    jc(m.p(i), m.q(i)) += 1.0;   //  dq (x) d_p
    jc(m.y(i), m.x(i)) += 1.0;   //  dx (x) d_y
    jc(m.x(i), m.y(i)) += -1.0;  // -dy (x) d_x
  }
  auto J_omega = EndomorphismField::constant(m.total_chart(), jw);
  auto J_chi = EndomorphismField::constant(m.total_chart(), jc);
  auto J_sigma = compose(J_omega, J_chi, Action::covector);
  return {std::move(J_omega), std::move(J_chi), std::move(J_sigma)};
}

/// The unique A with chi(X, Y) = omega(A X, Y), i.e. A = W^{-1} C for the form matrices.
inline Matrix recursion_operator(const DifferentialForm& omega, const DifferentialForm& chi, const Point& pt) {
  require_same_chart(omega.chart(), chi.chart(), "recursion_operator");
  const Matrix w = form_matrix(omega, pt), c = form_matrix(chi, pt);
  Eigen::FullPivLU<Matrix> lu(w);
  if (!lu.isInvertible()) throw DegenerateForm("recursion_operator: first form is degenerate");
  return lu.solve(c);
}

// ---------------------------------------------------------------------------

namespace detail {

inline CheckReport recursion_square_report(const DifferentialForm& a, const DifferentialForm& b, const char* la,
                                           const char* lb, const std::vector<Point>& pts, double tol) {
  const std::string pair = std::string(la) + "," + lb;
  return guarded_check("recursion_square(" + pair + ")", "(" + std::string(la) + "^-1 " + lb + ")^2 = -Id",
                       static_cast<int>(pts.size()), tol, [&] {
                         double worst = 0.0;
                         for (const auto& p : pts) worst = std::max(worst, almost_complex_residual(recursion_operator(a, b, p)));
                         return worst;
                       });
}

// max |lhs - sign * rhs| of covector-action composites over the sample
template <typename F>
double max_matrix_residual(const std::vector<Point>& pts, F&& f) {
  double worst = 0.0;
  for (const auto& p : pts) worst = std::max(worst, f(p).cwiseAbs().maxCoeff());
  return worst;
}

}  // namespace detail

/// Full hyper-symplectic / hypercomplex suite. Every identity yields one report;
/// failures never short-circuit the rest. Reports come back sorted by name.
inline std::vector<CheckReport> verify_hypersymplectic(const FibrationModel& model, const HyperSymplecticTriple& forms,
                                                       const HyperComplexTriple& js, const SampleConfig& sampling,
                                                       const Tolerances& tol = {}) {
  const auto pts = sample_points(model.total_chart(), sampling);
  const int n = static_cast<int>(pts.size());
  std::vector<CheckReport> out;

  out.push_back(check_symplectic(forms.omega, pts, sampling.fd_step, tol.fd, tol.nondegenerate, "omega"));
  out.push_back(check_symplectic(forms.chi, pts, sampling.fd_step, tol.fd, tol.nondegenerate, "chi"));
  out.push_back(check_symplectic(forms.sigma, pts, sampling.fd_step, tol.fd, tol.nondegenerate, "sigma"));

  out.push_back(detail::recursion_square_report(forms.omega, forms.chi, "omega", "chi", pts, tol.algebraic));
  out.push_back(detail::recursion_square_report(forms.omega, forms.sigma, "omega", "sigma", pts, tol.algebraic));
  out.push_back(detail::recursion_square_report(forms.chi, forms.sigma, "chi", "sigma", pts, tol.algebraic));

  const std::pair<const EndomorphismField*, const char*> named[] = {
      {&js.J_omega, "J_omega"}, {&js.J_chi, "J_chi"}, {&js.J_sigma, "J_sigma"}};
  for (auto [J, label] : named) {
    out.push_back(check_almost_complex(*J, pts, tol.algebraic, label));
    out.push_back(check_integrable(*J, pts, sampling.fd_step, tol.fd, sampling.seed, label));
  }

  for (int a = 0; a < 3; ++a) {
    const auto& [Ja, la] = named[a];
    const auto& [Jb, lb] = named[(a + 1) % 3];
    const std::string pair = std::string(la) + "," + lb;
    out.push_back(guarded_check("anticommute(" + pair + ")", pair + " anticommute", n, tol.algebraic, [&] {
      return detail::max_matrix_residual(pts, [&](const Point& p) -> Matrix {
        return endo_compose(*Ja, *Jb, p, Action::covector) + endo_compose(*Jb, *Ja, p, Action::covector);
      });
    }));
    // quaternion relation: J_a after J_b equals the third structure (covector action)
    const auto& [Jc, lc] = named[(a + 2) % 3];
    out.push_back(guarded_check("quaternion(" + std::string(la) + "." + lb + "=" + lc + ")",
                                std::string(la) + " after " + lb + " is " + lc, n, tol.algebraic, [&] {
                                  return detail::max_matrix_residual(pts, [&](const Point& p) -> Matrix {
                                    return endo_compose(*Ja, *Jb, p, Action::covector) - Jc->matrix(p);
                                  });
                                }));
  }

  sort_reports(out);
  return out;
}

inline std::vector<CheckReport> verify_hypersymplectic(const FibrationModel& model, const SampleConfig& sampling,
                                                       const Tolerances& tol = {}) {
  return verify_hypersymplectic(model, build_structure_triple(model), build_complex_triple(model), sampling, tol);
}

// ---------------------------------------------------------------------------

struct HolomorphicFrameResult {
  double residual = 0.0;
  std::vector<int> signs;  // +1 or -1 per pair: which eigenvalue of J the coframe matched
};

/// For each pair (a, b) standing for dz = a + i b, the covector residual
/// min over s of |J a + s b| + |J b - s a|; returns the max over pairs.
inline HolomorphicFrameResult holomorphic_frame_check(const EndomorphismField& J,
                                                      const std::vector<std::pair<DifferentialForm, DifferentialForm>>& pairs,
                                                      const Point& pt) {
  if (pairs.empty()) throw ArgumentError("holomorphic_frame_check: empty pair list");
  HolomorphicFrameResult out;
  for (const auto& [re, im] : pairs) {
    if (re.degree() != 1 || im.degree() != 1) throw ArgumentError("holomorphic_frame_check: pairs must be 1-forms");
    require_same_chart(J.chart(), re.chart(), "holomorphic_frame_check");
    require_same_chart(J.chart(), im.chart(), "holomorphic_frame_check");
    const Vector a = re.coefficients(pt.coords), b = im.coefficients(pt.coords);
    const Vector ja = J.apply_covector(pt, a), jb = J.apply_covector(pt, b);
    double best = std::numeric_limits<double>::infinity();
    int best_sign = 1;
    for (int s : {1, -1}) {
      const double r = (ja - s * (-b)).norm() + (jb - s * a).norm();
      if (r < best) {
        best = r;
        best_sign = s;
      }
    }
    out.residual = std::max(out.residual, best);
    out.signs.push_back(best_sign);
  }
  return out;
}

/// The fibres are Lagrangian for `form` iff it vanishes on every pair of vertical frame vectors.
inline CheckReport verify_lagrangian_fibres(const FibrationModel& model, const DifferentialForm& form,
                                            const std::vector<Point>& points, double tol = 1e-12,
                                            const std::string& label = "omega") {
  return guarded_check("lagrangian_fibres(" + label + ")", "fibres are Lagrangian for " + label,
                       static_cast<int>(points.size()), tol, [&] {
                         const int d = model.total_chart()->dim();
                         const int first_vertical = 2 * model.n();
                         double worst = 0.0;
                         for (const auto& p : points) {
                           const Matrix m = form_matrix(form, p);
                           worst = std::max(worst, m.block(first_vertical, first_vertical, d - first_vertical,
                                                            d - first_vertical)
                                                       .cwiseAbs()
                                                       .maxCoeff());
                         }
                         return worst;
                       });
}

namespace detail {

inline void check_section_point(const SectionMap& s, const Point& base_pt, const ChartRef& total) {
  if (base_pt.chart->dim() != s.base_dim()) throw ArgumentError("section: base point has wrong dimension");
  if (total->dim() != s.total_dim()) throw ArgumentError("section: target chart has wrong dimension");
}

}  // namespace detail

/// Pullback s^* form at a base point, from the section's exact Jacobian.
inline FormTable section_pullback(const SectionMap& section, const DifferentialForm& form, const Point& base_pt) {
  if (form.degree() != 2) throw ArgumentError("section_pullback: form must have degree 2");
  detail::check_section_point(section, base_pt, form.chart());
  const Matrix jac = section.jacobian(base_pt.coords);
  const Matrix pulled = jac.transpose() * form_matrix(form, section(base_pt.coords)) * jac;
  const int d = section.base_dim();
  FormTable out{d, 2, Vector(binomial(d, 2))};
  long s = 0;
  for (int i = 0; i < d; ++i)
    for (int j = i + 1; j < d; ++j) out.coefficients[s++] = pulled(i, j);
  return out;
}

namespace detail {

inline Eigen::ColPivHouseholderQR<Matrix> tangent_frame_qr(const Matrix& frame) {
  Eigen::JacobiSVD<Matrix> svd(frame);
  const Vector sv = svd.singularValues();
  if (sv.size() == 0 || sv.minCoeff() < 1e-10 * std::max(1.0, sv.maxCoeff()))
    throw GeometryError("section graph: tangent frame is rank deficient");
  return Eigen::ColPivHouseholderQR<Matrix>(frame);
}

}  // namespace detail

/// Largest distance of J T_i from span{T} over the graph tangent frame T = ds.
/// Zero means the graph is a J-complex submanifold at this point.
inline double complex_submanifold_check(const SectionMap& section, const EndomorphismField& J, const Point& base_pt) {
  detail::check_section_point(section, base_pt, J.chart());
  const Matrix frame = section.jacobian(base_pt.coords);
  const auto qr = detail::tangent_frame_qr(frame);
  const Matrix images = J.matrix(section(base_pt.coords)) * frame;
  const Matrix coeffs = qr.solve(images);
  return (images - frame * coeffs).colwise().norm().maxCoeff();
}

/// Matrix C with J T = T C on the section graph (least squares), using an FD
/// Jacobian of the section map. This is J restricted to the graph, pulled back to base coordinates.
inline Matrix restricted_complex_structure(const SectionMap& section, const EndomorphismField& J, const Point& base_pt,
                                           double fd_step) {
  detail::check_section_point(section, base_pt, J.chart());
  const Matrix frame = section.fd_jacobian(*base_pt.chart, base_pt.coords, fd_step);
  const auto qr = detail::tangent_frame_qr(frame);
  return qr.solve(Matrix(J.matrix(section(base_pt.coords)) * frame));
}

}  // namespace hypersym
