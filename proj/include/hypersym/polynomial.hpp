#pragma once

#include <algorithm>
#include <string>
#include <vector>

#include "hypersym/chart.hpp"

namespace hypersym {

struct Monomial {
  std::vector<int> exponents;
  double coefficient = 0.0;
};

/// Sparse real polynomial in a fixed number of variables.
class Polynomial {
 public:
  explicit Polynomial(int n_vars = 0, std::vector<Monomial> terms = {}) : n_vars_(n_vars), terms_(std::move(terms)) {
    for (const auto& t : terms_) {
      if (static_cast<int>(t.exponents.size()) != n_vars_)
        throw ArgumentError("polynomial: exponent tuple length must equal the number of variables");
      for (int e : t.exponents)
        if (e < 0) throw ArgumentError("polynomial: negative exponent");
    }
  }

  static Polynomial constant(int n_vars, double c) { return Polynomial(n_vars, {{std::vector<int>(n_vars, 0), c}}); }

  /// c * x_var (degree one monomial).
  static Polynomial linear(int n_vars, int var, double c = 1.0) {
    std::vector<int> e(n_vars, 0);
    e.at(var) = 1;
    return Polynomial(n_vars, {{e, c}});
  }

  int n_vars() const noexcept { return n_vars_; }
  const std::vector<Monomial>& terms() const noexcept { return terms_; }

  int degree() const {
    int d = 0;
    for (const auto& t : terms_) {
      int s = 0;
      for (int e : t.exponents) s += e;
      d = std::max(d, s);
    }
    return d;
  }

  double operator()(const Vector& x) const {
    double total = 0.0;
    for (const auto& t : terms_) {
      double m = t.coefficient;
      for (int v = 0; v < n_vars_; ++v)
        for (int e = 0; e < t.exponents[v]; ++e) m *= x[v];
      total += m;
    }
    return total;
  }

  Polynomial derivative(int var) const {
    std::vector<Monomial> out;
    for (const auto& t : terms_) {
      if (t.exponents[var] == 0) continue;
      Monomial m = t;
      m.coefficient *= t.exponents[var];
      --m.exponents[var];
      out.push_back(std::move(m));
    }
    return Polynomial(n_vars_, std::move(out));
  }

  Polynomial operator+(const Polynomial& other) const {
    if (other.n_vars_ != n_vars_) throw ArgumentError("polynomial sum: variable count mismatch");
    std::vector<Monomial> t = terms_;
    t.insert(t.end(), other.terms_.begin(), other.terms_.end());
    return Polynomial(n_vars_, std::move(t));
  }

 private:
  int n_vars_;
  std::vector<Monomial> terms_;
};

/// A section (x, y) -> (x, y, p(x, y), q(x, y)) of the fibration with polynomial
/// angle components. Base coordinates are ordered (x_1..x_n, y_1..y_n).
class SectionMap {
 public:
  SectionMap(std::vector<Polynomial> p, std::vector<Polynomial> q) : p_(std::move(p)), q_(std::move(q)) {
    if (p_.empty() || p_.size() != q_.size()) throw ArgumentError("section: need n polynomials for p and for q");
    const int nv = 2 * n();
    for (const auto* group : {&p_, &q_})
      for (const auto& poly : *group)
        if (poly.n_vars() != nv) throw ArgumentError("section: polynomials must be in the 2n base coordinates");
  }

  static SectionMap zero(int n) {
    return {std::vector<Polynomial>(n, Polynomial(2 * n)), std::vector<Polynomial>(n, Polynomial(2 * n))};
  }

  int n() const noexcept { return static_cast<int>(p_.size()); }
  int base_dim() const noexcept { return 2 * n(); }
  int total_dim() const noexcept { return 4 * n(); }
  const std::vector<Polynomial>& p() const noexcept { return p_; }
  const std::vector<Polynomial>& q() const noexcept { return q_; }

  int degree() const {
    int d = 0;
    for (const auto* group : {&p_, &q_})
      for (const auto& poly : *group) d = std::max(d, poly.degree());
    return d;
  }

  Vector operator()(const Vector& base) const {
    check(base);
    Vector out(total_dim());
    out.head(base_dim()) = base;
    for (int i = 0; i < n(); ++i) {
      out[2 * n() + i] = p_[i](base);
      out[3 * n() + i] = q_[i](base);
    }
    return out;
  }

  /// Exact Jacobian (4n x 2n) from polynomial differentiation.
  Matrix jacobian(const Vector& base) const {
    check(base);
    Matrix jac = Matrix::Zero(total_dim(), base_dim());
    jac.topRows(base_dim()).setIdentity();
    for (int i = 0; i < n(); ++i)
      for (int v = 0; v < base_dim(); ++v) {
        jac(2 * n() + i, v) = p_[i].derivative(v)(base);
        jac(3 * n() + i, v) = q_[i].derivative(v)(base);
      }
    return jac;
  }

  /// Central-difference Jacobian of the section map, steps relative to the base box.
  Matrix fd_jacobian(const Chart& base_chart, const Vector& base, double step) const {
    return hypersym::fd_jacobian(base_chart, [this](const Vector& b) { return (*this)(b); }, base, step);
  }

 private:
  void check(const Vector& base) const {
    if (base.size() != base_dim()) throw ArgumentError("section: base point has wrong dimension");
  }

  std::vector<Polynomial> p_;
  std::vector<Polynomial> q_;
};

}  // namespace hypersym
