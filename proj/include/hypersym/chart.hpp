#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <functional>
#include <iostream>
#include <memory>
#include <random>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "hypersym/errors.hpp"

namespace hypersym {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

struct Interval {
  double lower = 0.0;
  double upper = 1.0;

  double width() const noexcept { return upper - lower; }
  bool contains(double v) const noexcept { return v >= lower && v <= upper; }
};

/// A single coordinate chart: named coordinates plus the sampling box.
class Chart {
 public:
  Chart(std::string name, std::vector<std::string> coord_names, std::vector<Interval> domain)
      : name_(std::move(name)), coord_names_(std::move(coord_names)), domain_(std::move(domain)) {
    if (coord_names_.empty()) throw ArgumentError("chart '" + name_ + "': dimension must be >= 1");
    if (domain_.size() != coord_names_.size())
      throw ArgumentError("chart '" + name_ + "': domain box has wrong number of axes");
    std::set<std::string> seen(coord_names_.begin(), coord_names_.end());
    if (seen.size() != coord_names_.size())
      throw ArgumentError("chart '" + name_ + "': coordinate names must be distinct");
    for (const auto& iv : domain_)
      if (!(iv.lower < iv.upper)) throw ArgumentError("chart '" + name_ + "': empty domain interval");
  }

  const std::string& name() const noexcept { return name_; }
  int dim() const noexcept { return static_cast<int>(coord_names_.size()); }
  const std::vector<std::string>& coord_names() const noexcept { return coord_names_; }
  const std::vector<Interval>& domain() const noexcept { return domain_; }

  int axis(const std::string& coord) const {
    auto it = std::find(coord_names_.begin(), coord_names_.end(), coord);
    if (it == coord_names_.end()) throw ArgumentError("chart '" + name_ + "' has no coordinate '" + coord + "'");
    return static_cast<int>(it - coord_names_.begin());
  }

  bool contains(const Vector& coords) const {
    for (int i = 0; i < dim(); ++i)
      if (!domain_[i].contains(coords[i])) return false;
    return true;
  }

  /// Central-difference step along `axis`: the relative step scaled by the box width.
  double axis_step(int axis, double relative_step) const { return relative_step * domain_[axis].width(); }

  bool operator==(const Chart& other) const {
    return name_ == other.name_ && coord_names_ == other.coord_names_;
  }

 private:
  std::string name_;
  std::vector<std::string> coord_names_;
  std::vector<Interval> domain_;
};

using ChartRef = std::shared_ptr<const Chart>;

inline ChartRef make_chart(std::string name, std::vector<std::string> coords, std::vector<Interval> domain) {
  return std::make_shared<const Chart>(std::move(name), std::move(coords), std::move(domain));
}

inline bool same_chart(const ChartRef& a, const ChartRef& b) { return a == b || (a && b && *a == *b); }

inline void require_same_chart(const ChartRef& a, const ChartRef& b, const char* what) {
  if (!same_chart(a, b)) throw ArgumentError(std::string(what) + ": chart mismatch");
}

struct Point {
  ChartRef chart;
  Vector coords;

  Point(ChartRef c, Vector x) : chart(std::move(c)), coords(std::move(x)) {
    if (!chart) throw ArgumentError("point without chart");
    if (coords.size() != chart->dim()) throw ArgumentError("point coordinates do not match chart dimension");
  }
};

// Out-of-domain evaluation is allowed but reported through this hook.
using DomainWarningHandler = void (*)(const Chart&, const Vector&);

namespace detail {
inline void default_domain_warning(const Chart& chart, const Vector& coords) {
  std::cerr << "warning: point (" << coords.transpose() << ") lies outside the domain of chart '" << chart.name()
            << "'\n";
}
inline std::atomic<DomainWarningHandler>& domain_warning_slot() {
  static std::atomic<DomainWarningHandler> slot{&default_domain_warning};
  return slot;
}
}  // namespace detail

/// Installs a new handler and returns the previous one.
inline DomainWarningHandler set_domain_warning_handler(DomainWarningHandler h) {
  return detail::domain_warning_slot().exchange(h ? h : &detail::default_domain_warning);
}

inline void check_domain(const Point& pt) {
  if (!pt.chart->contains(pt.coords)) detail::domain_warning_slot().load()(*pt.chart, pt.coords);
}

/// Scalar-, vector- and covector-valued fields over a chart. Evaluators take raw
/// chart coordinates so finite-difference stencils can probe them directly.
template <typename Value>
class Field {
 public:
  using Evaluator = std::function<Value(const Vector&)>;

  Field(ChartRef chart, Evaluator eval) : chart_(std::move(chart)), eval_(std::move(eval)) {}

  const ChartRef& chart() const noexcept { return chart_; }
  Value at(const Vector& coords) const { return eval_(coords); }
  Value operator()(const Point& pt) const {
    require_same_chart(chart_, pt.chart, "field evaluation");
    return eval_(pt.coords);
  }

 private:
  ChartRef chart_;
  Evaluator eval_;
};

using ScalarField = Field<double>;
using VectorField = Field<Vector>;
using CovectorField = Field<Vector>;

inline VectorField constant_vector_field(ChartRef chart, Vector v) {
  if (v.size() != chart->dim()) throw ArgumentError("constant vector field: wrong length");
  return VectorField(std::move(chart), [v = std::move(v)](const Vector&) { return v; });
}

/// Coordinate frame field d/d(coord axis).
inline VectorField coordinate_field(const ChartRef& chart, int axis) {
  return constant_vector_field(chart, Vector::Unit(chart->dim(), axis));
}

inline Vector unit(int dim, int axis) { return Vector::Unit(dim, axis); }

/// Uniform draw in [0, 1) from the top 53 bits; stable across standard libraries.
inline double unit_uniform(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

struct SampleConfig {
  int n_points = 100;
  std::uint64_t seed = 42;
  double fd_step = 1e-5;
};

inline std::vector<Point> sample_points(const ChartRef& chart, int n_points, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<Point> out;
  out.reserve(static_cast<std::size_t>(std::max(n_points, 0)));
  for (int s = 0; s < n_points; ++s) {
    Vector x(chart->dim());
    for (int i = 0; i < chart->dim(); ++i) {
      const auto& iv = chart->domain()[i];
      x[i] = iv.lower + iv.width() * unit_uniform(rng);
    }
    out.emplace_back(chart, std::move(x));
  }
  return out;
}

inline std::vector<Point> sample_points(const ChartRef& chart, const SampleConfig& cfg) {
  return sample_points(chart, cfg.n_points, cfg.seed);
}

/// Central-difference Jacobian of a vector-valued evaluator: column k is the derivative along axis k.
template <typename F>
Matrix fd_jacobian(const Chart& chart, F&& f, const Vector& x, double relative_step) {
  Vector probe = x;
  Matrix jac;
  for (int k = 0; k < chart.dim(); ++k) {
    const double h = chart.axis_step(k, relative_step);
    probe[k] = x[k] + h;
    Vector fp = f(probe);
    probe[k] = x[k] - h;
    Vector fm = f(probe);
    probe[k] = x[k];
    if (k == 0) jac.resize(fp.size(), chart.dim());
    jac.col(k) = (fp - fm) / (2.0 * h);
  }
  return jac;
}

}  // namespace hypersym
