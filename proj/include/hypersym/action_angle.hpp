#pragma once

#include <cmath>
#include <functional>
#include <numbers>
#include <vector>

#include "hypersym/fibration_model.hpp"

namespace hypersym {

struct QuadratureRule {
  std::vector<double> nodes;  // on [-1, 1]
  std::vector<double> weights;
};

/// Gauss-Legendre nodes and weights by Newton iteration on P_n.
inline QuadratureRule gauss_legendre(int n) {
  if (n < 1) throw ArgumentError("gauss_legendre: need at least one node");
  QuadratureRule rule{std::vector<double>(n), std::vector<double>(n)};
  const int half = (n + 1) / 2;
  for (int i = 0; i < half; ++i) {
    double z = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0, p1 = 0.0;
      for (int j = 1; j <= n; ++j) {
        const double p2 = p1;
        p1 = p0;
        p0 = ((2.0 * j - 1.0) * z * p1 - (j - 1.0) * p2) / j;
      }
      dp = n * (z * p0 - p1) / (z * z - 1.0);
      const double dz = p0 / dp;
      z -= dz;
      if (std::abs(dz) < 1e-16) break;
    }
    rule.nodes[i] = -z;
    rule.nodes[n - 1 - i] = z;
    rule.weights[i] = rule.weights[n - 1 - i] = 2.0 / ((1.0 - z * z) * dp * dp);
  }
  return rule;
}

template <typename F>
double integrate(const QuadratureRule& rule, F&& f, double a, double b) {
  const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
  double total = 0.0;
  for (std::size_t k = 0; k < rule.nodes.size(); ++k) total += rule.weights[k] * f(mid + half * rule.nodes[k]);
  return half * total;
}

/// One degree of freedom with H = (momentum^2 + nu^2 position^2) / 2.
struct Oscillator {
  double frequency = 1.0;

  explicit Oscillator(double nu = 1.0) : frequency(nu) {
    if (!(nu > 0.0)) throw ArgumentError("oscillator: frequency must be positive");
  }

  double energy(double position, double momentum) const {
    return 0.5 * (momentum * momentum + frequency * frequency * position * position);
  }
};

struct PhasePoint {
  Vector positions;
  Vector momenta;
};

struct ActionAngle {
  Vector actions;
  Vector angles;
};

/// Product of oscillators; the base of its fibration has one action per factor.
struct ProductSystem {
  std::vector<Oscillator> factors;
  Interval energy_window{0.2, 2.0};

  explicit ProductSystem(std::vector<Oscillator> f, Interval window = {0.2, 2.0})
      : factors(std::move(f)), energy_window(window) {
    if (factors.size() < 2 || factors.size() % 2 != 0)
      throw ArgumentError("product system: need an even number (>= 2) of factors");
    if (!(window.lower > 0.0 && window.lower < window.upper))
      throw ArgumentError("product system: energy window must lie in (0, inf)");
  }

  int size() const noexcept { return static_cast<int>(factors.size()); }
};

/// (1/2pi) closed integral of momentum d(position) over the level curve H = E,
/// parametrized by the angle and integrated with Gauss-Legendre.
inline double action_from_energy(const Oscillator& osc, double energy, int nodes = 64) {
  if (!(energy > 0.0)) throw DegenerateOrbit("action_from_energy: level set E <= 0 is a fixed point");
  if (nodes < 16) throw ArgumentError("action_from_energy: need at least 16 nodes");
  const double nu = osc.frequency;
  const double amp = std::sqrt(2.0 * energy);
  const auto rule = gauss_legendre(nodes);
  // position = amp/nu sin t, momentum = amp cos t
  const double loop = integrate(
      rule, [&](double t) { return (amp * std::cos(t)) * (amp / nu * std::cos(t)); }, 0.0, 2.0 * std::numbers::pi);
  return loop / (2.0 * std::numbers::pi);
}

inline double wrap_angle(double a) {
  a = std::fmod(a, 2.0 * std::numbers::pi);
  return a < 0.0 ? a + 2.0 * std::numbers::pi : a;
}

/// Signed difference folded into (-pi, pi].
inline double angle_difference(double a, double b) {
  double d = std::remainder(a - b, 2.0 * std::numbers::pi);
  return d == -std::numbers::pi ? std::numbers::pi : d;
}

/// I = (momentum^2 + nu^2 position^2) / (2 nu), angle = atan2(nu position, momentum) in [0, 2pi).
inline ActionAngle to_action_angle(const ProductSystem& sys, const PhasePoint& z) {
  const int m = sys.size();
  if (z.positions.size() != m || z.momenta.size() != m) throw ArgumentError("to_action_angle: wrong phase dimension");
  ActionAngle out{Vector(m), Vector(m)};
  for (int k = 0; k < m; ++k) {
    const double nu = sys.factors[k].frequency;
    const double e = sys.factors[k].energy(z.positions[k], z.momenta[k]);
    if (!(e > 0.0)) throw DegenerateOrbit("to_action_angle: factor " + std::to_string(k) + " has zero energy");
    out.actions[k] = e / nu;
    out.angles[k] = wrap_angle(std::atan2(nu * z.positions[k], z.momenta[k]));
  }
  return out;
}

inline PhasePoint from_action_angle(const ProductSystem& sys, const ActionAngle& aa) {
  const int m = sys.size();
  if (aa.actions.size() != m || aa.angles.size() != m) throw ArgumentError("from_action_angle: wrong dimension");
  PhasePoint z{Vector(m), Vector(m)};
  for (int k = 0; k < m; ++k) {
    if (!(aa.actions[k] > 0.0)) throw DegenerateOrbit("from_action_angle: action must be positive");
    const double nu = sys.factors[k].frequency;
    const double amp = std::sqrt(2.0 * aa.actions[k] * nu);
    z.positions[k] = amp / nu * std::sin(aa.angles[k]);
    z.momenta[k] = amp * std::cos(aa.angles[k]);
  }
  return z;
}

/// Phase points with per-factor energy uniform in the window and angle uniform in [0, 2pi).
inline std::vector<PhasePoint> sample_phase_points(const ProductSystem& sys, int n_points, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<PhasePoint> out;
  for (int s = 0; s < n_points; ++s) {
    ActionAngle aa{Vector(sys.size()), Vector(sys.size())};
    for (int k = 0; k < sys.size(); ++k) {
      const double e = sys.energy_window.lower + sys.energy_window.width() * unit_uniform(rng);
      aa.actions[k] = e / sys.factors[k].frequency;
      aa.angles[k] = 2.0 * std::numbers::pi * unit_uniform(rng);
    }
    out.push_back(from_action_angle(sys, aa));
  }
  return out;
}

using ActionAngleTransform = std::function<ActionAngle(const ProductSystem&, const PhasePoint&)>;

/// Pulls sum d(angle_i) ^ d(I_i) back through `transform` with an FD Jacobian and
/// compares with sum d(position_i) ^ d(momentum_i). `fd_step` is absolute in phase space.
inline CheckReport canonical_check(const ProductSystem& sys, const std::vector<PhasePoint>& points, double fd_step,
                                   double tol = 1e-6, const ActionAngleTransform& transform = to_action_angle) {
  return guarded_check("canonical(action-angle)", "d(angle) ^ dI equals the mechanical symplectic form",
                       static_cast<int>(points.size()), tol, [&] {
                         const int m = sys.size();
                         Matrix target = Matrix::Zero(2 * m, 2 * m);  // coordinates (positions, momenta)
                         Matrix source = Matrix::Zero(2 * m, 2 * m);  // coordinates (actions, angles)
                         for (int k = 0; k < m; ++k) {
                           target(k, m + k) = 1.0;
                           target(m + k, k) = -1.0;
                           source(m + k, k) = 1.0;
                           source(k, m + k) = -1.0;
                         }
                         double worst = 0.0;
                         for (const auto& z : points) {
                           Matrix jac(2 * m, 2 * m);
                           for (int c = 0; c < 2 * m; ++c) {
                             PhasePoint plus = z, minus = z;
                             (c < m ? plus.positions[c] : plus.momenta[c - m]) += fd_step;
                             (c < m ? minus.positions[c] : minus.momenta[c - m]) -= fd_step;
                             const ActionAngle fp = transform(sys, plus), fm = transform(sys, minus);
                             for (int k = 0; k < m; ++k) {
                               jac(k, c) = (fp.actions[k] - fm.actions[k]) / (2.0 * fd_step);
                               jac(m + k, c) = angle_difference(fp.angles[k], fm.angles[k]) / (2.0 * fd_step);
                             }
                           }
                           worst = std::max(worst, (jac.transpose() * source * jac - target).cwiseAbs().maxCoeff());
                         }
                         return worst;
                       });
}

namespace detail {

// RK4 for one oscillator over `duration`, accumulating the unwrapped change of its angle.
inline void rk4_oscillator(double nu, double& position, double& momentum, double duration, int steps,
                           const std::function<void(double, double)>& on_step) {
  const double h = duration / steps;
  auto f = [nu](double x, double p) { return std::pair{p, -nu * nu * x}; };
  for (int s = 0; s < steps; ++s) {
    auto [k1x, k1p] = f(position, momentum);
    auto [k2x, k2p] = f(position + 0.5 * h * k1x, momentum + 0.5 * h * k1p);
    auto [k3x, k3p] = f(position + 0.5 * h * k2x, momentum + 0.5 * h * k2p);
    auto [k4x, k4p] = f(position + h * k3x, momentum + h * k3p);
    position += h / 6.0 * (k1x + 2.0 * k2x + 2.0 * k3x + k4x);
    momentum += h / 6.0 * (k1p + 2.0 * k2p + 2.0 * k3p + k4p);
    on_step(position, momentum);
  }
}

}  // namespace detail

/// (1/2pi) closed integral of d(angle_k) along the cycle of factor `cycle`: the flow of
/// the Hamiltonian vector field of I_cycle for time 2pi, integrated with RK4.
inline double cycle_angle_integral(const ProductSystem& sys, int angle_factor, int cycle, const PhasePoint& start,
                                   int steps = 4096) {
  if (angle_factor < 0 || angle_factor >= sys.size() || cycle < 0 || cycle >= sys.size())
    throw ArgumentError("cycle_angle_integral: factor index out of range");
  PhasePoint z = start;
  const double nu = sys.factors[cycle].frequency;
  double accumulated = 0.0;
  double previous = to_action_angle(sys, z).angles[angle_factor];
  // X_{I} = X_H / nu, so flowing I for time 2pi is flowing H for time 2pi / nu
  detail::rk4_oscillator(nu, z.positions[cycle], z.momenta[cycle], 2.0 * std::numbers::pi / nu, steps,
                         [&](double, double) {
                           const double now = to_action_angle(sys, z).angles[angle_factor];
                           accumulated += angle_difference(now, previous);
                           previous = now;
                         });
  return accumulated / (2.0 * std::numbers::pi);
}

/// |(1/2pi) closed integral of d(angle) - 1| along one Hamiltonian period at energy E.
inline double angle_period_check(const Oscillator& osc, double energy, int steps = 4096) {
  if (!(energy > 0.0)) throw DegenerateOrbit("angle_period_check: level set E <= 0 is a fixed point");
  const ProductSystem single({osc, osc});
  const double amp = std::sqrt(2.0 * energy);
  PhasePoint start{Vector::Constant(2, 0.0), Vector::Constant(2, amp)};
  return std::abs(cycle_angle_integral(single, 0, 0, start, steps) - 1.0);
}

/// Chart model of the system's fibration: factor 2i supplies x_i, factor 2i+1 supplies y_i,
/// so that the base form is dI_1 ^ dI_2 + dI_3 ^ dI_4 + ...
inline FibrationModel fibration_from(const ProductSystem& sys) {
  const int n = sys.size() / 2;
  std::vector<Interval> box(2 * n);
  for (int k = 0; k < sys.size(); ++k) {
    const double nu = sys.factors[k].frequency;
    const int axis = (k % 2 == 0) ? k / 2 : n + k / 2;
    box[axis] = {sys.energy_window.lower / nu, sys.energy_window.upper / nu};
  }
  return FibrationModel(n, std::move(box), "oscillators");
}

}  // namespace hypersym
