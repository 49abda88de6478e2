#pragma once

#include <cmath>
#include <functional>
#include <stdexcept>
#include <vector>

#include "stargraph/graph.hpp"

namespace stargraph::detail {

/// State of a scalar second-order ODE: (y, y').
struct Ode2State {
  Complex y{0.0, 0.0};
  Complex dy{0.0, 0.0};
};

/// Exact transfer across an interval of (signed) length h for y'' = v y with
/// constant real v.
inline Ode2State propagate_const(const Ode2State& s, double v, double h) {
  double C, S;  // y(h) = C y0 + S y0', y'(h) = v S y0 + C y0'
  if (v > 0.0) {
    const double w = std::sqrt(v);
    C = std::cosh(w * h);
    S = std::sinh(w * h) / w;
  } else if (v < 0.0) {
    const double w = std::sqrt(-v);
    C = std::cos(w * h);
    S = std::sin(w * h) / w;
  } else {
    C = 1.0;
    S = h;
  }
  return {C * s.y + S * s.dy, v * S * s.y + C * s.dy};
}

/// Adaptive Dormand-Prince 5(4) integrator for y'' = coeff(t) y - rhs(t).
/// Integrates from t0 through the strictly monotone list `stops` (which sets
/// the direction); calls `record(index, state)` at each stop. Breakpoints of
/// coeff/rhs should be included among the stops so each step stays smooth.
class Ode2Integrator {
 public:
  std::function<Complex(double)> coeff;
  std::function<Complex(double)> rhs;
  double rtol = 1e-10;
  double atol = 1e-13;

  void integrate(double t0, Ode2State s0, const std::vector<double>& stops,
                 const std::function<void(std::size_t, const Ode2State&)>& record) const;
};

}  // namespace stargraph::detail
