#include "detail/ode.hpp"

#include <algorithm>
#include <cstddef>

namespace stargraph::detail {

namespace {

struct Deriv {
  Complex dy, ddy;
};

// Dormand-Prince coefficients.
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                 a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                 a64 = 49.0 / 176, a65 = -5103.0 / 18656;
constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                 b5 = -2187.0 / 6784, b6 = 11.0 / 84;
// 4th-order embedded weights (7-stage, FSAL).
constexpr double e1 = 5179.0 / 57600, e3 = 7571.0 / 16695, e4 = 393.0 / 640,
                 e5 = -92097.0 / 339200, e6 = 187.0 / 2100, e7 = 1.0 / 40;

}  // namespace

void Ode2Integrator::integrate(
    double t0, Ode2State s0, const std::vector<double>& stops,
    const std::function<void(std::size_t, const Ode2State&)>& record) const {
  if (stops.empty()) return;

  auto f = [this](double t, const Ode2State& s) -> Deriv {
    return {s.dy, coeff(t) * s.y - rhs(t)};
  };

  const double dir = (stops.back() >= t0) ? 1.0 : -1.0;
  double t = t0;
  Ode2State s = s0;
  double h = dir * std::max(1e-6, 1e-3 * std::abs(stops.back() - t0));

  for (std::size_t idx = 0; idx < stops.size(); ++idx) {
    const double target = stops[idx];
    if (dir * (target - t) < -1e-14 * std::max(1.0, std::abs(t)))
      throw std::invalid_argument("ode stops must be monotone along the direction of integration");

    while (dir * (target - t) > 1e-15 * std::max(1.0, std::abs(t))) {
      bool hit = false;
      if (dir * (t + h - target) >= 0.0) {
        h = target - t;
        hit = true;
      }

      const Deriv k1 = f(t, s);
      auto stage = [&](double c, Complex wy, Complex wd) {
        return f(t + c * h, Ode2State{s.y + h * wy, s.dy + h * wd});
      };
      const Deriv k2 = stage(c2, a21 * k1.dy, a21 * k1.ddy);
      const Deriv k3 = stage(c3, a31 * k1.dy + a32 * k2.dy, a31 * k1.ddy + a32 * k2.ddy);
      const Deriv k4 = stage(c4, a41 * k1.dy + a42 * k2.dy + a43 * k3.dy,
                             a41 * k1.ddy + a42 * k2.ddy + a43 * k3.ddy);
      const Deriv k5 =
          stage(c5, a51 * k1.dy + a52 * k2.dy + a53 * k3.dy + a54 * k4.dy,
                a51 * k1.ddy + a52 * k2.ddy + a53 * k3.ddy + a54 * k4.ddy);
      const Deriv k6 =
          stage(1.0, a61 * k1.dy + a62 * k2.dy + a63 * k3.dy + a64 * k4.dy + a65 * k5.dy,
                a61 * k1.ddy + a62 * k2.ddy + a63 * k3.ddy + a64 * k4.ddy + a65 * k5.ddy);

      Ode2State s5{s.y + h * (b1 * k1.dy + b3 * k3.dy + b4 * k4.dy + b5 * k5.dy + b6 * k6.dy),
                   s.dy + h * (b1 * k1.ddy + b3 * k3.ddy + b4 * k4.ddy + b5 * k5.ddy +
                               b6 * k6.ddy)};
      const Deriv k7 = f(t + h, s5);
      Ode2State s4{s.y + h * (e1 * k1.dy + e3 * k3.dy + e4 * k4.dy + e5 * k5.dy + e6 * k6.dy +
                              e7 * k7.dy),
                   s.dy + h * (e1 * k1.ddy + e3 * k3.ddy + e4 * k4.ddy + e5 * k5.ddy +
                               e6 * k6.ddy + e7 * k7.ddy)};

      const double sc_y = atol + rtol * std::max(std::abs(s.y), std::abs(s5.y));
      const double sc_d = atol + rtol * std::max(std::abs(s.dy), std::abs(s5.dy));
      const double err = std::sqrt(0.5 * (std::norm(s5.y - s4.y) / (sc_y * sc_y) +
                                          std::norm(s5.dy - s4.dy) / (sc_d * sc_d)));

      if (err <= 1.0) {
        t += h;
        s = s5;
        if (hit) t = target;
      }
      double factor = (err > 0.0) ? 0.9 * std::pow(err, -0.2) : 5.0;
      factor = std::clamp(factor, 0.2, 5.0);
      h *= factor;
      if (std::abs(h) < 1e-15 * std::max(1.0, std::abs(t)))
        throw std::runtime_error("ode step size underflow");
    }
    t = target;
    record(idx, s);
  }
}

}  // namespace stargraph::detail
