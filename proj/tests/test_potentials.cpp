#include <doctest.h>

#include <cmath>

#include "stargraph/potentials.hpp"

using namespace stargraph;

TEST_SUITE("potentials") {

TEST_CASE("edge function forms") {
  auto c = EdgeFunction::constant(2.5, 0.5);
  CHECK(c(0.25) == 2.5);
  CHECK(c(0.75) == 0.0);
  CHECK(c.integral() == doctest::Approx(1.25));

  auto pc = EdgeFunction::piecewise_constant({0.0, 0.25, 1.0}, {1.0, -2.0});
  CHECK(pc(0.1) == 1.0);
  CHECK(pc(0.5) == -2.0);
  CHECK(pc(1.5) == 0.0);
  CHECK(pc.integral() == doctest::Approx(0.25 - 1.5));
  CHECK(pc.breakpoints() == std::vector<double>{0.25, 1.0});

  auto poly = EdgeFunction::polynomial({1.0, 0.0, -1.0}, 0.0, 1.0);  // 1 - t^2
  CHECK(poly(0.5) == doctest::Approx(0.75));
  CHECK(poly(2.0) == 0.0);
  CHECK(poly.integral() == doctest::Approx(2.0 / 3));

  auto tab = EdgeFunction::tabulated({0.0, 0.5, 1.0}, {0.0, 1.0, 0.0});
  CHECK(tab(0.25) == doctest::Approx(0.5));
  CHECK(tab.integral() == doctest::Approx(0.5));

  auto taylor = poly.taylor_at_zero(3);
  CHECK(taylor[0] == doctest::Approx(1.0));
  CHECK(taylor[2] == doctest::Approx(-1.0));
}

TEST_CASE("short-range support must stay inside the unit ball") {
  CHECK_NOTHROW(ShortRangeSpec(3, EdgeFunction::constant(1.0),
                               EdgeFunction::zero(), EdgeFunction::zero())
                    .validate());
  CHECK_THROWS_AS(ShortRangeSpec(3, EdgeFunction::constant(1.0, 1.5),
                                 EdgeFunction::zero(), EdgeFunction::zero()),
                  std::invalid_argument);
  CHECK_THROWS_AS(RegularizedPotential(CoulombSpec::zeros(2),
                                       ShortRangeSpec::none(2), 1.5),
                  std::invalid_argument);
}

TEST_CASE("eval_Q") {
  CoulombSpec attract((Eigen::VectorXd(3) << -1, -1, -1).finished());
  CHECK(eval_Q(attract, 0, 0.5) == doctest::Approx(-2.0));
  CHECK(eval_Q(CoulombSpec::zeros(3), 1, 0.3) == 0.0);
  CoulombSpec mixed((Eigen::VectorXd(3) << 1, 2, 3).finished());
  CHECK(eval_Q(mixed, 2, 3.0) == doctest::Approx(1.0));
  CHECK_THROWS_AS(eval_Q(mixed, 0, 0.0), std::domain_error);
}

TEST_CASE("eval_Qeps branches") {
  CoulombSpec q1((Eigen::VectorXd(1) << -1.0).finished());
  CHECK(eval_Qeps(q1, EdgeFunction::zero(), 0.3, 0, 0.1) == 0.0);
  CHECK(eval_Qeps(q1, EdgeFunction::zero(), 0.1, 0, 0.2) == doctest::Approx(-5.0));
  const double eps = std::exp(-1.0);
  CHECK(eval_Qeps(q1, EdgeFunction::constant(2.0), eps, 0, eps / 2) ==
        doctest::Approx(-2.0 * std::exp(1.0)));
}

TEST_CASE("eval_Weps") {
  const double pi = M_PI;
  {
    RegularizedPotential p(CoulombSpec((Eigen::VectorXd(2) << 1, -2).finished()),
                           ShortRangeSpec::none(2), 0.1);
    CHECK(eval_Weps(p, 0, 0.5) == doctest::Approx(2.0));
    CHECK(eval_Weps(p, 1, 0.5) == doctest::Approx(-4.0));
  }
  {
    RegularizedPotential p(
        CoulombSpec::zeros(2),
        ShortRangeSpec(2, EdgeFunction::zero(), EdgeFunction::zero(),
                       EdgeFunction::constant(-pi * pi / 4)),
        0.1);
    CHECK(eval_Weps(p, 0, 0.05) == doctest::Approx(-100.0 * pi * pi / 4));
  }
  {
    RegularizedPotential p(CoulombSpec::zeros(2),
                           ShortRangeSpec(2, EdgeFunction::zero(),
                                          EdgeFunction::constant(1.0),
                                          EdgeFunction::zero()),
                           0.5);
    CHECK(eval_Weps(p, 0, 0.25) == doctest::Approx(2.0));
  }
}

TEST_CASE("W_eps coincides with Q outside the scaled core") {
  RegularizedPotential p(
      CoulombSpec((Eigen::VectorXd(2) << 1.5, -0.5).finished()),
      ShortRangeSpec(2, EdgeFunction::constant(2.0), EdgeFunction::constant(-1.0),
                     EdgeFunction::constant(3.0)),
      0.125);
  for (double t = 0.126; t < 3.0; t += 0.033)
    for (int k = 0; k < 2; ++k)
      CHECK(eval_Weps(p, k, t) == doctest::Approx(eval_Q(p.coulomb, k, t)));
}

TEST_CASE("cutoff integral identity") {
  // int_0^eps (ln eps / eps) kappa(t/eps) dt = ln(eps) * int_0^1 kappa.
  auto kappa = EdgeFunction::polynomial({2.0, 1.0, -0.5}, 0.0, 1.0);
  CoulombSpec q((Eigen::VectorXd(1) << 1.0).finished());
  for (double eps : {0.5, 0.1, 0.01}) {
    const int m = 20000;
    double acc = 0.0;
    const double h = eps / m;
    for (int i = 0; i < m; ++i) {
      const double a = i * h, b = a + h;
      acc += 0.5 * h *
             (eval_Qeps(q, kappa, eps, 0, a == 0.0 ? 1e-300 : a) +
              eval_Qeps(q, kappa, eps, 0, b * (1.0 - 1e-15)));
    }
    CHECK(std::abs(acc - std::log(eps) * kappa.integral()) < 1e-8);
  }
}

}  // TEST_SUITE
