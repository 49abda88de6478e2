#include <doctest.h>

#include <cmath>
#include <random>

#include "stargraph/coupling.hpp"

using namespace stargraph;

namespace {

const double kPi = M_PI;

ShortRangeSpec spec3(EdgeFunction kappa, EdgeFunction U, EdgeFunction V) {
  return ShortRangeSpec(3, std::move(kappa), std::move(U), std::move(V));
}

// Symplectic form on the kernel of (A B): must vanish for self-adjoint
// conditions.
double green_identity_residual(const VertexConditions& vc) {
  const Eigen::MatrixXcd K = condition_kernel(vc);
  const int n = vc.n();
  const Eigen::MatrixXcd Phi = K.topRows(n), D = K.bottomRows(n);
  return (D.adjoint() * Phi - Phi.adjoint() * D).norm();
}

ShortRangeSpec random_spec(std::mt19937& rng, int n, bool force_resonant) {
  std::uniform_real_distribution<double> uval(-6.0, 6.0);
  std::uniform_real_distribution<double> uknot(0.1, 0.9);
  std::uniform_int_distribution<int> pieces(1, 3);
  auto rand_fn = [&]() {
    const int m = pieces(rng);
    std::vector<double> knots{0.0};
    for (int i = 1; i < m; ++i) knots.push_back(uknot(rng));
    knots.push_back(1.0);
    std::sort(knots.begin(), knots.end());
    std::vector<double> vals;
    for (int i = 0; i < m; ++i) vals.push_back(uval(rng));
    return EdgeFunction::piecewise_constant(knots, vals);
  };
  std::vector<EdgeFunction> kap, U, V;
  for (int k = 0; k < n; ++k) {
    kap.push_back(rand_fn());
    U.push_back(rand_fn());
    V.push_back(force_resonant ? EdgeFunction::constant(-kPi * kPi / 4)
                               : rand_fn());
  }
  return ShortRangeSpec(std::move(kap), std::move(U), std::move(V));
}

}  // namespace

TEST_SUITE("coupling") {

TEST_CASE("matrices of the delta scenario") {
  auto res = solve_half_bound_states(
      spec3(EdgeFunction::zero(), EdgeFunction::constant(0.7), EdgeFunction::zero()));
  auto cm = build_matrices(res,
                           spec3(EdgeFunction::zero(), EdgeFunction::constant(0.7),
                                 EdgeFunction::zero()),
                           CoulombSpec::zeros(3));
  REQUIRE(cm.r == 1);
  CHECK(std::abs(cm.M(0, 0) - Complex(3 * 0.7, 0.0)) < 1e-12);
  CHECK((cm.Lplus - Eigen::MatrixXcd::Constant(1, 3, 1.0 / 3)).cwiseAbs().maxCoeff() <
        1e-12);
  CHECK((cm.Lplus * cm.L - Eigen::MatrixXcd::Identity(1, 1)).norm() < 1e-13);
  CHECK((cm.R.adjoint() * cm.L).norm() < 1e-12);
  CHECK((cm.M - cm.M.adjoint()).norm() < 1e-12);
  CHECK((cm.N - cm.N.adjoint()).norm() < 1e-12);
}

TEST_CASE("zero weights give zero Gram matrices") {
  auto sr = spec3(EdgeFunction::zero(), EdgeFunction::zero(), EdgeFunction::zero());
  auto res = solve_half_bound_states(sr);
  auto cm = build_matrices(res, sr, CoulombSpec::zeros(3));
  CHECK(cm.M.norm() == 0.0);
  CHECK(cm.N.norm() == 0.0);
}

TEST_CASE("convergence condition: Coulomb balance") {
  // sum q_k = 6 against kappa with total integral 6: holds.
  auto sr = spec3(EdgeFunction::constant(2.0), EdgeFunction::constant(1.0),
                  EdgeFunction::zero());
  auto res = solve_half_bound_states(sr);
  CoulombSpec q((Eigen::VectorXd(3) << 1, 2, 3).finished());
  CHECK(check_convergence_condition(build_matrices(res, sr, q)).holds);

  // Same q, kappa = 0: violated.
  auto sr0 = spec3(EdgeFunction::zero(), EdgeFunction::constant(1.0),
                   EdgeFunction::zero());
  auto cc = check_convergence_condition(
      build_matrices(solve_half_bound_states(sr0), sr0, q));
  CHECK_FALSE(cc.holds);
  CHECK(cc.residual == doctest::Approx(6.0));
}

TEST_CASE("convergence condition: no Coulomb part is always fine") {
  for (double v : {0.0, -kPi * kPi / 4, 10.0}) {
    auto sr = spec3(EdgeFunction::zero(), EdgeFunction::constant(1.0),
                    EdgeFunction::constant(v));
    auto res = solve_half_bound_states(sr);
    CHECK(check_convergence_condition(build_matrices(res, sr, CoulombSpec::zeros(3)))
              .holds);
  }
}

TEST_CASE("convergence condition on the line (n = 2)") {
  auto sr = ShortRangeSpec::none(2);
  auto res = solve_half_bound_states(sr);
  // Symmetric cutoff family: both coupling constants negative, no kappa cap.
  CoulombSpec cutoff((Eigen::VectorXd(2) << -1.0, -1.0).finished());
  CHECK_FALSE(check_convergence_condition(build_matrices(res, sr, cutoff)).holds);
  // Odd potential on the line: the two constants balance.
  CoulombSpec odd((Eigen::VectorXd(2) << -1.0, 1.0).finished());
  CHECK(check_convergence_condition(build_matrices(res, sr, odd)).holds);
}

TEST_CASE("delta conditions kernel") {
  const double u0 = 1.7;
  auto sr = spec3(EdgeFunction::zero(), EdgeFunction::constant(u0 / 3.0),
                  EdgeFunction::zero());
  auto res = solve_half_bound_states(sr);
  auto vc = assemble_vertex_conditions(build_matrices(res, sr, CoulombSpec::zeros(3)));
  CHECK(vc.kind == CouplingKind::Delta);

  // Kernel of (A B) = {(c 1, d) : sum d = u0 c}.
  Eigen::MatrixXcd expect = Eigen::MatrixXcd::Zero(6, 3);
  expect.col(0) << 1, 1, 1, u0, 0, 0;
  expect.col(1) << 0, 0, 0, 1, -1, 0;
  expect.col(2) << 0, 0, 0, 0, 1, -1;
  CHECK(subspace_angle_sin(condition_kernel(vc), expect) < 1e-9);
}

TEST_CASE("scale-invariant conditions for the resonant delta-prime case") {
  auto sr = spec3(EdgeFunction::zero(), EdgeFunction::zero(),
                  EdgeFunction::constant(-kPi * kPi / 4));
  auto res = solve_half_bound_states(sr);
  auto cm = build_matrices(res, sr, CoulombSpec::zeros(3));
  auto vc = assemble_vertex_conditions(cm);
  CHECK(vc.kind == CouplingKind::ScaleInvariant);

  // phi(a) in ran L, phi'(a) orthogonal to it.
  Eigen::MatrixXcd expect = Eigen::MatrixXcd::Zero(6, 3);
  expect.block(0, 0, 3, 2) = cm.L;
  expect.block(3, 2, 3, 1) = cm.R;
  CHECK(subspace_angle_sin(condition_kernel(vc), expect) < 1e-9);
}

TEST_CASE("non-resonant potential decouples to Dirichlet") {
  auto sr = spec3(EdgeFunction::zero(), EdgeFunction::constant(1.0),
                  EdgeFunction::constant(10.0));
  auto res = solve_half_bound_states(sr);
  auto vc = assemble_vertex_conditions(build_matrices(res, sr, CoulombSpec::zeros(3)));
  CHECK(vc.kind == CouplingKind::DirichletSum);
  CHECK((vc.A - Eigen::MatrixXcd::Identity(3, 3)).norm() == 0.0);
  CHECK(vc.B.norm() == 0.0);
}

TEST_CASE("check_self_adjoint") {
  const int n = 3;
  VertexConditions dir = dirichlet_conditions(n);
  CHECK(check_self_adjoint(dir));
  VertexConditions neumann;
  neumann.A = Eigen::MatrixXcd::Zero(n, n);
  neumann.B = Eigen::MatrixXcd::Identity(n, n);
  CHECK(check_self_adjoint(neumann));
  VertexConditions bad;
  bad.A = Eigen::MatrixXcd::Identity(n, n);
  bad.B = Complex(0.0, 1.0) * Eigen::MatrixXcd::Identity(n, n);
  CHECK_FALSE(check_self_adjoint(bad));
  VertexConditions rank_deficient;
  rank_deficient.A = Eigen::MatrixXcd::Zero(n, n);
  rank_deficient.B = Eigen::MatrixXcd::Zero(n, n);
  rank_deficient.A(0, 0) = 1.0;
  CHECK_FALSE(check_self_adjoint(rank_deficient));
}

TEST_CASE("randomized scenarios are self-adjoint and satisfy the Green identity") {
  std::mt19937 rng(20260826);
  std::uniform_int_distribution<int> edges(2, 4);
  std::uniform_real_distribution<double> qval(-3.0, 3.0);
  for (int trial = 0; trial < 60; ++trial) {
    const int n = edges(rng);
    auto sr = random_spec(rng, n, trial % 2 == 0);
    Eigen::VectorXd q(n);
    for (int k = 0; k < n; ++k) q[k] = qval(rng);
    auto res = solve_half_bound_states(sr);
    auto vc = assemble_vertex_conditions(build_matrices(res, sr, CoulombSpec(q)));
    CHECK(check_self_adjoint(vc));
    CHECK(green_identity_residual(vc) < 1e-10);
  }
}

TEST_CASE("basis change invariance") {
  auto sr = spec3(EdgeFunction::constant(0.5), EdgeFunction::constant(1.0),
                  EdgeFunction::constant(-kPi * kPi / 4));
  auto res = solve_half_bound_states(sr);
  CoulombSpec q((Eigen::VectorXd(3) << 0.5, -1.0, 2.0).finished());

  auto rep = basis_change_invariance_check(res, sr, q,
                                           Eigen::MatrixXcd::Identity(2, 2));
  CHECK(rep.transform_residual < 1e-14);
  CHECK(rep.subspace_angle_sin < 1e-12);

  rep = basis_change_invariance_check(res, sr, q,
                                      2.0 * Eigen::MatrixXcd::Identity(2, 2));
  CHECK(rep.subspaces_equal);
  CHECK(rep.verdicts_equal);

  std::mt19937 rng(7);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int trial = 0; trial < 5; ++trial) {
    Eigen::MatrixXcd X(2, 2);
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) X(i, j) = Complex(u(rng), u(rng));
    X += 2.0 * Eigen::MatrixXcd::Identity(2, 2);  // keep well-conditioned
    auto r2 = basis_change_invariance_check(res, sr, q, X);
    CHECK(r2.subspaces_equal);
    CHECK(r2.verdicts_equal);
    CHECK(r2.transform_residual < 1e-9);
  }

  CHECK_THROWS_AS(basis_change_invariance_check(res, sr, q,
                                                Eigen::MatrixXcd::Zero(2, 2)),
                  std::invalid_argument);
}

TEST_CASE("decompose") {
  // Fully resonant with the constant state: one block with every edge.
  auto sr0 = spec3(EdgeFunction::zero(), EdgeFunction::zero(), EdgeFunction::zero());
  auto rep0 = decompose(solve_half_bound_states(sr0));
  CHECK(rep0.non_resonant_edges.empty());
  REQUIRE(rep0.blocks.size() == 1);
  CHECK(rep0.blocks[0] == std::vector<int>{0, 1, 2});

  // Non-resonant: everything in E0.
  auto srn = spec3(EdgeFunction::zero(), EdgeFunction::zero(),
                   EdgeFunction::constant(10.0));
  auto repn = decompose(solve_half_bound_states(srn));
  CHECK(repn.blocks.empty());
  CHECK(repn.non_resonant_edges == std::vector<int>{0, 1, 2});

  // Mixed 4-edge case: resonant pair {0,1}, decoupled pair {2,3}.
  const EdgeFunction vres = EdgeFunction::constant(-kPi * kPi / 4);
  const EdgeFunction voff = EdgeFunction::constant(10.0);
  ShortRangeSpec mixed(std::vector<EdgeFunction>(4, EdgeFunction::zero()),
                       std::vector<EdgeFunction>(4, EdgeFunction::zero()),
                       std::vector<EdgeFunction>{vres, vres, voff, voff});
  auto rep = decompose(solve_half_bound_states(mixed));
  CHECK(rep.non_resonant_edges == std::vector<int>{2, 3});
  REQUIRE(rep.blocks.size() == 1);
  CHECK(rep.blocks[0] == std::vector<int>{0, 1});
  CHECK(rep.block_dims == std::vector<int>{1});
  CHECK(rep.exact);
}

}  // TEST_SUITE
