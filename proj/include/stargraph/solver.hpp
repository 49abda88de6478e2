#pragma once

#include <Eigen/SparseCore>

#include "stargraph/coupling.hpp"
#include "stargraph/graph.hpp"
#include "stargraph/potentials.hpp"

namespace stargraph {

/// Right-hand side f, one real profile per edge.
struct Source {
  std::vector<EdgeFunction> f;

  Source() = default;
  explicit Source(std::vector<EdgeFunction> f_) : f(std::move(f_)) {}
  /// f = profile on one edge, zero elsewhere.
  static Source on_edge(int n, int edge, EdgeFunction profile);
  int n() const { return static_cast<int>(f.size()); }
  double operator()(int edge, double tau) const { return f.at(edge)(tau); }
  GridFunction sample(std::shared_ptr<const GraphMesh> mesh) const;
};

/// Mesh and truncation policy for the resolvent solvers.
struct MeshPolicy {
  double T = 0.0;            // 0 -> default 8 / Re sqrt(-zeta)
  double h_interior = 1.0 / 512;  // target step away from the vertex
  double eps_refine = 20.0;  // step <= eps / eps_refine inside the core
  double min_step = 1e-7;    // graded-mesh floor near the Coulomb vertex
  double grade_ratio = 1.12; // geometric growth of the graded mesh
  double match_point = 1e-2; // series matching radius for the limit solver
  double ode_rtol = 1e-10;
  double ode_atol = 1e-13;
  // Model the truncated operator (y(T) = 0) instead of the decaying solution
  // on the half-line; used for like-for-like sweep comparisons.
  bool dirichlet_truncation = false;

  double truncation(Complex zeta) const;
};

/// sqrt(-zeta) on the branch with positive real part.
Complex decay_rate(Complex zeta);

struct RegularizedSolution {
  GridFunction y;
  double residual = 0.0;  // algebraic residual of the discrete system
};

/// Vertex data of a limit solution: values phi(a), quasi-derivatives
/// phi^[1](a), and the residual of the local extraction.
struct QuasiDerivativeData {
  Eigen::VectorXcd values;
  Eigen::VectorXcd qderivs;
  std::pair<double, double> fit_window{0.0, 0.0};
  double fit_residual = 0.0;
};

struct LimitSolution {
  GridFunction y;
  QuasiDerivativeData qd;
  double vertex_residual = 0.0;    // || A phi(a) + B phi^[1](a) ||
  double interior_residual = 0.0;  // finite-difference ODE check
};

/// Finite-difference discretization of (H_eps - zeta) y = f on the truncated
/// graph with Kirchhoff coupling at the vertex and Dirichlet at T. Exposed so
/// the sparse solve can be cross-checked against a dense one.
struct RegularizedSystem {
  Eigen::SparseMatrix<Complex> A;
  Eigen::VectorXcd rhs;
  std::shared_ptr<const GraphMesh> mesh;
  // Unknown layout: index 0 is the common vertex value, then interior nodes
  // edge by edge (node T is eliminated by the Dirichlet condition).
  std::vector<int> edge_offset;  // first unknown of edge k's interior nodes
};

RegularizedSystem assemble_regularized(const RegularizedPotential& p,
                                       const Source& f, Complex zeta,
                                       const MeshPolicy& policy = {});

RegularizedSolution solve_regularized(const RegularizedPotential& p,
                                      const Source& f, Complex zeta,
                                      const MeshPolicy& policy = {});

/// Resolvent of the limit operator: -y'' + Q y = zeta y + f subject to
/// A y(0) + B y^[1](0) = 0. Decaying homogeneous/particular solutions are
/// integrated inward from T; vertex data is obtained by matching a local
/// series expansion at `policy.match_point`.
LimitSolution solve_limit(const CoulombSpec& coulomb, const VertexConditions& vc,
                          const Source& f, Complex zeta,
                          const MeshPolicy& policy = {});

/// Fully decoupled operator: per-edge solve with y_k(0) = 0.
LimitSolution solve_dirichlet_sum(const CoulombSpec& coulomb, const Source& f,
                                  Complex zeta, const MeshPolicy& policy = {});

/// Least-squares fit of the numerically differentiated y'(tau) against
/// q_k y0 ln(tau) + b over the window; returns b and the rms fit residual.
/// Requires at least 4 nodes in the window.
std::pair<Complex, double> extract_quasi_derivative(
    const std::vector<double>& tau, const Eigen::VectorXcd& y, double q_k,
    Complex y0, std::pair<double, double> window);

/// Writes a solution as per-edge CSV rows (edge, tau, re, im).
void write_solution_csv(const GridFunction& y, const std::string& path);

}  // namespace stargraph
