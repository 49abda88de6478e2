#pragma once

#include "stargraph/resonance.hpp"

namespace stargraph {

/// The matrices entering the limit vertex conditions: the Gram-type matrices
/// M (weight U) and N (weight kappa) on the half-bound-state basis, the
/// Coulomb diagonal K = diag(q), the boundary-value matrix L with its left
/// pseudoinverse, and an orthonormal basis R of the complement of ran L.
struct CouplingMatrices {
  Eigen::MatrixXcd M;      // r x r Hermitian
  Eigen::MatrixXcd N;      // r x r Hermitian
  Eigen::MatrixXd K;       // n x n diagonal
  Eigen::MatrixXcd L;      // n x r
  Eigen::MatrixXcd Lplus;  // r x n, Lplus * L = I_r
  Eigen::MatrixXcd R;      // n x (n - r), R^* L = 0, orthonormal columns
  int n = 0, r = 0;
};

CouplingMatrices build_matrices(const ResonanceData& res,
                                const ShortRangeSpec& spec,
                                const CoulombSpec& coulomb);

/// Result of testing the inclusion ran L = R_V inside ker(N L^+ - L^* K).
struct ConvergenceCheck {
  bool holds = false;
  double residual = 0.0;  // ||(N L^+ - L^* K) L||_F
  double scale = 1.0;     // normalization used for the comparison
};

ConvergenceCheck check_convergence_condition(const CouplingMatrices& cm,
                                             double tol = 1e-8);

enum class CouplingKind {
  Generic,
  Delta,
  ScaleInvariant,
  CoulombQuasi,
  DirichletSum
};

/// Vertex conditions A phi(a) + B phi^[1](a) = 0.
struct VertexConditions {
  Eigen::MatrixXcd A, B;
  CouplingKind kind = CouplingKind::Generic;
  int n() const { return static_cast<int>(A.rows()); }
};

/// Stacks R^* over M L^+ (matrix A) and 0 over -L^* (matrix B), realizing
/// phi(a) in R_V together with M L^+ phi(a) - L^* phi^[1](a) = 0.
VertexConditions assemble_vertex_conditions(const CouplingMatrices& cm);

/// Explicit Dirichlet decoupling (A = I, B = 0).
VertexConditions dirichlet_conditions(int n);

/// Continuity plus sum-rule coupling of strength `alpha`:
/// phi_1(a) = ... = phi_n(a), sum phi^[1]_k(a) = alpha phi_1(a).
VertexConditions delta_conditions(int n, double alpha);

/// Maximal rank of (A B) and Hermiticity of A B^*.
bool check_self_adjoint(const VertexConditions& vc, double tol = 1e-10);

struct BasisChangeReport {
  double transform_residual = 0.0;   // || X^*(N L^+ - L^* K) L - transformed ||
  double subspace_angle_sin = 0.0;   // largest principal angle (sine) between
                                     // the two condition kernels in C^{2n}
  bool verdicts_equal = false;       // convergence-condition booleans agree
  bool subspaces_equal = false;
};

/// Recomputes everything in the basis transformed by X and verifies that the
/// convergence-condition kernel and the assembled condition subspace are
/// unchanged.
BasisChangeReport basis_change_invariance_check(const ResonanceData& res,
                                                const ShortRangeSpec& spec,
                                                const CoulombSpec& coulomb,
                                                const Eigen::MatrixXcd& X,
                                                double tol = 1e-9);

struct DecompositionReport {
  std::vector<int> non_resonant_edges;        // E_0 (0-based indices)
  std::vector<std::vector<int>> blocks;       // E_1, ..., E_m
  std::vector<int> block_dims;                // dim X(E_k)
  bool exact = false;  // rotated basis is block-exact to tolerance
};

/// Detects the resonant decomposition from the support pattern of L after a
/// sparsifying basis rotation. Heuristic; `exact` reports whether the rotated
/// basis separates cleanly at the tolerance.
DecompositionReport decompose(const ResonanceData& res, double tol = 1e-8);

// --- small subspace utilities shared by tests ---

/// Orthonormal basis of the nullspace of A (columns).
Eigen::MatrixXcd kernel_basis(const Eigen::MatrixXcd& A, double tol = 1e-10);

/// Orthonormal basis of the column span.
Eigen::MatrixXcd orthonormal_columns(const Eigen::MatrixXcd& A,
                                     double tol = 1e-12);

/// Sine of the largest principal angle between the column spans of U1, U2
/// (computed from projections, accurate for small angles).
double subspace_angle_sin(const Eigen::MatrixXcd& U1,
                          const Eigen::MatrixXcd& U2);

/// Orthonormal basis (2n x n) of the kernel of the n x 2n block (A B):
/// the subspace of C^{2n} of admissible (phi(a), phi^[1](a)) pairs.
Eigen::MatrixXcd condition_kernel(const VertexConditions& vc);

}  // namespace stargraph
