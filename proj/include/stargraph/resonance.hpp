#pragma once

#include "stargraph/graph.hpp"
#include "stargraph/potentials.hpp"

namespace stargraph {

/// The compact core: n edges of unit length sharing the central vertex.
/// Short-range potentials live entirely inside it.
struct CoreGraph {
  int n = 0;
  explicit CoreGraph(int edge_count) : n(edge_count) {
    if (n < 2) throw std::invalid_argument("CoreGraph: need at least 2 edges");
  }
};

/// Zero-energy resonance data: dimension r of the half-bound-state space,
/// a basis of it sampled on the core graph, and the n x r matrix L of
/// boundary (= asymptotic) values.
struct ResonanceData {
  int n = 0;
  int r = 0;
  std::shared_ptr<const GraphMesh> core_mesh;
  std::vector<GridFunction> basis;   // r functions, orthogonal in L2(core)
  Eigen::MatrixXcd L;                // n x r, full column rank
  Eigen::VectorXd singular_values;   // diagnostics from nullspace detection
  double tol = 0.0;                  // threshold used
};

/// Solves the core boundary value problem -psi'' + V psi = 0 with Kirchhoff
/// conditions at the center and psi' = 0 on the outer boundary, by shooting
/// from each boundary vertex. The nullspace dimension r is detected by
/// singular-value thresholding at `tol` (relative to the largest singular
/// value). Basis functions are orthogonalized in L2 on the core and scaled so
/// the largest boundary value equals 1.
ResonanceData solve_half_bound_states(const ShortRangeSpec& spec,
                                      double tol = 1e-9);

/// ell applied to the combination sum coeffs_j psi^(j): returns L * coeffs.
Eigen::VectorXcd ell_map(const ResonanceData& data,
                         const Eigen::VectorXcd& coeffs);

/// True iff the smallest singular value of L exceeds tol, i.e. ell is an
/// injection of the computed basis into C^n.
bool is_injective_ell(const ResonanceData& data, double tol = 1e-9);

/// Residual diagnostics for a computed basis function: L2 norm of
/// -psi'' + V psi (finite differences) and boundary derivative magnitude.
struct BasisResidual {
  double interior;  // ||-psi'' + V psi|| / ||psi||
  double boundary;  // max_k |psi'(a_k)|
};
BasisResidual basis_residual(const ResonanceData& data, const ShortRangeSpec& spec,
                             int j);

}  // namespace stargraph
