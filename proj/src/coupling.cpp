#include "stargraph/coupling.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>

namespace stargraph {

namespace {

// Gram-type matrix with weight w: G_ij = int w psi^(j) conj(psi^(i)).
// Midpoint value of the weight times the interpolated product on each cell;
// exact when the weight is piecewise constant w.r.t. the mesh and the basis
// is piecewise linear.
Eigen::MatrixXcd weighted_gram(const ResonanceData& res,
                               const std::vector<EdgeFunction>& weight) {
  const int r = res.r;
  Eigen::MatrixXcd G = Eigen::MatrixXcd::Zero(r, r);
  for (int k = 0; k < res.n; ++k) {
    const auto& nodes = res.core_mesh->edges[static_cast<std::size_t>(k)].nodes;
    const auto& w = weight[static_cast<std::size_t>(k)];
    if (w.is_zero()) continue;
    for (std::size_t c = 0; c + 1 < nodes.size(); ++c) {
      const double h = nodes[c + 1] - nodes[c];
      const double wm = w(0.5 * (nodes[c] + nodes[c + 1]));
      if (wm == 0.0) continue;
      for (int i = 0; i < r; ++i) {
        const auto& yi = res.basis[static_cast<std::size_t>(i)].edge(k);
        const Complex mi = 0.5 * (yi[static_cast<Eigen::Index>(c)] +
                                  yi[static_cast<Eigen::Index>(c + 1)]);
        for (int j = 0; j < r; ++j) {
          const auto& yj = res.basis[static_cast<std::size_t>(j)].edge(k);
          const Complex mj = 0.5 * (yj[static_cast<Eigen::Index>(c)] +
                                    yj[static_cast<Eigen::Index>(c + 1)]);
          G(i, j) += h * wm * mj * std::conj(mi);
        }
      }
    }
  }
  return 0.5 * (G + G.adjoint().eval());
}

}  // namespace

CouplingMatrices build_matrices(const ResonanceData& res, const ShortRangeSpec& spec,
                                const CoulombSpec& coulomb) {
  if (spec.n != res.n)
    throw std::invalid_argument("build_matrices: edge count mismatch");
  if (coulomb.n() != 0 && coulomb.n() != res.n)
    throw std::invalid_argument("build_matrices: coulomb size mismatch");

  CouplingMatrices cm;
  cm.n = res.n;
  cm.r = res.r;
  cm.L = res.L;
  cm.M = weighted_gram(res, spec.U);
  cm.N = weighted_gram(res, spec.kappa);
  cm.K = coulomb.n() == 0 ? Eigen::MatrixXd::Zero(res.n, res.n).eval()
                          : Eigen::MatrixXd(coulomb.q.asDiagonal());

  if (cm.r > 0) {
    cm.Lplus = (cm.L.adjoint() * cm.L).ldlt().solve(cm.L.adjoint());
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(cm.L, Eigen::ComputeFullU);
    cm.R = svd.matrixU().rightCols(cm.n - cm.r);
  } else {
    cm.Lplus.resize(0, cm.n);
    cm.R = Eigen::MatrixXcd::Identity(cm.n, cm.n);
  }
  return cm;
}

ConvergenceCheck check_convergence_condition(const CouplingMatrices& cm, double tol) {
  ConvergenceCheck out;
  if (cm.r == 0) {
    out.holds = true;  // ran L = {0}, trivially contained
    return out;
  }
  const Eigen::MatrixXcd D = cm.N * cm.Lplus - cm.L.adjoint() * cm.K;
  out.residual = (D * cm.L).norm();
  out.scale = std::max({1.0, (cm.N * cm.Lplus * cm.L).norm(),
                        (cm.L.adjoint() * cm.K * cm.L).norm()});
  out.holds = out.residual <= tol * out.scale;
  return out;
}

VertexConditions assemble_vertex_conditions(const CouplingMatrices& cm) {
  VertexConditions vc;
  const int n = cm.n, r = cm.r;
  if (r == 0) {
    vc.A = Eigen::MatrixXcd::Identity(n, n);
    vc.B = Eigen::MatrixXcd::Zero(n, n);
    vc.kind = CouplingKind::DirichletSum;
    return vc;
  }
  vc.A.resize(n, n);
  vc.B = Eigen::MatrixXcd::Zero(n, n);
  vc.A.topRows(n - r) = cm.R.adjoint();
  vc.A.bottomRows(r) = cm.M * cm.Lplus;
  vc.B.bottomRows(r) = -cm.L.adjoint();

  const bool has_q = cm.K.diagonal().cwiseAbs().maxCoeff() > 0.0;
  const bool ones =
      r == 1 && (cm.L - Eigen::MatrixXcd::Ones(n, 1)).norm() < 1e-8;
  if (has_q)
    vc.kind = CouplingKind::CoulombQuasi;
  else if (cm.M.norm() < 1e-12)
    vc.kind = CouplingKind::ScaleInvariant;
  else if (ones)
    vc.kind = CouplingKind::Delta;
  else
    vc.kind = CouplingKind::Generic;
  return vc;
}

VertexConditions dirichlet_conditions(int n) {
  VertexConditions vc;
  vc.A = Eigen::MatrixXcd::Identity(n, n);
  vc.B = Eigen::MatrixXcd::Zero(n, n);
  vc.kind = CouplingKind::DirichletSum;
  return vc;
}

VertexConditions delta_conditions(int n, double alpha) {
  VertexConditions vc;
  vc.A = Eigen::MatrixXcd::Zero(n, n);
  vc.B = Eigen::MatrixXcd::Zero(n, n);
  for (int i = 0; i + 1 < n; ++i) {
    vc.A(i, i) = 1.0;
    vc.A(i, i + 1) = -1.0;
  }
  vc.A(n - 1, 0) = alpha;
  vc.B.row(n - 1).setConstant(-1.0);
  vc.kind = CouplingKind::Delta;
  return vc;
}

bool check_self_adjoint(const VertexConditions& vc, double tol) {
  const int n = vc.n();
  Eigen::MatrixXcd AB(n, 2 * n);
  AB << vc.A, vc.B;
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(AB);
  const auto& s = svd.singularValues();
  if (s[n - 1] <= tol * s[0]) return false;
  const Eigen::MatrixXcd H = vc.A * vc.B.adjoint();
  const double scale = std::max(1.0, vc.A.norm() * vc.B.norm());
  return (H - H.adjoint()).norm() <= tol * scale;
}

Eigen::MatrixXcd kernel_basis(const Eigen::MatrixXcd& A, double tol) {
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(A, Eigen::ComputeFullV);
  const auto& s = svd.singularValues();
  const double smax = s.size() > 0 ? s[0] : 0.0;
  int rank = 0;
  for (int i = 0; i < s.size(); ++i)
    if (s[i] > tol * smax) ++rank;
  return svd.matrixV().rightCols(A.cols() - rank);
}

Eigen::MatrixXcd orthonormal_columns(const Eigen::MatrixXcd& A, double tol) {
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(A, Eigen::ComputeThinU);
  const auto& s = svd.singularValues();
  const double smax = s.size() > 0 ? s[0] : 0.0;
  int rank = 0;
  for (int i = 0; i < s.size(); ++i)
    if (s[i] > tol * smax) ++rank;
  return svd.matrixU().leftCols(rank);
}

double subspace_angle_sin(const Eigen::MatrixXcd& U1, const Eigen::MatrixXcd& U2) {
  if (U1.cols() != U2.cols())
    throw std::invalid_argument("subspace_angle_sin: dimension mismatch");
  if (U1.cols() == 0) return 0.0;
  const Eigen::MatrixXcd Q1 = orthonormal_columns(U1);
  const Eigen::MatrixXcd Q2 = orthonormal_columns(U2);
  const Eigen::MatrixXcd D = Q2 - Q1 * (Q1.adjoint() * Q2);
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(D);
  return svd.singularValues()[0];
}

Eigen::MatrixXcd condition_kernel(const VertexConditions& vc) {
  const int n = vc.n();
  Eigen::MatrixXcd AB(n, 2 * n);
  AB << vc.A, vc.B;
  return kernel_basis(AB);
}

BasisChangeReport basis_change_invariance_check(const ResonanceData& res,
                                                const ShortRangeSpec& spec,
                                                const CoulombSpec& coulomb,
                                                const Eigen::MatrixXcd& X,
                                                double tol) {
  if (X.rows() != res.r || X.cols() != res.r)
    throw std::invalid_argument("basis_change_invariance_check: X must be r x r");
  {
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(X);
    const auto& s = svd.singularValues();
    if (res.r > 0 && s[res.r - 1] <= 1e-12 * s[0])
      throw std::invalid_argument("basis_change_invariance_check: X is singular");
  }

  ResonanceData hat = res;
  hat.L = res.L * X;
  hat.basis.clear();
  for (int j = 0; j < res.r; ++j) {
    GridFunction psi(res.core_mesh);
    for (int k = 0; k < res.n; ++k) {
      psi.edge(k).setZero(res.basis[0].edge(k).size());
      for (int i = 0; i < res.r; ++i)
        psi.edge(k) += X(i, j) * res.basis[static_cast<std::size_t>(i)].edge(k);
    }
    hat.basis.push_back(std::move(psi));
  }

  const CouplingMatrices cm = build_matrices(res, spec, coulomb);
  const CouplingMatrices cmh = build_matrices(hat, spec, coulomb);

  BasisChangeReport rep;
  if (res.r > 0) {
    const Eigen::MatrixXcd DL = (cm.N * cm.Lplus - cm.L.adjoint() * cm.K) * cm.L;
    const Eigen::MatrixXcd DLh =
        (cmh.N * cmh.Lplus - cmh.L.adjoint() * cmh.K) * cmh.L;
    rep.transform_residual = (DLh - X.adjoint() * DL * X).norm() /
                             std::max(1.0, DL.norm() * X.norm() * X.norm());
  }
  rep.verdicts_equal = check_convergence_condition(cm).holds ==
                       check_convergence_condition(cmh).holds;
  const Eigen::MatrixXcd ker1 = condition_kernel(assemble_vertex_conditions(cm));
  const Eigen::MatrixXcd ker2 = condition_kernel(assemble_vertex_conditions(cmh));
  rep.subspace_angle_sin = subspace_angle_sin(ker1, ker2);
  rep.subspaces_equal = rep.subspace_angle_sin <= tol;
  return rep;
}

DecompositionReport decompose(const ResonanceData& res, double tol) {
  DecompositionReport rep;
  const int n = res.n, r = res.r;
  if (r == 0) {
    rep.non_resonant_edges.resize(static_cast<std::size_t>(n));
    std::iota(rep.non_resonant_edges.begin(), rep.non_resonant_edges.end(), 0);
    rep.exact = true;
    return rep;
  }

  // Column-wise Gauss-Jordan with full pivoting to sparsify the support
  // pattern of L.
  Eigen::MatrixXcd Lp = res.L;
  std::vector<bool> used_row(static_cast<std::size_t>(n), false);
  for (int s = 0; s < r; ++s) {
    int pi = -1, pj = -1;
    double best = 0.0;
    for (int i = 0; i < n; ++i) {
      if (used_row[static_cast<std::size_t>(i)]) continue;
      for (int j = s; j < r; ++j)
        if (std::abs(Lp(i, j)) > best) {
          best = std::abs(Lp(i, j));
          pi = i;
          pj = j;
        }
    }
    if (pi < 0) break;
    Lp.col(s).swap(Lp.col(pj));
    used_row[static_cast<std::size_t>(pi)] = true;
    for (int j = 0; j < r; ++j) {
      if (j == s) continue;
      Lp.col(j) -= (Lp(pi, j) / Lp(pi, s)) * Lp.col(s);
    }
  }

  const double lmax = Lp.cwiseAbs().maxCoeff();
  auto touched = [&](int i, int j) { return std::abs(Lp(i, j)) > tol * lmax; };

  // Edges with no support in any rotated basis column are non-resonant.
  std::vector<int> parent(static_cast<std::size_t>(n));
  std::iota(parent.begin(), parent.end(), 0);
  std::function<int(int)> find = [&](int x) {
    return parent[static_cast<std::size_t>(x)] == x
               ? x
               : parent[static_cast<std::size_t>(x)] =
                     find(parent[static_cast<std::size_t>(x)]);
  };

  std::vector<std::vector<int>> col_edges(static_cast<std::size_t>(r));
  for (int j = 0; j < r; ++j)
    for (int i = 0; i < n; ++i)
      if (touched(i, j)) col_edges[static_cast<std::size_t>(j)].push_back(i);

  for (const auto& es : col_edges)
    for (std::size_t t = 1; t < es.size(); ++t)
      parent[static_cast<std::size_t>(find(es[t]))] = find(es[0]);

  std::vector<bool> resonant(static_cast<std::size_t>(n), false);
  for (const auto& es : col_edges)
    for (int e : es) resonant[static_cast<std::size_t>(e)] = true;

  std::vector<int> root_to_block(static_cast<std::size_t>(n), -1);
  for (int i = 0; i < n; ++i) {
    if (!resonant[static_cast<std::size_t>(i)]) {
      rep.non_resonant_edges.push_back(i);
      continue;
    }
    const int rt = find(i);
    if (root_to_block[static_cast<std::size_t>(rt)] < 0) {
      root_to_block[static_cast<std::size_t>(rt)] = static_cast<int>(rep.blocks.size());
      rep.blocks.emplace_back();
    }
    rep.blocks[static_cast<std::size_t>(root_to_block[static_cast<std::size_t>(rt)])]
        .push_back(i);
  }
  rep.block_dims.assign(rep.blocks.size(), 0);
  for (int j = 0; j < r; ++j) {
    if (col_edges[static_cast<std::size_t>(j)].empty()) continue;
    const int rt = find(col_edges[static_cast<std::size_t>(j)][0]);
    ++rep.block_dims[static_cast<std::size_t>(
        root_to_block[static_cast<std::size_t>(rt)])];
  }

  // Exactness: suppressed entries must sit far below the retained ones.
  double off_max = 0.0, on_min = lmax;
  for (int j = 0; j < r; ++j)
    for (int i = 0; i < n; ++i) {
      const double a = std::abs(Lp(i, j));
      if (touched(i, j))
        on_min = std::min(on_min, a);
      else
        off_max = std::max(off_max, a);
    }
  rep.exact = off_max <= 1e-2 * tol * lmax || off_max <= 1e-4 * on_min;
  return rep;
}

}  // namespace stargraph
