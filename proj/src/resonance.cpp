#include "stargraph/resonance.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "detail/ode.hpp"

namespace stargraph {

namespace {

constexpr int kCoreCells = 1024;

// Uniform grid on [0, 1] merged with the breakpoints of every short-range
// descriptor on that edge, so piecewise-constant data is constant on cells.
std::vector<double> core_nodes(const ShortRangeSpec& spec, int k) {
  std::set<double> pts;
  for (int i = 0; i <= kCoreCells; ++i)
    pts.insert(static_cast<double>(i) / kCoreCells);
  for (const auto* f : {&spec.V[k], &spec.U[k], &spec.kappa[k]})
    for (double b : f->breakpoints())
      if (b > 0.0 && b < 1.0) pts.insert(b);
  std::vector<double> nodes(pts.begin(), pts.end());
  // Drop near-duplicates produced by breakpoints hitting grid nodes.
  std::vector<double> out;
  out.reserve(nodes.size());
  for (double t : nodes)
    if (out.empty() || t - out.back() > 1e-12) out.push_back(t);
  out.back() = 1.0;
  return out;
}

// Shoots -phi'' + V phi = 0 inward from tau = 1 with phi(1) = 1, phi'(1) = 0.
// Fills `vals` at the mesh nodes and returns (phi(0), phi'(0)).
std::pair<double, double> shoot(const EdgeFunction& V,
                                const std::vector<double>& nodes,
                                Eigen::VectorXcd& vals) {
  const std::size_t m = nodes.size();
  vals.resize(static_cast<Eigen::Index>(m));
  detail::Ode2State s{1.0, 0.0};
  vals[static_cast<Eigen::Index>(m - 1)] = s.y;

  if (V.is_piecewise_constant()) {
    for (std::size_t i = m - 1; i > 0; --i) {
      const double a = nodes[i - 1], b = nodes[i];
      s = detail::propagate_const(s, V(0.5 * (a + b)), a - b);
      vals[static_cast<Eigen::Index>(i - 1)] = s.y;
    }
  } else {
    std::vector<double> stops(nodes.rbegin() + 1, nodes.rend());
    detail::Ode2Integrator ode;
    ode.coeff = [&V](double t) { return Complex(V(t), 0.0); };
    ode.rhs = [](double) { return Complex(0.0, 0.0); };
    ode.integrate(1.0, s, stops, [&](std::size_t j, const detail::Ode2State& st) {
      vals[static_cast<Eigen::Index>(m - 2 - j)] = st.y;
      if (j + 1 == stops.size()) s = st;
    });
  }
  return {s.y.real(), s.dy.real()};
}

}  // namespace

ResonanceData solve_half_bound_states(const ShortRangeSpec& spec, double tol) {
  spec.validate();
  const int n = spec.n;

  std::vector<EdgeMesh> edges;
  edges.reserve(static_cast<std::size_t>(n));
  std::vector<Eigen::VectorXcd> phi(static_cast<std::size_t>(n));
  Eigen::VectorXd p(n), d(n);
  for (int k = 0; k < n; ++k) {
    auto nodes = core_nodes(spec, k);
    auto [pk, dk] = shoot(spec.V[k], nodes, phi[static_cast<std::size_t>(k)]);
    p[k] = pk;
    d[k] = dk;
    edges.push_back(EdgeMesh::from_nodes(std::move(nodes), k));
  }
  auto mesh = std::make_shared<const GraphMesh>(StarGraph(n, 2.0), std::move(edges));

  // Continuity rows c_k p_k = v and the Kirchhoff row sum c_k d_k = 0, with
  // unknowns (c_1, ..., c_n, v).
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(n + 1, n + 1);
  for (int k = 0; k < n; ++k) {
    A(k, k) = p[k];
    A(k, n) = -1.0;
    A(n, k) = d[k];
  }
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(A, Eigen::ComputeFullV);
  const Eigen::VectorXd sigma = svd.singularValues();
  const double smax = sigma[0];
  int r = 0;
  for (int i = 0; i < sigma.size(); ++i)
    if (sigma[i] <= tol * smax) ++r;
  if (r > n - 1)
    throw std::runtime_error(
        "solve_half_bound_states: detected resonance dimension above n-1; "
        "lower tol or refine the potential data");

  ResonanceData data;
  data.n = n;
  data.r = r;
  data.core_mesh = mesh;
  data.singular_values = sigma;
  data.tol = tol;
  data.L.resize(n, r);

  if (r == 0) return data;

  Eigen::MatrixXd C = svd.matrixV().rightCols(r).topRows(n);

  // L2 weights per edge for the shooting profiles.
  Eigen::VectorXd w(n);
  for (int k = 0; k < n; ++k) {
    const auto& nodes = mesh->edges[static_cast<std::size_t>(k)].nodes;
    const auto& v = phi[static_cast<std::size_t>(k)];
    double acc = 0.0;
    for (std::size_t i = 0; i + 1 < nodes.size(); ++i)
      acc += 0.5 * (nodes[i + 1] - nodes[i]) *
             (std::norm(v[static_cast<Eigen::Index>(i)]) +
              std::norm(v[static_cast<Eigen::Index>(i + 1)]));
    w[k] = acc;
  }

  // Orthogonalize in L2(core), then scale each function so its largest
  // boundary value is exactly 1.
  Eigen::MatrixXd G = C.transpose() * w.asDiagonal() * C;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(G);
  C = C * eig.eigenvectors() *
      eig.eigenvalues().cwiseSqrt().cwiseInverse().asDiagonal();
  for (int j = 0; j < r; ++j) {
    int imax = 0;
    C.col(j).cwiseAbs().maxCoeff(&imax);
    C.col(j) /= C(imax, j);
  }

  for (int j = 0; j < r; ++j) {
    GridFunction psi(mesh);
    for (int k = 0; k < n; ++k) psi.edge(k) = C(k, j) * phi[static_cast<std::size_t>(k)];
    data.basis.push_back(std::move(psi));
  }
  data.L = C.cast<Complex>();
  return data;
}

Eigen::VectorXcd ell_map(const ResonanceData& data, const Eigen::VectorXcd& coeffs) {
  if (coeffs.size() != data.r)
    throw std::invalid_argument("ell_map: coefficient size must equal r");
  return data.L * coeffs;
}

bool is_injective_ell(const ResonanceData& data, double tol) {
  if (data.r == 0) return true;
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(data.L);
  return svd.singularValues().minCoeff() > tol;
}

BasisResidual basis_residual(const ResonanceData& data, const ShortRangeSpec& spec,
                             int j) {
  if (j < 0 || j >= data.r) throw std::invalid_argument("basis_residual: bad index");
  const GridFunction& psi = data.basis[static_cast<std::size_t>(j)];
  double num = 0.0;
  double boundary = 0.0;
  for (int k = 0; k < data.n; ++k) {
    const auto& nodes = data.core_mesh->edges[static_cast<std::size_t>(k)].nodes;
    const auto& y = psi.edge(k);
    const std::size_t m = nodes.size();
    for (std::size_t i = 1; i + 1 < m; ++i) {
      const double hm = nodes[i] - nodes[i - 1];
      const double hp = nodes[i + 1] - nodes[i];
      const Complex ypp =
          2.0 * (hm * y[static_cast<Eigen::Index>(i + 1)] -
                 (hm + hp) * y[static_cast<Eigen::Index>(i)] +
                 hp * y[static_cast<Eigen::Index>(i - 1)]) /
          (hm * hp * (hm + hp));
      const Complex res = -ypp + spec.V[static_cast<std::size_t>(k)](nodes[i]) *
                                     y[static_cast<Eigen::Index>(i)];
      num += 0.5 * (hm + hp) * std::norm(res);
    }
    // One-sided second-order derivative at the outer boundary.
    const double h1 = nodes[m - 1] - nodes[m - 2];
    const double h2 = nodes[m - 2] - nodes[m - 3];
    const Complex dy = (y[static_cast<Eigen::Index>(m - 1)] *
                            (2.0 * h1 + h2) / (h1 * (h1 + h2)) -
                        y[static_cast<Eigen::Index>(m - 2)] * (h1 + h2) / (h1 * h2) +
                        y[static_cast<Eigen::Index>(m - 3)] * h1 / (h2 * (h1 + h2)));
    boundary = std::max(boundary, std::abs(dy));
  }
  const double nrm = l2_norm(psi);
  return {std::sqrt(num) / std::max(nrm, 1e-300), boundary};
}

}  // namespace stargraph
