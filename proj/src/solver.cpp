#include "stargraph/solver.hpp"

#include <Eigen/SparseLU>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>

#include "detail/ode.hpp"

namespace stargraph {

namespace {

// Marches from 0 to T with local target step target_h(tau), snapping to the
// sorted breakpoints so no cell straddles one.
std::vector<double> march_nodes(double T, std::vector<double> breaks,
                                const std::function<double(double)>& target_h) {
  std::sort(breaks.begin(), breaks.end());
  breaks.erase(std::remove_if(breaks.begin(), breaks.end(),
                              [T](double b) { return b <= 1e-14 || b >= T - 1e-14; }),
               breaks.end());
  std::vector<double> nodes{0.0};
  std::size_t bi = 0;
  double t = 0.0;
  while (t < T) {
    const double h = target_h(t);
    while (bi < breaks.size() && breaks[bi] <= t + 1e-14) ++bi;
    const double nb = bi < breaks.size() ? breaks[bi] : T;
    double tn = t + h;
    if (tn > nb - 0.45 * h) tn = nb;
    if (tn > T - 1e-12) tn = T;
    nodes.push_back(tn);
    t = tn;
  }
  nodes.back() = T;
  return nodes;
}

std::vector<double> merge_nodes(std::vector<double> nodes,
                                const std::vector<double>& extra, double T) {
  for (double b : extra)
    if (b > 1e-14 && b < T - 1e-14) nodes.push_back(b);
  std::sort(nodes.begin(), nodes.end());
  std::vector<double> out;
  out.reserve(nodes.size());
  for (double t : nodes)
    if (out.empty() || t - out.back() > 1e-13 * std::max(1.0, t)) out.push_back(t);
  out.back() = T;
  return out;
}

// Frobenius-type local solution y = sum_k (a_k + b_k ln tau) tau^k of
// y'' = (q / tau) y - zeta y - f near tau = 0.
struct LocalSeries {
  Eigen::VectorXcd a, b;

  static LocalSeries make(Complex a0, Complex a1, double q, Complex s2,
                          const std::vector<double>& fcoef, int order) {
    LocalSeries s;
    s.a.setZero(order + 1);
    s.b.setZero(order + 1);
    s.a[0] = a0;
    s.a[1] = a1;
    s.b[1] = q * a0;
    auto f = [&fcoef](int m) {
      return m < static_cast<int>(fcoef.size()) ? fcoef[static_cast<std::size_t>(m)]
                                                : 0.0;
    };
    for (int m = 0; m + 2 <= order; ++m) {
      const double den = static_cast<double>((m + 2) * (m + 1));
      s.b[m + 2] = (q * s.b[m + 1] + s2 * s.b[m]) / den;
      s.a[m + 2] =
          (q * s.a[m + 1] + s2 * s.a[m] - f(m) - (2.0 * m + 3.0) * s.b[m + 2]) / den;
    }
    return s;
  }

  Complex value(double tau) const {
    if (tau == 0.0) return a[0];
    const double lt = std::log(tau);
    Complex acc = 0.0, tk = 1.0;
    for (Eigen::Index k = 0; k < a.size(); ++k) {
      acc += (a[k] + b[k] * lt) * tk;
      tk *= tau;
    }
    return acc;
  }

  Complex deriv(double tau) const {
    const double lt = std::log(tau);
    Complex acc = 0.0, tk1 = 1.0;  // tau^{k-1}, starting at k = 1
    for (Eigen::Index k = 1; k < a.size(); ++k) {
      const double kd = static_cast<double>(k);
      acc += (kd * a[k] + b[k] + kd * b[k] * lt) * tk1;
      tk1 *= tau;
    }
    return acc;
  }
};

constexpr int kSeriesOrder = 10;

// Decaying solution data for one edge: samples of the homogeneous solution
// and of the particular solution on the output mesh, plus their vertex data
// from the series match.
struct EdgeLimitData {
  std::vector<double> nodes;
  Eigen::VectorXcd Y0, Yf;
  Complex v0, qd0;  // value / quasi-derivative of the homogeneous solution
  Complex vf, qdf;
  double match_tau = 0.0;
  double match_residual = 0.0;
};

EdgeLimitData integrate_edge(double q, const EdgeFunction& f, Complex zeta,
                             const MeshPolicy& policy, double T) {
  const Complex s = decay_rate(zeta);
  const Complex s2 = -zeta;

  const double fb = f.first_breakpoint();
  const double tau_m =
      std::max(4.0 * policy.min_step,
               std::min(policy.match_point, std::isfinite(fb) ? 0.45 * fb : T / 4));
  const double tau_check = std::min(2.0 * tau_m, T / 2);

  EdgeLimitData ed;
  ed.match_tau = tau_m;
  ed.nodes = merge_nodes(
      EdgeMesh::graded(T, policy.min_step, policy.grade_ratio, policy.h_interior)
          .nodes,
      f.breakpoints(), T);

  // Descending integration checkpoints from T down to tau_m.
  std::vector<double> stops;
  for (auto it = ed.nodes.rbegin(); it != ed.nodes.rend(); ++it)
    if (*it < T - 1e-14 && *it > tau_m + 1e-14) stops.push_back(*it);
  stops.push_back(tau_check);
  stops.push_back(tau_m);
  std::sort(stops.begin(), stops.end(), std::greater<double>());
  stops.erase(std::unique(stops.begin(), stops.end(),
                          [](double x, double y) { return x - y < 1e-14; }),
              stops.end());

  detail::Ode2Integrator ode;
  ode.rtol = policy.ode_rtol;
  ode.atol = policy.ode_atol;
  ode.coeff = [q, zeta](double t) { return Complex(q / t - zeta); };

  auto run = [&](const detail::Ode2State& ic, bool with_f,
                 std::map<double, detail::Ode2State>& rec) {
    if (with_f)
      ode.rhs = [&f](double t) { return Complex(f(t), 0.0); };
    else
      ode.rhs = [](double) { return Complex(0.0, 0.0); };
    ode.integrate(T, ic, stops,
                  [&](std::size_t j, const detail::Ode2State& st) { rec[stops[j]] = st; });
  };

  // Homogeneous solution: either the decaying one (derivative from the
  // leading asymptotics of tau^{-q/2s} e^{-s tau}, normalized to 1 at T) or
  // the one vanishing at T for the truncated operator.
  std::map<double, detail::Ode2State> rec0, recf;
  const detail::Ode2State ic0 = policy.dirichlet_truncation
                                    ? detail::Ode2State{0.0, -1.0}
                                    : detail::Ode2State{1.0, -s - q / (2.0 * s * T)};
  run(ic0, false, rec0);
  // Particular solution with zero Cauchy data at T; since supp f < T it is
  // itself decaying.
  run({0.0, 0.0}, true, recf);

  const std::vector<double> fcoef = f.taylor_at_zero(kSeriesOrder);
  auto match = [&](const std::map<double, detail::Ode2State>& rec, bool with_f,
                   Complex& vertex, Complex& qd, LocalSeries& series) {
    const detail::Ode2State sm = rec.at(tau_m);
    const LocalSeries S0 = LocalSeries::make(1.0, 0.0, q, s2, {}, kSeriesOrder);
    const LocalSeries S1 = LocalSeries::make(0.0, 1.0, q, s2, {}, kSeriesOrder);
    const LocalSeries P =
        LocalSeries::make(0.0, 0.0, q, s2, with_f ? fcoef : std::vector<double>{},
                          kSeriesOrder);
    Eigen::Matrix2cd W;
    W << S0.value(tau_m), S1.value(tau_m), S0.deriv(tau_m), S1.deriv(tau_m);
    Eigen::Vector2cd rhs(sm.y - P.value(tau_m), sm.dy - P.deriv(tau_m));
    const Eigen::Vector2cd a01 = W.fullPivLu().solve(rhs);
    series = LocalSeries::make(a01[0], a01[1], q, s2,
                               with_f ? fcoef : std::vector<double>{}, kSeriesOrder);
    vertex = a01[0];
    qd = a01[1] + q * a01[0];
    const Complex pred = series.value(tau_check);
    const Complex got = rec.at(tau_check).y;
    ed.match_residual = std::max(
        ed.match_residual, std::abs(pred - got) / std::max(1.0, std::abs(got)));
  };

  LocalSeries ser0, serf;
  match(rec0, false, ed.v0, ed.qd0, ser0);
  match(recf, true, ed.vf, ed.qdf, serf);

  const std::size_t m = ed.nodes.size();
  ed.Y0.setZero(static_cast<Eigen::Index>(m));
  ed.Yf.setZero(static_cast<Eigen::Index>(m));
  for (std::size_t i = 0; i < m; ++i) {
    const double t = ed.nodes[i];
    if (t >= T - 1e-14) {
      ed.Y0[static_cast<Eigen::Index>(i)] = policy.dirichlet_truncation ? 0.0 : 1.0;
      ed.Yf[static_cast<Eigen::Index>(i)] = 0.0;
    } else if (t > tau_m + 1e-14) {
      ed.Y0[static_cast<Eigen::Index>(i)] = rec0.at(t).y;
      ed.Yf[static_cast<Eigen::Index>(i)] = recf.at(t).y;
    } else {
      ed.Y0[static_cast<Eigen::Index>(i)] = ser0.value(t);
      ed.Yf[static_cast<Eigen::Index>(i)] = serf.value(t);
    }
  }
  return ed;
}

LimitSolution combine_edges(const std::vector<EdgeLimitData>& edges,
                            const Eigen::VectorXcd& b, const CoulombSpec& coulomb,
                            const Source& f, Complex zeta, double T,
                            const VertexConditions* vc, const MeshPolicy& policy) {
  const int n = static_cast<int>(edges.size());
  std::vector<EdgeMesh> ems;
  ems.reserve(static_cast<std::size_t>(n));
  for (int k = 0; k < n; ++k)
    ems.push_back(EdgeMesh::from_nodes(edges[static_cast<std::size_t>(k)].nodes, k,
                                       Grading::Composite));
  auto mesh = std::make_shared<const GraphMesh>(StarGraph(n, T), std::move(ems));

  LimitSolution out{GridFunction(mesh), {}, 0.0, 0.0};
  out.qd.values.resize(n);
  out.qd.qderivs.resize(n);
  double win_hi = 0.0;
  for (int k = 0; k < n; ++k) {
    const auto& ed = edges[static_cast<std::size_t>(k)];
    out.y.edge(k) = b[k] * ed.Y0 + ed.Yf;
    out.qd.values[k] = b[k] * ed.v0 + ed.vf;
    out.qd.qderivs[k] = b[k] * ed.qd0 + ed.qdf;
    out.qd.fit_residual = std::max(out.qd.fit_residual, ed.match_residual);
    win_hi = std::max(win_hi, ed.match_tau);
  }
  out.qd.fit_window = {policy.min_step, win_hi};

  if (vc != nullptr)
    out.vertex_residual =
        (vc->A * out.qd.values + vc->B * out.qd.qderivs).norm() /
        std::max(1.0, out.qd.values.norm() + out.qd.qderivs.norm());

  // Finite-difference sanity check away from the vertex and the source
  // support, relative to the solution scale.
  double scale = sup_norm(out.y);
  double worst = 0.0;
  for (int k = 0; k < n; ++k) {
    const auto& nodes = mesh->edges[static_cast<std::size_t>(k)].nodes;
    const auto& y = out.y.edge(k);
    const double q = coulomb.n() > 0 ? coulomb.q[k] : 0.0;
    for (std::size_t i = 1; i + 1 < nodes.size(); ++i) {
      if (nodes[i] < 0.3 * T || nodes[i] > 0.6 * T) continue;
      const double hm = nodes[i] - nodes[i - 1], hp = nodes[i + 1] - nodes[i];
      const Complex ypp = 2.0 *
                          (hm * y[static_cast<Eigen::Index>(i + 1)] -
                           (hm + hp) * y[static_cast<Eigen::Index>(i)] +
                           hp * y[static_cast<Eigen::Index>(i - 1)]) /
                          (hm * hp * (hm + hp));
      const Complex res = -ypp + (q / nodes[i] - zeta) * y[static_cast<Eigen::Index>(i)] -
                          f(k, nodes[i]);
      worst = std::max(worst, std::abs(res));
    }
  }
  out.interior_residual = worst / std::max(scale, 1e-300);
  return out;
}

}  // namespace

Complex decay_rate(Complex zeta) {
  Complex s = std::sqrt(-zeta);
  if (s.real() < 0.0) s = -s;
  if (s.real() == 0.0)
    throw std::invalid_argument("decay_rate: zeta must lie off [0, inf)");
  return s;
}

double MeshPolicy::truncation(Complex zeta) const {
  if (T > 0.0) return T;
  return std::max(4.0, 8.0 / decay_rate(zeta).real());
}

Source Source::on_edge(int n, int edge, EdgeFunction profile) {
  if (edge < 0 || edge >= n) throw std::invalid_argument("Source::on_edge: bad edge");
  std::vector<EdgeFunction> f(static_cast<std::size_t>(n));
  f[static_cast<std::size_t>(edge)] = std::move(profile);
  return Source(std::move(f));
}

GridFunction Source::sample(std::shared_ptr<const GraphMesh> mesh) const {
  if (mesh->graph.n != n())
    throw std::invalid_argument("Source::sample: edge count mismatch");
  GridFunction g(mesh);
  for (int k = 0; k < n(); ++k) {
    const auto& nodes = mesh->edges[static_cast<std::size_t>(k)].nodes;
    for (std::size_t i = 0; i < nodes.size(); ++i)
      g.edge(k)[static_cast<Eigen::Index>(i)] = (*this)(k, nodes[i]);
  }
  return g;
}

RegularizedSystem assemble_regularized(const RegularizedPotential& p,
                                       const Source& f, Complex zeta,
                                       const MeshPolicy& policy) {
  const int n = p.short_range.n;
  if (f.n() != n)
    throw std::invalid_argument("assemble_regularized: source size mismatch");
  const double T = policy.truncation(zeta);
  const double eps = p.epsilon;

  // Step inside the fast region [0, eps]. The eps^-2-scaled part makes the
  // limit exquisitely phase-sensitive: the accumulated phase error of the
  // 3-point scheme, ~ (k h)^2 k eps with k = sqrt(|V|)/eps, enters the vertex
  // coupling amplified by 1/eps, so h must shrink like eps^(3/2).
  double vmax = 0.0;
  for (const auto& V : p.short_range.V) {
    if (V.is_zero()) continue;
    for (double t = 0.005; t < 1.0; t += 0.01)
      vmax = std::max(vmax, std::abs(V(t)));
  }
  double h_core = eps / policy.eps_refine;
  if (vmax > 0.0)
    h_core *= std::min(1.0, 0.4 * policy.eps_refine * std::sqrt(eps) /
                                std::pow(vmax, 0.75) / 20.0);

  std::vector<EdgeMesh> ems;
  std::vector<int> offsets;
  int total = 1;  // unknown 0 = vertex value
  for (int k = 0; k < n; ++k) {
    std::vector<double> breaks{eps, 1.0};
    for (const auto* ef :
         {&p.short_range.V[static_cast<std::size_t>(k)],
          &p.short_range.U[static_cast<std::size_t>(k)],
          &p.short_range.kappa[static_cast<std::size_t>(k)]})
      for (double b : ef->breakpoints()) breaks.push_back(eps * b);
    for (double b : f.f[static_cast<std::size_t>(k)].breakpoints()) breaks.push_back(b);
    auto target = [&](double t) {
      if (t < eps - 1e-14) return h_core;
      return std::min(policy.h_interior, std::max(h_core, t / 8.0));
    };
    ems.push_back(EdgeMesh::from_nodes(march_nodes(T, breaks, target), k,
                                       Grading::Composite));
    offsets.push_back(total);
    total += static_cast<int>(ems.back().nodes.size()) - 2;  // interior nodes
  }
  auto mesh = std::make_shared<const GraphMesh>(StarGraph(n, T), std::move(ems));

  std::vector<Eigen::Triplet<Complex>> trip;
  Eigen::VectorXcd rhs = Eigen::VectorXcd::Zero(total);

  // Finite-volume vertex row: flux balance over the half-cells next to 0.
  Complex vdiag = 0.0;
  for (int k = 0; k < n; ++k) {
    const auto& nodes = mesh->edges[static_cast<std::size_t>(k)].nodes;
    const double h1 = nodes[1] - nodes[0];
    const double W0 = eval_Weps(p, k, 0.25 * h1);
    vdiag += 1.0 / h1 + 0.5 * h1 * (W0 - zeta);
    trip.emplace_back(0, offsets[static_cast<std::size_t>(k)], Complex(-1.0 / h1));
    rhs[0] += 0.5 * h1 * f(k, 0.25 * h1);
  }
  trip.emplace_back(0, 0, vdiag);

  for (int k = 0; k < n; ++k) {
    const auto& nodes = mesh->edges[static_cast<std::size_t>(k)].nodes;
    const int off = offsets[static_cast<std::size_t>(k)];
    const int m = static_cast<int>(nodes.size());
    for (int i = 1; i + 1 < m; ++i) {
      const int row = off + i - 1;
      const double hm = nodes[static_cast<std::size_t>(i)] -
                        nodes[static_cast<std::size_t>(i - 1)];
      const double hp = nodes[static_cast<std::size_t>(i + 1)] -
                        nodes[static_cast<std::size_t>(i)];
      const double cm = 2.0 / (hm * (hm + hp));
      const double cp = 2.0 / (hp * (hm + hp));
      const double tau = nodes[static_cast<std::size_t>(i)];
      // Dual-cell averages keep second order when W or f jump at a node.
      auto avg = [&](auto&& g) {
        return (hm * g(tau - 0.5 * hm) + hp * g(tau + 0.5 * hp)) / (hm + hp);
      };
      const Complex Wi = avg([&](double t) { return eval_Weps(p, k, t); });
      trip.emplace_back(row, row, Complex(cm + cp) + (Wi - zeta));
      if (i == 1)
        trip.emplace_back(row, 0, Complex(-cm));
      else
        trip.emplace_back(row, row - 1, Complex(-cm));
      if (i + 2 < m) trip.emplace_back(row, row + 1, Complex(-cp));
      rhs[row] = avg([&](double t) { return Complex(f(k, t), 0.0); });
    }
  }

  RegularizedSystem sys;
  sys.A.resize(total, total);
  sys.A.setFromTriplets(trip.begin(), trip.end());
  sys.rhs = std::move(rhs);
  sys.mesh = mesh;
  sys.edge_offset = std::move(offsets);
  return sys;
}

RegularizedSolution solve_regularized(const RegularizedPotential& p, const Source& f,
                                      Complex zeta, const MeshPolicy& policy) {
  RegularizedSystem sys = assemble_regularized(p, f, zeta, policy);
  Eigen::SparseLU<Eigen::SparseMatrix<Complex>> lu(sys.A);
  if (lu.info() != Eigen::Success)
    throw std::runtime_error("solve_regularized: sparse factorization failed");
  const Eigen::VectorXcd x = lu.solve(sys.rhs);

  RegularizedSolution out{GridFunction(sys.mesh), 0.0};
  out.residual = (sys.A * x - sys.rhs).norm() / std::max(1.0, sys.rhs.norm());
  for (int k = 0; k < sys.mesh->graph.n; ++k) {
    auto& v = out.y.edge(k);
    const int m = static_cast<int>(v.size());
    v[0] = x[0];
    for (int i = 1; i + 1 < m; ++i)
      v[i] = x[sys.edge_offset[static_cast<std::size_t>(k)] + i - 1];
    v[m - 1] = 0.0;
  }
  return out;
}

LimitSolution solve_limit(const CoulombSpec& coulomb, const VertexConditions& vc,
                          const Source& f, Complex zeta, const MeshPolicy& policy) {
  const int n = vc.n();
  if (f.n() != n) throw std::invalid_argument("solve_limit: source size mismatch");
  if (coulomb.n() != 0 && coulomb.n() != n)
    throw std::invalid_argument("solve_limit: coulomb size mismatch");
  const double T = policy.truncation(zeta);

  std::vector<EdgeLimitData> edges;
  edges.reserve(static_cast<std::size_t>(n));
  Eigen::VectorXcd v0(n), qd0(n), vf(n), qdf(n);
  for (int k = 0; k < n; ++k) {
    const double q = coulomb.n() > 0 ? coulomb.q[k] : 0.0;
    edges.push_back(
        integrate_edge(q, f.f[static_cast<std::size_t>(k)], zeta, policy, T));
    v0[k] = edges.back().v0;
    qd0[k] = edges.back().qd0;
    vf[k] = edges.back().vf;
    qdf[k] = edges.back().qdf;
  }

  // A (diag v0) b + B (diag qd0) b = -(A vf + B qdf).
  const Eigen::MatrixXcd D =
      vc.A * v0.asDiagonal().toDenseMatrix() + vc.B * qd0.asDiagonal().toDenseMatrix();
  const Eigen::VectorXcd rhs = -(vc.A * vf + vc.B * qdf);
  Eigen::FullPivLU<Eigen::MatrixXcd> lu(D);
  if (!lu.isInvertible())
    throw std::runtime_error(
        "solve_limit: singular vertex system (zeta too close to the spectrum?)");
  const Eigen::VectorXcd b = lu.solve(rhs);

  CoulombSpec cs = coulomb.n() > 0 ? coulomb : CoulombSpec::zeros(n);
  return combine_edges(edges, b, cs, f, zeta, T, &vc, policy);
}

LimitSolution solve_dirichlet_sum(const CoulombSpec& coulomb, const Source& f,
                                  Complex zeta, const MeshPolicy& policy) {
  const int n = f.n();
  if (coulomb.n() != 0 && coulomb.n() != n)
    throw std::invalid_argument("solve_dirichlet_sum: coulomb size mismatch");
  const double T = policy.truncation(zeta);

  std::vector<EdgeLimitData> edges;
  Eigen::VectorXcd b(n);
  for (int k = 0; k < n; ++k) {
    const double q = coulomb.n() > 0 ? coulomb.q[k] : 0.0;
    edges.push_back(
        integrate_edge(q, f.f[static_cast<std::size_t>(k)], zeta, policy, T));
    const auto& ed = edges.back();
    if (std::abs(ed.v0) < 1e-14 * std::max(1.0, std::abs(ed.vf)))
      throw std::runtime_error("solve_dirichlet_sum: degenerate edge problem");
    b[k] = -ed.vf / ed.v0;
  }
  CoulombSpec cs = coulomb.n() > 0 ? coulomb : CoulombSpec::zeros(n);
  return combine_edges(edges, b, cs, f, zeta, T, nullptr, policy);
}

std::pair<Complex, double> extract_quasi_derivative(const std::vector<double>& tau,
                                                    const Eigen::VectorXcd& y,
                                                    double q_k, Complex y0,
                                                    std::pair<double, double> window) {
  if (tau.size() != static_cast<std::size_t>(y.size()))
    throw std::invalid_argument("extract_quasi_derivative: size mismatch");
  if (!(window.first > 0.0) || !(window.second > window.first))
    throw std::invalid_argument("extract_quasi_derivative: bad window");

  std::vector<std::size_t> idx;
  for (std::size_t i = 0; i < tau.size(); ++i)
    if (tau[i] >= window.first && tau[i] <= window.second) idx.push_back(i);
  if (idx.size() < 4)
    throw std::invalid_argument(
        "extract_quasi_derivative: need at least 4 nodes inside the window");

  // Nonuniform 3-point differentiation, one-sided at the window edges.
  std::vector<Complex> dy(idx.size());
  auto deriv3 = [&](std::size_t a, std::size_t b, std::size_t c, double at) {
    const double ta = tau[a], tb = tau[b], tc = tau[c];
    const double wa = (2.0 * at - tb - tc) / ((ta - tb) * (ta - tc));
    const double wb = (2.0 * at - ta - tc) / ((tb - ta) * (tb - tc));
    const double wc = (2.0 * at - ta - tb) / ((tc - ta) * (tc - tb));
    return wa * y[static_cast<Eigen::Index>(a)] + wb * y[static_cast<Eigen::Index>(b)] +
           wc * y[static_cast<Eigen::Index>(c)];
  };
  for (std::size_t j = 0; j < idx.size(); ++j) {
    if (j == 0)
      dy[j] = deriv3(idx[0], idx[1], idx[2], tau[idx[0]]);
    else if (j + 1 == idx.size())
      dy[j] = deriv3(idx[j - 2], idx[j - 1], idx[j], tau[idx[j]]);
    else
      dy[j] = deriv3(idx[j - 1], idx[j], idx[j + 1], tau[idx[j]]);
  }

  // Single-parameter least squares: y' - q y0 ln(tau) = b.
  Complex acc = 0.0;
  for (std::size_t j = 0; j < idx.size(); ++j)
    acc += dy[j] - q_k * y0 * std::log(tau[idx[j]]);
  const Complex b = acc / static_cast<double>(idx.size());
  double res = 0.0;
  for (std::size_t j = 0; j < idx.size(); ++j)
    res += std::norm(dy[j] - q_k * y0 * std::log(tau[idx[j]]) - b);
  return {b, std::sqrt(res / static_cast<double>(idx.size()))};
}

void write_solution_csv(const GridFunction& y, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("write_solution_csv: cannot open " + path);
  out << "edge,tau,re,im\n";
  char line[160];
  for (int k = 0; k < y.edge_count(); ++k) {
    const auto& nodes = y.mesh->edges[static_cast<std::size_t>(k)].nodes;
    for (std::size_t i = 0; i < nodes.size(); ++i) {
      std::snprintf(line, sizeof(line), "%d,%.12e,%.12e,%.12e\n", k, nodes[i],
                    y.edge(k)[static_cast<Eigen::Index>(i)].real(),
                    y.edge(k)[static_cast<Eigen::Index>(i)].imag());
      out << line;
    }
  }
}

}  // namespace stargraph
