#include "stargraph/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <thread>

namespace stargraph {

namespace {

// Comparison mesh shared by the regularized and limit solutions: mildly
// graded near the vertex, uniform elsewhere.
std::shared_ptr<const GraphMesh> comparison_mesh(int n, double T) {
  std::vector<double> nodes;
  double t = 1e-4, h = 1e-4;
  nodes.push_back(0.0);
  while (t < T) {
    nodes.push_back(t);
    h = std::min(1.3 * h, 0.02);
    t += h;
  }
  nodes.push_back(T);
  std::vector<EdgeMesh> ems;
  for (int k = 0; k < n; ++k)
    ems.push_back(EdgeMesh::from_nodes(nodes, k, Grading::Composite));
  return std::make_shared<const GraphMesh>(StarGraph(n, T), std::move(ems));
}

GridFunction restrict_to(const GridFunction& y,
                         std::shared_ptr<const GraphMesh> mesh) {
  GridFunction out(mesh);
  for (int k = 0; k < mesh->graph.n; ++k) {
    const auto& nodes = mesh->edges[static_cast<std::size_t>(k)].nodes;
    const double src_T =
        y.mesh->edges[static_cast<std::size_t>(k)].nodes.back();
    for (std::size_t i = 0; i < nodes.size(); ++i)
      out.edge(k)[static_cast<Eigen::Index>(i)] =
          nodes[i] <= src_T ? eval(y, k, nodes[i]) : Complex(0.0, 0.0);
  }
  return out;
}

double l2_diff(const GridFunction& a, const GridFunction& b) {
  GridFunction d = a;
  for (int k = 0; k < d.edge_count(); ++k) d.edge(k) -= b.edge(k);
  return l2_norm(d);
}

bool tail_decays(const std::vector<std::pair<double, double>>& errs, double floor) {
  if (errs.size() < 3) return false;
  // Points clearly above the floor must trend down by a decent factor.
  std::vector<double> clean;
  for (const auto& [eps, e] : errs)
    if (e > 10.0 * floor) clean.push_back(e);
  if (clean.size() < 3) {
    // Everything already sits at the floor: converged as far as we can see.
    return errs.back().second <= std::max(20.0 * floor, 0.05 * errs.front().second);
  }
  int upticks = 0;
  for (std::size_t i = 1; i < clean.size(); ++i)
    if (clean[i] > 1.05 * clean[i - 1]) ++upticks;
  return upticks <= 1 && clean.back() < 0.35 * clean.front();
}

}  // namespace

void SweepSpec::validate() const {
  if (n < 2) throw std::invalid_argument("SweepSpec: need n >= 2");
  if (short_range.n != n || source.n() != n)
    throw std::invalid_argument("SweepSpec: edge count mismatch");
  if (coulomb.n() != 0 && coulomb.n() != n)
    throw std::invalid_argument("SweepSpec: coulomb size mismatch");
  if (zetas.empty()) throw std::invalid_argument("SweepSpec: no spectral points");
  for (Complex z : zetas) (void)decay_rate(z);
  if (eps_list.empty()) throw std::invalid_argument("SweepSpec: empty eps list");
  for (std::size_t i = 0; i < eps_list.size(); ++i) {
    if (!(eps_list[i] > 0.0) || !(eps_list[i] < 1.0))
      throw std::invalid_argument("SweepSpec: eps must lie in (0,1)");
    if (i > 0 && eps_list[i] >= eps_list[i - 1])
      throw std::invalid_argument("SweepSpec: eps list must be strictly decreasing");
  }
  short_range.validate();
}

std::vector<std::pair<double, double>> ConvergenceReport::errors_vs_limit(
    Complex zeta) const {
  std::vector<std::pair<double, double>> out;
  for (const auto& c : cells)
    if (c.zeta == zeta) out.emplace_back(c.eps, c.err_vs_limit);
  return out;
}

std::vector<std::pair<double, double>> ConvergenceReport::errors_vs_dirichlet(
    Complex zeta) const {
  std::vector<std::pair<double, double>> out;
  for (const auto& c : cells)
    if (c.zeta == zeta) out.emplace_back(c.eps, c.err_vs_dirichlet);
  return out;
}

RateFit fit_rate(const std::vector<std::pair<double, double>>& eps_err,
                 double floor_estimate) {
  RateFit fit;
  std::vector<double> x, y;
  for (const auto& [eps, e] : eps_err) {
    if (e <= 10.0 * floor_estimate || e <= 0.0) continue;
    x.push_back(std::log(eps));
    y.push_back(std::log(e));
  }
  fit.points_used = static_cast<int>(x.size());
  if (x.size() < 4) return fit;
  const double m = static_cast<double>(x.size());
  double xm = 0, ym = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    xm += x[i];
    ym += y[i];
  }
  xm /= m;
  ym /= m;
  double sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - xm) * (x[i] - xm);
    sxy += (x[i] - xm) * (y[i] - ym);
  }
  fit.p = sxy / sxx;
  double ss = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double r = y[i] - ym - fit.p * (x[i] - xm);
    ss += r * r;
  }
  fit.width = std::sqrt(ss / (m - 2.0) / sxx);
  fit.ok = true;
  return fit;
}

ConvergenceReport run_sweep(const SweepSpec& s, int threads) {
  s.validate();
  ConvergenceReport rep;
  rep.id = s.id;

  const ResonanceData res = solve_half_bound_states(s.short_range);
  CoulombSpec coulomb = s.coulomb.n() > 0 ? s.coulomb : CoulombSpec::zeros(s.n);
  const CouplingMatrices cm = build_matrices(res, s.short_range, coulomb);
  const ConvergenceCheck cc = check_convergence_condition(cm);
  rep.condition_holds = cc.holds;
  rep.condition_residual = cc.residual;
  rep.conditions = assemble_vertex_conditions(cm);

  struct ZetaData {
    std::shared_ptr<const GraphMesh> cmp;
    GridFunction y_lim, y_dir;
    ZetaData(std::shared_ptr<const GraphMesh> m) : cmp(m), y_lim(m), y_dir(m) {}
  };
  // The regularized problems are truncated with y(T) = 0, so the reference
  // solutions use the equally truncated limit operators.
  MeshPolicy limit_policy = s.mesh;
  limit_policy.dirichlet_truncation = true;
  std::vector<ZetaData> zd;
  for (Complex zeta : s.zetas) {
    const double T = s.mesh.truncation(zeta);
    ZetaData d(comparison_mesh(s.n, T));
    d.y_lim = restrict_to(
        solve_limit(coulomb, rep.conditions, s.source, zeta, limit_policy).y, d.cmp);
    d.y_dir = restrict_to(solve_dirichlet_sum(coulomb, s.source, zeta, limit_policy).y,
                          d.cmp);
    zd.push_back(std::move(d));
  }

  const std::size_t nz = s.zetas.size(), ne = s.eps_list.size();
  rep.cells.assign(nz * ne, SweepCell{});
  auto work = [&](std::size_t cell) {
    const std::size_t iz = cell / ne, ie = cell % ne;
    const Complex zeta = s.zetas[iz];
    const double eps = s.eps_list[ie];
    RegularizedPotential p(coulomb, s.short_range, eps);
    const RegularizedSolution sol = solve_regularized(p, s.source, zeta, s.mesh);
    const GridFunction y = restrict_to(sol.y, zd[iz].cmp);
    SweepCell& c = rep.cells[cell];
    c.eps = eps;
    c.zeta = zeta;
    c.err_vs_limit = l2_diff(y, zd[iz].y_lim);
    c.err_vs_dirichlet = l2_diff(y, zd[iz].y_dir);
    c.vertex_value_norm = vertex_values(sol.y).norm();
    c.mesh_h = s.mesh.h_interior;
    c.T = s.mesh.truncation(zeta);
  };

  const std::size_t total = nz * ne;
  if (threads <= 1) {
    for (std::size_t i = 0; i < total; ++i) work(i);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    const int nt = std::min<int>(threads, static_cast<int>(total));
    for (int t = 0; t < nt; ++t)
      pool.emplace_back([&]() {
        for (std::size_t i = next.fetch_add(1); i < total; i = next.fetch_add(1))
          work(i);
      });
    for (auto& th : pool) th.join();
  }

  // Discretization floor: recompute the smallest epsilon at doubled
  // resolution and measure the shift.
  {
    const Complex zeta = s.zetas[0];
    const double eps = s.eps_list.back();
    RegularizedPotential p(coulomb, s.short_range, eps);
    MeshPolicy fine = s.mesh;
    fine.h_interior *= 0.5;
    fine.eps_refine *= 2.0;
    const GridFunction a =
        restrict_to(solve_regularized(p, s.source, zeta, s.mesh).y, zd[0].cmp);
    const GridFunction b =
        restrict_to(solve_regularized(p, s.source, zeta, fine).y, zd[0].cmp);
    rep.discretization_floor = l2_diff(a, b);
  }

  const auto el = rep.errors_vs_limit(s.zetas[0]);
  const auto ed = rep.errors_vs_dirichlet(s.zetas[0]);
  rep.rate_vs_limit = fit_rate(el, rep.discretization_floor);
  rep.rate_vs_dirichlet = fit_rate(ed, rep.discretization_floor);
  if (tail_decays(el, rep.discretization_floor))
    rep.outcome = SweepOutcome::ConvergesToLimit;
  else if (tail_decays(ed, rep.discretization_floor))
    rep.outcome = SweepOutcome::ConvergesToDirichletSum;
  else
    rep.outcome = SweepOutcome::Inconclusive;

  if (!s.output_path.empty()) write_sweep_csv(rep, s.output_path);
  return rep;
}

std::vector<SweepSpec> scenario_library() {
  std::vector<SweepSpec> lib;
  const std::vector<double> eps7{1.0 / 16, 1.0 / 32, 1.0 / 64, 1.0 / 128,
                                 1.0 / 256, 1.0 / 512, 1.0 / 1024};
  const EdgeFunction box = EdgeFunction::constant(1.0);
  const EdgeFunction zero = EdgeFunction::zero();
  const double pi = 3.14159265358979323846;

  auto base = [&](std::string id, int n) {
    SweepSpec s;
    s.id = std::move(id);
    s.n = n;
    s.eps_list = eps7;
    s.source = Source::on_edge(n, 0, box);
    return s;
  };

  {
    SweepSpec s = base("delta", 3);
    s.short_range = ShortRangeSpec(3, zero, box, zero);
    lib.push_back(std::move(s));
  }
  {
    SweepSpec s = base("delta_prime_resonant", 3);
    s.short_range = ShortRangeSpec(3, zero, zero,
                                   EdgeFunction::constant(-pi * pi / 4.0));
    lib.push_back(std::move(s));
  }
  {
    SweepSpec s = base("delta_prime_nonresonant", 3);
    s.short_range = ShortRangeSpec(3, zero, zero, EdgeFunction::constant(10.0));
    lib.push_back(std::move(s));
  }
  {
    SweepSpec s = base("mixed_u_lambda_v", 3);
    s.short_range =
        ShortRangeSpec(3, zero, EdgeFunction::constant(0.3 * (-pi * pi / 4.0)),
                       EdgeFunction::constant(-pi * pi / 4.0));
    lib.push_back(std::move(s));
  }
  {
    SweepSpec s = base("coulomb_delta", 3);
    s.coulomb = CoulombSpec((Eigen::VectorXd(3) << 1.0, 2.0, 3.0).finished());
    s.short_range = ShortRangeSpec(3, EdgeFunction::constant(2.0), box, zero);
    lib.push_back(std::move(s));
  }
  {
    SweepSpec s = base("coulomb_violated", 3);
    s.coulomb = CoulombSpec((Eigen::VectorXd(3) << 1.0, 2.0, 3.0).finished());
    s.short_range = ShortRangeSpec(3, zero, box, zero);
    lib.push_back(std::move(s));
  }
  {
    SweepSpec s = base("coulomb_line", 2);
    s.coulomb = CoulombSpec((Eigen::VectorXd(2) << 1.0, 2.0).finished());
    s.short_range = ShortRangeSpec(2, EdgeFunction::constant(1.5), box, zero);
    lib.push_back(std::move(s));
  }
  {
    SweepSpec s = base("coulomb_line_cutoff", 2);
    s.coulomb = CoulombSpec((Eigen::VectorXd(2) << -1.0, -1.0).finished());
    s.short_range = ShortRangeSpec::none(2);
    lib.push_back(std::move(s));
  }
  {
    SweepSpec s = base("block_decomposition", 4);
    const EdgeFunction vres = EdgeFunction::constant(-pi * pi / 4.0);
    const EdgeFunction voff = EdgeFunction::constant(10.0);
    s.short_range = ShortRangeSpec(
        std::vector<EdgeFunction>(4, zero), std::vector<EdgeFunction>(4, zero),
        std::vector<EdgeFunction>{vres, vres, voff, voff});
    lib.push_back(std::move(s));
  }
  return lib;
}

std::optional<SweepSpec> find_scenario(const std::string& id) {
  for (auto& s : scenario_library())
    if (s.id == id) return s;
  return std::nullopt;
}

void write_sweep_csv(const ConvergenceReport& report, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("write_sweep_csv: cannot open " + path);
  out << "eps,zeta_re,zeta_im,err_vs_limit,err_vs_dirichlet,mesh_h,T\n";
  char line[256];
  for (const auto& c : report.cells) {
    std::snprintf(line, sizeof(line),
                  "%.12e,%.12e,%.12e,%.12e,%.12e,%.12e,%.12e\n", c.eps,
                  c.zeta.real(), c.zeta.imag(), c.err_vs_limit, c.err_vs_dirichlet,
                  c.mesh_h, c.T);
    out << line;
  }
}

std::string summarize(const ConvergenceReport& report) {
  std::ostringstream os;
  os << "sweep " << report.id << ": condition "
     << (report.condition_holds ? "holds" : "fails")
     << " (residual " << report.condition_residual << ")\n";
  os << "  outcome: ";
  switch (report.outcome) {
    case SweepOutcome::ConvergesToLimit:
      os << "converges to the coupled limit";
      break;
    case SweepOutcome::ConvergesToDirichletSum:
      os << "converges to the decoupled (Dirichlet) limit";
      break;
    case SweepOutcome::Inconclusive:
      os << "inconclusive";
      break;
  }
  os << "\n";
  if (report.rate_vs_limit.ok)
    os << "  rate vs limit: " << report.rate_vs_limit.p << " +/- "
       << report.rate_vs_limit.width << " (" << report.rate_vs_limit.points_used
       << " pts)\n";
  if (report.rate_vs_dirichlet.ok)
    os << "  rate vs dirichlet: " << report.rate_vs_dirichlet.p << " +/- "
       << report.rate_vs_dirichlet.width << " ("
       << report.rate_vs_dirichlet.points_used << " pts)\n";
  os << "  discretization floor: " << report.discretization_floor << "\n";
  for (const auto& c : report.cells)
    os << "  eps=" << c.eps << " zeta=(" << c.zeta.real() << "," << c.zeta.imag()
       << ") err_limit=" << c.err_vs_limit << " err_dirichlet=" << c.err_vs_dirichlet
       << "\n";
  return os.str();
}

}  // namespace stargraph
