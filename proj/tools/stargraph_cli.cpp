#include <filesystem>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "stargraph/config.hpp"

namespace fs = std::filesystem;
using namespace stargraph;

namespace {

SweepSpec resolve_spec(const std::string& config, const std::string& scenario) {
  if (!config.empty()) return load_sweep(config);
  if (!scenario.empty()) {
    auto s = find_scenario(scenario);
    if (!s) throw std::runtime_error("unknown scenario '" + scenario + "'");
    return *s;
  }
  throw std::runtime_error("provide --config or --scenario");
}

fs::path require_out_dir(const std::string& out) {
  if (out.empty()) throw std::runtime_error("this command requires --out DIR");
  fs::path dir(out);
  if (!fs::is_directory(dir))
    throw std::runtime_error("output directory does not exist: " + out);
  return dir;
}

void print_matrix(std::ostream& os, const std::string& name,
                  const Eigen::MatrixXcd& m) {
  os << name << " =\n" << m << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Schroedinger operators on star graphs: resonances, limit vertex "
               "conditions and resolvent convergence"};
  app.require_subcommand(1);

  std::string config, scenario, out;
  unsigned seed = 0;
  int threads = 1;
  bool dry_run = false;
  app.add_option("--config", config, "JSON sweep/problem description");
  app.add_option("--scenario", scenario, "built-in scenario id (see `scenarios`)");
  app.add_option("--out", out, "output directory (must exist)");
  app.add_option("--seed", seed, "seed for randomized diagnostics");
  app.add_option("--threads", threads, "worker threads for sweeps");
  app.add_flag("--dry-run", dry_run, "validate inputs and print the plan only");

  auto* sc_list = app.add_subcommand("scenarios", "list built-in scenarios");
  auto* sc_res = app.add_subcommand("resonance", "zero-energy resonance analysis");
  auto* sc_cond = app.add_subcommand("conditions", "limit vertex conditions");
  auto* sc_solve = app.add_subcommand("solve", "resolvent solve at one (eps, zeta)");
  auto* sc_sweep = app.add_subcommand("sweep", "epsilon sweep with rate fit");
  // Let global options (--scenario, --out, ...) appear after the subcommand.
  for (auto* sc : {sc_list, sc_res, sc_cond, sc_solve, sc_sweep})
    sc->fallthrough();

  double eps = 0.0;
  std::vector<double> zeta_opt;
  sc_solve->add_option("--eps", eps,
                       "regularization parameter; 0 solves the limit problem");
  sc_solve->add_option("--zeta", zeta_opt, "spectral point: re im")->expected(2);

  CLI11_PARSE(app, argc, argv);

  try {
    if (sc_list->parsed()) {
      for (const auto& s : scenario_library())
        std::cout << s.id << "  (n=" << s.n << ")\n";
      return 0;
    }

    SweepSpec spec = resolve_spec(config, scenario);
    if (dry_run) {
      std::cout << "plan: " << spec.id << " n=" << spec.n
                << " eps points=" << spec.eps_list.size()
                << " zeta points=" << spec.zetas.size() << "\n";
      return 0;
    }

    if (sc_res->parsed()) {
      const ResonanceData res = solve_half_bound_states(spec.short_range);
      std::cout << "r = " << res.r << "\n";
      if (res.r > 0) print_matrix(std::cout, "L", res.L);
      std::cout << "singular values: " << res.singular_values.transpose() << "\n";
      if (!out.empty()) {
        const fs::path dir = require_out_dir(out);
        for (int j = 0; j < res.r; ++j)
          write_solution_csv(res.basis[static_cast<std::size_t>(j)],
                             (dir / ("basis_" + std::to_string(j) + ".csv")).string());
      }
      return 0;
    }

    const ResonanceData res = solve_half_bound_states(spec.short_range);
    CoulombSpec coulomb =
        spec.coulomb.n() > 0 ? spec.coulomb : CoulombSpec::zeros(spec.n);
    const CouplingMatrices cmats = build_matrices(res, spec.short_range, coulomb);
    const ConvergenceCheck cc = check_convergence_condition(cmats);
    const VertexConditions vc = assemble_vertex_conditions(cmats);

    if (sc_cond->parsed()) {
      std::cout << "r = " << res.r << ", convergence condition "
                << (cc.holds ? "holds" : "fails") << " (residual " << cc.residual
                << ")\n";
      print_matrix(std::cout, "A", vc.A);
      print_matrix(std::cout, "B", vc.B);
      std::cout << "self-adjoint: " << (check_self_adjoint(vc) ? "yes" : "no")
                << "\n";
      return 0;
    }

    if (sc_solve->parsed()) {
      const Complex zeta = zeta_opt.size() == 2 ? Complex(zeta_opt[0], zeta_opt[1])
                                                : spec.zetas.front();
      const fs::path dir = require_out_dir(out);
      if (eps > 0.0) {
        RegularizedPotential p(coulomb, spec.short_range, eps);
        const RegularizedSolution sol =
            solve_regularized(p, spec.source, zeta, spec.mesh);
        write_solution_csv(sol.y, (dir / "solution_regularized.csv").string());
        std::cout << "algebraic residual: " << sol.residual << "\n";
      } else {
        const LimitSolution sol = solve_limit(coulomb, vc, spec.source, zeta, spec.mesh);
        write_solution_csv(sol.y, (dir / "solution_limit.csv").string());
        std::cout << "vertex residual: " << sol.vertex_residual
                  << ", series match residual: " << sol.qd.fit_residual << "\n";
      }
      return 0;
    }

    if (sc_sweep->parsed()) {
      const fs::path dir = require_out_dir(out);
      spec.output_path = (dir / (spec.id + "_sweep.csv")).string();
      const ConvergenceReport rep = run_sweep(spec, threads);
      std::ofstream((dir / (spec.id + "_report.json")).string())
          << report_to_json(rep).dump(2) << "\n";
      std::cout << summarize(rep);
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
