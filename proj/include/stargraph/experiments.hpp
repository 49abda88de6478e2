#pragma once

#include <optional>
#include <string>

#include "stargraph/solver.hpp"

namespace stargraph {

/// One epsilon-sweep: potentials, sources, spectral parameters and the
/// epsilon grid for an empirical norm-resolvent convergence check.
struct SweepSpec {
  std::string id;
  int n = 3;
  CoulombSpec coulomb;
  ShortRangeSpec short_range;
  Source source;
  std::vector<Complex> zetas{Complex(0.0, 1.0)};
  std::vector<double> eps_list;  // strictly decreasing, in (0,1)
  MeshPolicy mesh;
  std::string output_path;  // optional CSV destination

  void validate() const;
};

struct SweepCell {
  double eps = 0.0;
  Complex zeta;
  double err_vs_limit = 0.0;
  double err_vs_dirichlet = 0.0;
  double vertex_value_norm = 0.0;  // |y_eps(a)| (continuity holds discretely)
  double mesh_h = 0.0;
  double T = 0.0;
};

enum class SweepOutcome {
  ConvergesToLimit,
  ConvergesToDirichletSum,
  Inconclusive
};

struct RateFit {
  double p = 0.0;
  double width = 0.0;  // standard error of the slope
  bool ok = false;     // enough clean points above the floor
  int points_used = 0;
};

/// Least-squares slope of log(err) vs log(eps), excluding points within a
/// factor 10 of the discretization floor. Needs >= 4 clean points.
RateFit fit_rate(const std::vector<std::pair<double, double>>& eps_err,
                 double floor_estimate = 0.0);

struct ConvergenceReport {
  std::string id;
  std::vector<SweepCell> cells;
  bool condition_holds = false;
  double condition_residual = 0.0;
  VertexConditions conditions;
  RateFit rate_vs_limit;
  RateFit rate_vs_dirichlet;
  double discretization_floor = 0.0;
  SweepOutcome outcome = SweepOutcome::Inconclusive;

  std::vector<std::pair<double, double>> errors_vs_limit(Complex zeta) const;
  std::vector<std::pair<double, double>> errors_vs_dirichlet(Complex zeta) const;
};

ConvergenceReport run_sweep(const SweepSpec& s, int threads = 1);

/// The canonical scenarios reproduced by the acceptance suite:
///   delta, delta_prime_resonant, delta_prime_nonresonant, mixed_u_lambda_v,
///   coulomb_delta, coulomb_violated, coulomb_line, coulomb_line_cutoff,
///   block_decomposition.
std::vector<SweepSpec> scenario_library();
std::optional<SweepSpec> find_scenario(const std::string& id);

void write_sweep_csv(const ConvergenceReport& report, const std::string& path);
std::string summarize(const ConvergenceReport& report);

}  // namespace stargraph
