#include "stargraph/config.hpp"

#include <fstream>

namespace stargraph {

using nlohmann::json;

EdgeFunction edge_function_from_json(const json& j) {
  const std::string type = j.at("type").get<std::string>();
  if (type == "zero") return EdgeFunction::zero();
  if (type == "constant")
    return EdgeFunction::constant(j.at("value").get<double>(),
                                  j.value("support_end", 1.0));
  if (type == "piecewise_constant")
    return EdgeFunction::piecewise_constant(
        j.at("knots").get<std::vector<double>>(),
        j.at("values").get<std::vector<double>>());
  if (type == "polynomial")
    return EdgeFunction::polynomial(j.at("coeffs").get<std::vector<double>>(),
                                    j.value("lo", 0.0), j.value("hi", 1.0));
  if (type == "tabulated")
    return EdgeFunction::tabulated(j.at("tau").get<std::vector<double>>(),
                                   j.at("value").get<std::vector<double>>());
  throw std::invalid_argument("edge_function_from_json: unknown type '" + type + "'");
}

namespace {

std::vector<EdgeFunction> edge_list(const json& j, const char* key, int n) {
  if (!j.contains(key))
    return std::vector<EdgeFunction>(static_cast<std::size_t>(n));
  const json& v = j.at(key);
  if (v.is_array() && (v.empty() || v[0].is_object())) {
    if (static_cast<int>(v.size()) != n)
      throw std::invalid_argument(std::string("config: '") + key + "' needs " +
                                  std::to_string(n) + " entries");
    std::vector<EdgeFunction> out;
    for (const auto& e : v) out.push_back(edge_function_from_json(e));
    return out;
  }
  return std::vector<EdgeFunction>(static_cast<std::size_t>(n),
                                   edge_function_from_json(v));
}

}  // namespace

SweepSpec sweep_from_json(const json& j) {
  SweepSpec s;
  s.id = j.value("id", "custom");
  s.n = j.at("n").get<int>();
  if (j.contains("q")) {
    const auto q = j.at("q").get<std::vector<double>>();
    if (static_cast<int>(q.size()) != s.n)
      throw std::invalid_argument("config: 'q' needs n entries");
    s.coulomb = CoulombSpec(
        Eigen::Map<const Eigen::VectorXd>(q.data(), static_cast<Eigen::Index>(q.size())));
  }
  s.short_range = ShortRangeSpec(edge_list(j, "kappa", s.n), edge_list(j, "U", s.n),
                                 edge_list(j, "V", s.n));

  if (j.contains("source")) {
    const json& src = j.at("source");
    if (src.is_array()) {
      if (static_cast<int>(src.size()) != s.n)
        throw std::invalid_argument("config: 'source' needs n entries");
      std::vector<EdgeFunction> f;
      for (const auto& e : src) f.push_back(edge_function_from_json(e));
      s.source = Source(std::move(f));
    } else {
      s.source = Source::on_edge(s.n, src.value("edge", 0),
                                 edge_function_from_json(src.at("profile")));
    }
  } else {
    s.source = Source::on_edge(s.n, 0, EdgeFunction::constant(1.0));
  }

  if (j.contains("zetas")) {
    s.zetas.clear();
    for (const auto& z : j.at("zetas"))
      s.zetas.emplace_back(z.at(0).get<double>(), z.at(1).get<double>());
  }
  if (j.contains("eps")) s.eps_list = j.at("eps").get<std::vector<double>>();
  if (s.eps_list.empty())
    s.eps_list = {1.0 / 16, 1.0 / 32, 1.0 / 64, 1.0 / 128,
                  1.0 / 256, 1.0 / 512, 1.0 / 1024};

  if (j.contains("mesh")) {
    const json& m = j.at("mesh");
    s.mesh.T = m.value("T", s.mesh.T);
    s.mesh.h_interior = m.value("h_interior", s.mesh.h_interior);
    s.mesh.eps_refine = m.value("eps_refine", s.mesh.eps_refine);
    s.mesh.min_step = m.value("min_step", s.mesh.min_step);
    s.mesh.grade_ratio = m.value("grade_ratio", s.mesh.grade_ratio);
    s.mesh.match_point = m.value("match_point", s.mesh.match_point);
  }
  s.output_path = j.value("output_path", "");
  s.validate();
  return s;
}

SweepSpec load_sweep(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("load_sweep: cannot open " + path);
  json j;
  in >> j;
  return sweep_from_json(j);
}

json report_to_json(const ConvergenceReport& report) {
  json j;
  j["id"] = report.id;
  j["condition_holds"] = report.condition_holds;
  j["condition_residual"] = report.condition_residual;
  switch (report.outcome) {
    case SweepOutcome::ConvergesToLimit:
      j["outcome"] = "converges_to_limit";
      break;
    case SweepOutcome::ConvergesToDirichletSum:
      j["outcome"] = "converges_to_dirichlet_sum";
      break;
    case SweepOutcome::Inconclusive:
      j["outcome"] = "inconclusive";
      break;
  }
  j["discretization_floor"] = report.discretization_floor;
  if (report.rate_vs_limit.ok) {
    j["rate_vs_limit"] = report.rate_vs_limit.p;
    j["rate_vs_limit_width"] = report.rate_vs_limit.width;
  }
  if (report.rate_vs_dirichlet.ok) {
    j["rate_vs_dirichlet"] = report.rate_vs_dirichlet.p;
    j["rate_vs_dirichlet_width"] = report.rate_vs_dirichlet.width;
  }
  json cells = json::array();
  for (const auto& c : report.cells)
    cells.push_back({{"eps", c.eps},
                     {"zeta", {c.zeta.real(), c.zeta.imag()}},
                     {"err_vs_limit", c.err_vs_limit},
                     {"err_vs_dirichlet", c.err_vs_dirichlet},
                     {"vertex_value_norm", c.vertex_value_norm}});
  j["cells"] = cells;
  return j;
}

}  // namespace stargraph
