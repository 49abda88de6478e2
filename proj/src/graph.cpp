#include "stargraph/graph.hpp"

#include <algorithm>
#include <cmath>

namespace stargraph {

EdgeMesh EdgeMesh::uniform(double T, int cells, int edge_index) {
  if (cells < 1 || T <= 0) throw std::invalid_argument("EdgeMesh::uniform");
  EdgeMesh m;
  m.edge_index = edge_index;
  m.grading = Grading::Uniform;
  m.nodes.resize(cells + 1);
  for (int i = 0; i <= cells; ++i) m.nodes[i] = T * double(i) / cells;
  m.nodes.back() = T;
  return m;
}

EdgeMesh EdgeMesh::graded(double T, double min_step, double ratio,
                          double max_step, int edge_index) {
  if (min_step <= 0 || ratio <= 1.0 || max_step < min_step || T <= min_step)
    throw std::invalid_argument("EdgeMesh::graded");
  EdgeMesh m;
  m.edge_index = edge_index;
  m.grading = Grading::GeometricTowardZero;
  m.nodes.push_back(0.0);
  double t = 0.0, h = min_step;
  while (t < T) {
    t += h;
    if (t > T - 0.5 * h) t = T;
    m.nodes.push_back(t);
    h = std::min(h * ratio, max_step);
  }
  return m;
}

EdgeMesh EdgeMesh::from_nodes(std::vector<double> nodes, int edge_index,
                              Grading grading) {
  EdgeMesh m;
  m.edge_index = edge_index;
  m.grading = grading;
  m.nodes = std::move(nodes);
  m.validate();
  return m;
}

void EdgeMesh::validate() const {
  if (nodes.size() < 2 || nodes.front() != 0.0)
    throw std::invalid_argument("EdgeMesh: need nodes starting at 0");
  for (std::size_t i = 1; i < nodes.size(); ++i)
    if (!(nodes[i] > nodes[i - 1]))
      throw std::invalid_argument("EdgeMesh: nodes must increase strictly");
}

GraphMesh::GraphMesh(StarGraph g, std::vector<EdgeMesh> e)
    : graph(g), edges(std::move(e)) {
  if (static_cast<int>(edges.size()) != graph.n)
    throw std::invalid_argument("GraphMesh: one mesh per edge required");
  for (auto& em : edges) em.validate();
}

std::shared_ptr<const GraphMesh> GraphMesh::uniform(const StarGraph& g,
                                                    int cells_per_edge) {
  std::vector<EdgeMesh> edges;
  edges.reserve(g.n);
  for (int k = 0; k < g.n; ++k)
    edges.push_back(EdgeMesh::uniform(g.truncation_length, cells_per_edge, k));
  return std::make_shared<GraphMesh>(g, std::move(edges));
}

bool same_mesh(const GraphMesh& a, const GraphMesh& b) {
  if (&a == &b) return true;
  if (a.graph.n != b.graph.n) return false;
  for (int k = 0; k < a.graph.n; ++k)
    if (a.edges[k].nodes != b.edges[k].nodes) return false;
  return true;
}

GridFunction::GridFunction(std::shared_ptr<const GraphMesh> mesh_)
    : mesh(std::move(mesh_)) {
  if (!mesh) throw std::invalid_argument("GridFunction: null mesh");
  values.reserve(mesh->graph.n);
  for (const auto& em : mesh->edges)
    values.emplace_back(Eigen::VectorXcd::Zero(em.size()));
}

namespace {

void require_shared_mesh(const GridFunction& f, const GridFunction& g) {
  if (!same_mesh(*f.mesh, *g.mesh))
    throw std::invalid_argument("grid functions live on different meshes");
}

}  // namespace

Complex l2_inner(const GridFunction& f, const GridFunction& g) {
  require_shared_mesh(f, g);
  Complex acc = 0.0;
  for (int k = 0; k < f.edge_count(); ++k) {
    const auto& t = f.mesh->edges[k].nodes;
    const auto& a = f.edge(k);
    const auto& b = g.edge(k);
    for (std::size_t i = 0; i + 1 < t.size(); ++i) {
      const double h = t[i + 1] - t[i];
      acc += 0.5 * h *
             (a[i] * std::conj(b[i]) + a[i + 1] * std::conj(b[i + 1]));
    }
  }
  return acc;
}

double l2_norm(const GridFunction& f) {
  return std::sqrt(std::abs(l2_inner(f, f)));
}

double sup_norm(const GridFunction& f) {
  double m = 0.0;
  for (const auto& v : f.values)
    if (v.size() > 0) m = std::max(m, v.cwiseAbs().maxCoeff());
  return m;
}

Eigen::VectorXcd vertex_values(const GridFunction& f) {
  Eigen::VectorXcd v(f.edge_count());
  for (int k = 0; k < f.edge_count(); ++k) v[k] = f.edge(k)[0];
  return v;
}

Complex eval(const GridFunction& f, int edge, double tau) {
  const auto& t = f.mesh->edges.at(edge).nodes;
  const auto& v = f.edge(edge);
  if (tau <= t.front()) return v[0];
  if (tau >= t.back()) return v[v.size() - 1];
  auto it = std::upper_bound(t.begin(), t.end(), tau);
  const std::size_t i = static_cast<std::size_t>(it - t.begin()) - 1;
  const double w = (tau - t[i]) / (t[i + 1] - t[i]);
  return (1.0 - w) * v[i] + w * v[i + 1];
}

}  // namespace stargraph
