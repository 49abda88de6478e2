#pragma once

#include <complex>
#include <memory>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

namespace stargraph {

using Complex = std::complex<double>;

/// A non-compact star graph: n half-line edges meeting at a single vertex,
/// truncated at length T for numerical purposes. The vertex sits at
/// parameter tau = 0 on every edge; derivatives at the vertex are taken in
/// the direction of increasing tau.
struct StarGraph {
  int n = 0;
  double truncation_length = 0.0;

  StarGraph(int edge_count, double T) : n(edge_count), truncation_length(T) {
    if (n < 2) throw std::invalid_argument("StarGraph: need at least 2 edges");
    if (T < 2.0)
      throw std::invalid_argument(
          "StarGraph: truncation length must be >= 2 (compact-support "
          "potentials live in tau <= 1)");
  }
};

enum class Grading { Uniform, GeometricTowardZero, Composite };

/// Mesh on one edge: strictly increasing nodes in [0, T], starting at 0.
struct EdgeMesh {
  int edge_index = 0;
  Grading grading = Grading::Uniform;
  std::vector<double> nodes;

  static EdgeMesh uniform(double T, int cells, int edge_index = 0);

  /// Geometric refinement toward the vertex: the step grows from min_step by
  /// `ratio` per cell until it reaches max_step, then stays uniform up to T.
  static EdgeMesh graded(double T, double min_step, double ratio,
                         double max_step, int edge_index = 0);

  static EdgeMesh from_nodes(std::vector<double> nodes, int edge_index = 0,
                             Grading grading = Grading::Composite);

  std::size_t size() const { return nodes.size(); }
  double length() const { return nodes.back(); }
  void validate() const;
};

/// The star graph together with one mesh per edge.
struct GraphMesh {
  StarGraph graph;
  std::vector<EdgeMesh> edges;

  GraphMesh(StarGraph g, std::vector<EdgeMesh> e);

  static std::shared_ptr<const GraphMesh> uniform(const StarGraph& g,
                                                  int cells_per_edge);
};

bool same_mesh(const GraphMesh& a, const GraphMesh& b);

/// Complex-valued function sampled on a GraphMesh, one array per edge.
class GridFunction {
 public:
  explicit GridFunction(std::shared_ptr<const GraphMesh> mesh);

  std::shared_ptr<const GraphMesh> mesh;
  std::vector<Eigen::VectorXcd> values;

  int edge_count() const { return mesh->graph.n; }
  Eigen::VectorXcd& edge(int k) { return values.at(k); }
  const Eigen::VectorXcd& edge(int k) const { return values.at(k); }
};

/// Trapezoidal approximation of the L2(G) inner product (f, g) = int f conj(g).
Complex l2_inner(const GridFunction& f, const GridFunction& g);
double l2_norm(const GridFunction& f);
double sup_norm(const GridFunction& f);

/// Vector (f_1(0), ..., f_n(0)) of values at the central vertex.
Eigen::VectorXcd vertex_values(const GridFunction& f);

/// Linear interpolation of a grid function at an arbitrary point of edge k.
Complex eval(const GridFunction& f, int edge, double tau);

}  // namespace stargraph
