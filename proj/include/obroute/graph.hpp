#pragma once

#include <boost/rational.hpp>
#include <Eigen/Dense>

#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace obroute {

using Vertex = int;
using Capacity = boost::rational<std::int64_t>;

inline double to_double(const Capacity& c) {
  return boost::rational_cast<double>(c);
}

// Thrown for malformed input: bad capacities, ids out of range, disconnected
// graphs handed to routing code.
class InputError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct EdgeSpec {
  Vertex u = 0;
  Vertex v = 0;
  Capacity capacity{1};
};

// One stored undirected edge, u <= v. Parallel edges between the same pair
// get consecutive parallel ids.
struct Edge {
  Vertex u = 0;
  Vertex v = 0;
  Capacity capacity{1};
  int parallel_id = 0;
};

// A distinct unordered vertex pair {u < v}; parallel edges aggregate into one
// link. Congestion is reported per link.
struct Link {
  Vertex u = 0;
  Vertex v = 0;
  Capacity capacity{0};
  double weight = 0.0;
};

// Outgoing transition of the walk at a vertex. link == -1 marks a self-loop.
struct Arc {
  Vertex to = 0;
  int link = -1;
  double weight = 0.0;
};

// Capacitated undirected multigraph with optional self-loops. Immutable after
// construction.
class Graph {
 public:
  Graph() = default;

  int num_vertices() const { return n_; }
  const std::vector<Edge>& edges() const { return edges_; }
  const std::vector<Link>& links() const { return links_; }
  int num_links() const { return static_cast<int>(links_.size()); }
  const std::vector<Capacity>& self_loops() const { return loops_; }
  bool has_loops() const;

  const Capacity& degree(Vertex x) const { return degree_[x]; }
  const std::vector<Capacity>& degree_vector() const { return degree_; }
  // Degrees as doubles, including loop capacity.
  const Eigen::VectorXd& degrees() const { return degree_value_; }
  double max_degree() const { return degree_value_.maxCoeff(); }
  double total_degree() const { return degree_value_.sum(); }

  bool connected() const { return connected_; }
  // Unit capacities, no loops, all degrees equal.
  bool is_regular() const;

  // Link index for {x, y}, or -1.
  int link_index(Vertex x, Vertex y) const;
  // Arcs sorted by target; includes the loop arc when the loop is nonzero.
  std::span<const Arc> arcs(Vertex x) const;

  // Same graph with loop capacity added at each vertex.
  Graph with_added_loops(std::span<const Capacity> extra) const;

  friend Graph build_graph(std::span<const EdgeSpec> edges, int n);

 private:
  void finalize();

  int n_ = 0;
  std::vector<Edge> edges_;
  std::vector<Link> links_;
  std::vector<Capacity> loops_;
  std::vector<Capacity> degree_;
  Eigen::VectorXd degree_value_;
  std::vector<std::vector<Arc>> arcs_;
  bool connected_ = false;
};

// Canonical graph from an edge list. n < 0 infers n = max id + 1.
// Throws InputError on nonpositive capacity, ids out of range or u == v.
Graph build_graph(std::span<const EdgeSpec> edges, int n = -1);

// Throws InputError unless g is connected with n >= 2.
void require_connected(const Graph& g);

struct UnitExpansion {
  Graph graph;
  // Edge index in `graph` -> edge index in the source graph.
  std::vector<int> projection;
  // All capacities were multiplied by this before splitting.
  std::int64_t scale = 1;
};

// Scales capacities by the LCM of their denominators, then replaces every
// edge of capacity c by c parallel unit edges. Loops are scaled, not split.
UnitExpansion unit_capacity_expansion(const Graph& g);

}  // namespace obroute
