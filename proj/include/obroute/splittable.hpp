#pragma once

#include <Eigen/Dense>

#include <memory>
#include <vector>

#include "obroute/congestion.hpp"
#include "obroute/graph.hpp"
#include "obroute/matrix_ops.hpp"
#include "obroute/spectral.hpp"

namespace obroute {

// Unit flow from source to target. link_flow[l] is signed along the link's
// u -> v orientation (u < v).
struct CommodityFlow {
  Vertex source = 0;
  Vertex target = 0;
  Eigen::VectorXd link_flow;

  // Antisymmetric n x n edge-flow matrix.
  Eigen::MatrixXd to_matrix(const Graph& g) const;
  // Net outflow per vertex as the column-sum row vector 1 r, which equals
  // e_target - e_source for a unit flow.
  Eigen::RowVectorXd divergence(const Graph& g) const;
};

// The 2k operators and 2k + 1 states of one commodity's sequential scheme.
// Operators are shared between commodities with the same target.
struct SequentialTrace {
  Vertex source = 0;
  Vertex target = 0;
  int k = 0;
  std::vector<Eigen::RowVectorXd> states;  // v^(0) .. v^(2k)
  std::shared_ptr<const Eigen::MatrixXd> walk;
  std::shared_ptr<const std::vector<Eigen::MatrixXd>> backward;  // M^(k+1) .. M^(2k)

  // M^(s) for s in [1, 2k].
  const Eigen::MatrixXd& op(int s) const;
};

struct PolicyOptions {
  bool keep_traces = false;
};

// Deterministic splittable oblivious routing: k walk steps out of the source
// followed by k reversed walk steps into the target.
struct RoutingPolicy {
  Graph graph;  // walk graph, possibly with loops
  SpectralProfile profile;
  std::vector<CommodityFlow> flows;     // index source * n + target
  std::vector<SequentialTrace> traces;  // same indexing, empty unless kept

  int num_vertices() const { return graph.num_vertices(); }
  const CommodityFlow& flow(Vertex i, Vertex j) const;
  const SequentialTrace& trace(Vertex i, Vertex j) const;
  bool has_traces() const { return !traces.empty(); }
};

RoutingPolicy compute_policy(const WalkGraph& walk, const PolicyOptions& options = {});
// Lazifies first.
RoutingPolicy compute_policy(const Graph& g, const PolicyOptions& options = {});

// EDGE-CONG(e) = sum_ij D_ij |r_ij(e)| / c(e).
CongestionReport congestion(const Graph& g, const DemandMatrix& d, const RoutingPolicy& policy);

// CONG_D^(s)(x, y) = TRAF_D^(s)(x, y) / c(x, y) for s = 1 .. 2k, with
// TRAF_D^(s) = sum_ij (D_ij v_ij^(s-1)) * M_ij^(s). Diagonal entries (loop
// traffic) are zero. Requires a policy built with keep_traces.
std::vector<Eigen::MatrixXd> sequential_congestion(const Graph& g, const DemandMatrix& d,
                                                   const RoutingPolicy& policy);

// RW-CONG_v^(s)(x, y) = (v A^(s-1))_x A_xy / c(x, y) for s = 1 .. steps.
std::vector<Eigen::MatrixXd> rw_congestion(const Eigen::RowVectorXd& v, const Graph& g,
                                           int steps);

// Flow mass carried on directed cycles of r_ij, i.e. sum over cancelled
// cycles of (cycle flow * cycle length). Diagnostic only; flows are never
// modified.
double cycle_mass(const CommodityFlow& flow, const Graph& g);

}  // namespace obroute
