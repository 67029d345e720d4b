#include "obroute/splittable.hpp"

#include <cmath>
#include <stdexcept>

#include "obroute/parallel.hpp"

namespace obroute {

Eigen::MatrixXd CommodityFlow::to_matrix(const Graph& g) const {
  const int n = g.num_vertices();
  Eigen::MatrixXd r = Eigen::MatrixXd::Zero(n, n);
  for (int l = 0; l < g.num_links(); ++l) {
    const Link& link = g.links()[l];
    r(link.u, link.v) = link_flow[l];
    r(link.v, link.u) = -link_flow[l];
  }
  return r;
}

Eigen::RowVectorXd CommodityFlow::divergence(const Graph& g) const {
  return to_matrix(g).colwise().sum();
}

const Eigen::MatrixXd& SequentialTrace::op(int s) const {
  if (s < 1 || s > 2 * k) throw std::out_of_range("SequentialTrace::op: step out of range");
  if (s <= k) return *walk;
  return (*backward)[s - k - 1];
}

const CommodityFlow& RoutingPolicy::flow(Vertex i, Vertex j) const {
  const int n = num_vertices();
  if (i == j || i < 0 || j < 0 || i >= n || j >= n) {
    throw std::out_of_range("RoutingPolicy::flow: no commodity for this pair");
  }
  return flows[static_cast<std::size_t>(i) * n + j];
}

const SequentialTrace& RoutingPolicy::trace(Vertex i, Vertex j) const {
  if (!has_traces()) throw std::logic_error("policy was built without traces");
  const int n = num_vertices();
  if (i == j || i < 0 || j < 0 || i >= n || j >= n) {
    throw std::out_of_range("RoutingPolicy::trace: no commodity for this pair");
  }
  return traces[static_cast<std::size_t>(i) * n + j];
}

RoutingPolicy compute_policy(const WalkGraph& walk, const PolicyOptions& options) {
  const Graph& g = walk.graph;
  require_connected(g);
  const int k = walk.profile.k;
  if (k < 1) throw std::logic_error("compute_policy: profile has no mixing step count");
  if (!(walk.profile.lambda_bar < 1.0)) throw std::logic_error("compute_policy: lambda_bar >= 1");

  const int n = g.num_vertices();
  const int links = g.num_links();
  auto a = std::make_shared<const Eigen::MatrixXd>(transition_matrix(g));

  // powers[p] = A^p for p = 0 .. k.
  std::vector<Eigen::MatrixXd> powers(k + 1);
  powers[0] = Eigen::MatrixXd::Identity(n, n);
  for (int p = 1; p <= k; ++p) powers[p] = powers[p - 1] * (*a);
  // Rows of `spread` are sum_{s < k} e_i A^s, the mass that leaves each
  // vertex during the forward phase.
  Eigen::MatrixXd spread = Eigen::MatrixXd::Zero(n, n);
  for (int p = 0; p < k; ++p) spread += powers[p];

  RoutingPolicy policy;
  policy.graph = g;
  policy.profile = walk.profile;
  policy.flows.resize(static_cast<std::size_t>(n) * n);
  if (options.keep_traces) policy.traces.resize(static_cast<std::size_t>(n) * n);

  parallel_for(static_cast<std::size_t>(n), [&](std::size_t jj) {
    const int j = static_cast<int>(jj);
    // M^(k+s) = rev(e_j A^(k-s), A).
    auto backward = std::make_shared<std::vector<Eigen::MatrixXd>>();
    backward->reserve(k);
    for (int s = 1; s <= k; ++s) {
      backward->push_back(reverse_operator(powers[k - s].row(j), *a));
    }
    for (int i = 0; i < n; ++i) {
      if (i == j) continue;
      Eigen::MatrixXd traffic = pointwise_mul(spread.row(i), *a);
      Eigen::RowVectorXd v = powers[k].row(i);
      SequentialTrace trace;
      if (options.keep_traces) {
        trace.states.reserve(2 * k + 1);
        for (int s = 0; s <= k; ++s) trace.states.push_back(powers[s].row(i));
      }
      for (int s = 0; s < k; ++s) {
        const Eigen::MatrixXd& m = (*backward)[s];
        traffic += pointwise_mul(v, m);
        v = (v * m).eval();
        if (options.keep_traces) trace.states.push_back(v);
      }
      CommodityFlow flow{i, j, Eigen::VectorXd(links)};
      for (int l = 0; l < links; ++l) {
        const Link& link = g.links()[l];
        flow.link_flow[l] = traffic(link.u, link.v) - traffic(link.v, link.u);
      }
      const std::size_t slot = static_cast<std::size_t>(i) * n + j;
      policy.flows[slot] = std::move(flow);
      if (options.keep_traces) {
        trace.source = i;
        trace.target = j;
        trace.k = k;
        trace.walk = a;
        trace.backward = backward;
        policy.traces[slot] = std::move(trace);
      }
    }
  });
  return policy;
}

RoutingPolicy compute_policy(const Graph& g, const PolicyOptions& options) {
  return compute_policy(lazify_if_needed(g), options);
}

namespace {

void require_same_links(const Graph& g, const RoutingPolicy& policy) {
  if (g.num_vertices() != policy.num_vertices() || g.num_links() != policy.graph.num_links()) {
    throw InputError("policy was computed on a different graph");
  }
  for (int l = 0; l < g.num_links(); ++l) {
    const Link& a = g.links()[l];
    const Link& b = policy.graph.links()[l];
    if (a.u != b.u || a.v != b.v || a.capacity != b.capacity) {
      throw InputError("policy was computed on a different graph");
    }
  }
}

}  // namespace

CongestionReport congestion(const Graph& g, const DemandMatrix& d, const RoutingPolicy& policy) {
  require_same_links(g, policy);
  const int n = g.num_vertices();
  validate_demand(d, n);
  Eigen::VectorXd load = Eigen::VectorXd::Zero(g.num_links());
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if (i == j || d(i, j) == 0.0) continue;
      load += d(i, j) * policy.flow(i, j).link_flow.cwiseAbs();
    }
  }
  for (int l = 0; l < g.num_links(); ++l) load[l] /= g.links()[l].weight;
  return make_congestion_report(std::move(load));
}

namespace {

// Divides link entries by capacity and clears everything else.
Eigen::MatrixXd per_capacity(const Graph& g, const Eigen::MatrixXd& traffic) {
  Eigen::MatrixXd cong = Eigen::MatrixXd::Zero(traffic.rows(), traffic.cols());
  for (const Link& l : g.links()) {
    cong(l.u, l.v) = traffic(l.u, l.v) / l.weight;
    cong(l.v, l.u) = traffic(l.v, l.u) / l.weight;
  }
  return cong;
}

}  // namespace

std::vector<Eigen::MatrixXd> sequential_congestion(const Graph& g, const DemandMatrix& d,
                                                   const RoutingPolicy& policy) {
  require_same_links(g, policy);
  if (!policy.has_traces()) throw InputError("sequential_congestion needs a policy with traces");
  const int n = g.num_vertices();
  validate_demand(d, n);
  const int k = policy.profile.k;
  std::vector<Eigen::MatrixXd> out;
  out.reserve(2 * k);
  for (int s = 1; s <= 2 * k; ++s) {
    Eigen::MatrixXd traffic = Eigen::MatrixXd::Zero(n, n);
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        if (i == j || d(i, j) == 0.0) continue;
        const SequentialTrace& t = policy.trace(i, j);
        traffic += pointwise_mul(d(i, j) * t.states[s - 1], t.op(s));
      }
    }
    out.push_back(per_capacity(g, traffic));
  }
  return out;
}

std::vector<Eigen::MatrixXd> rw_congestion(const Eigen::RowVectorXd& v, const Graph& g,
                                           int steps) {
  if (v.size() != g.num_vertices()) throw InputError("rw_congestion: dimension mismatch");
  if ((v.array() < 0.0).any()) throw InputError("rw_congestion: negative mass");
  if (steps < 0) throw InputError("rw_congestion: negative step count");
  const Eigen::MatrixXd a = transition_matrix(g);
  std::vector<Eigen::MatrixXd> out;
  out.reserve(steps);
  Eigen::RowVectorXd mass = v;
  for (int s = 1; s <= steps; ++s) {
    out.push_back(per_capacity(g, pointwise_mul(mass, a)));
    mass = (mass * a).eval();
  }
  return out;
}

double cycle_mass(const CommodityFlow& flow, const Graph& g) {
  const int n = g.num_vertices();
  constexpr double kEps = 1e-12;
  // Residual positive flow on directed arcs.
  std::vector<std::vector<std::pair<Vertex, double>>> out(n);
  for (int l = 0; l < g.num_links(); ++l) {
    const Link& link = g.links()[l];
    const double f = flow.link_flow[l];
    if (f > kEps) out[link.u].push_back({link.v, f});
    if (f < -kEps) out[link.v].push_back({link.u, -f});
  }
  double mass = 0.0;
  // Flow decomposition: follow positive arcs until a vertex repeats (cycle,
  // counted) or the walk dead-ends (path, discarded). Each round zeroes at
  // least one arc.
  while (true) {
    Vertex start = -1;
    for (Vertex x = 0; x < n && start < 0; ++x) {
      for (const auto& arc : out[x]) {
        if (arc.second > kEps) {
          start = x;
          break;
        }
      }
    }
    if (start < 0) break;
    std::vector<int> pos(n, -1);
    std::vector<std::pair<Vertex, std::size_t>> walk;  // (vertex, arc index)
    Vertex x = start;
    std::size_t from = 0;
    bool cycle = false;
    while (true) {
      pos[x] = static_cast<int>(walk.size());
      std::size_t pick = out[x].size();
      for (std::size_t a = 0; a < out[x].size(); ++a) {
        if (out[x][a].second > kEps) {
          pick = a;
          break;
        }
      }
      if (pick == out[x].size()) break;
      walk.emplace_back(x, pick);
      x = out[x][pick].first;
      if (pos[x] >= 0) {
        cycle = true;
        from = static_cast<std::size_t>(pos[x]);
        break;
      }
    }
    double bottleneck = INFINITY;
    for (std::size_t w = from; w < walk.size(); ++w) {
      bottleneck = std::min(bottleneck, out[walk[w].first][walk[w].second].second);
    }
    for (std::size_t w = from; w < walk.size(); ++w) {
      double& f = out[walk[w].first][walk[w].second].second;
      f = f - bottleneck > kEps ? f - bottleneck : 0.0;
    }
    if (cycle) mass += bottleneck * static_cast<double>(walk.size() - from);
  }
  return mass;
}

}  // namespace obroute
