#include "obroute/graph.hpp"

#include <algorithm>
#include <numeric>
#include <queue>

namespace obroute {

namespace {

constexpr std::int64_t kMaxExpandedEdges = 10'000'000;

}  // namespace

bool Graph::has_loops() const {
  return std::any_of(loops_.begin(), loops_.end(),
                     [](const Capacity& c) { return c > Capacity{0}; });
}

bool Graph::is_regular() const {
  if (n_ == 0 || has_loops()) return false;
  for (const Edge& e : edges_) {
    if (e.capacity != Capacity{1}) return false;
  }
  return std::all_of(degree_.begin(), degree_.end(),
                     [&](const Capacity& d) { return d == degree_[0]; });
}

int Graph::link_index(Vertex x, Vertex y) const {
  if (x == y || x < 0 || y < 0 || x >= n_ || y >= n_) return -1;
  const auto& out = arcs_[x];
  auto it = std::lower_bound(out.begin(), out.end(), y,
                             [](const Arc& a, Vertex t) { return a.to < t; });
  if (it == out.end() || it->to != y) return -1;
  return it->link;
}

std::span<const Arc> Graph::arcs(Vertex x) const { return arcs_[x]; }

Graph Graph::with_added_loops(std::span<const Capacity> extra) const {
  if (static_cast<int>(extra.size()) != n_) {
    throw InputError("loop vector size does not match vertex count");
  }
  Graph g = *this;
  for (int x = 0; x < n_; ++x) {
    if (extra[x] < Capacity{0}) throw InputError("negative loop capacity");
    g.loops_[x] += extra[x];
  }
  g.finalize();
  return g;
}

void Graph::finalize() {
  links_.clear();
  for (const Edge& e : edges_) {
    if (!links_.empty() && links_.back().u == e.u && links_.back().v == e.v) {
      links_.back().capacity += e.capacity;
    } else {
      links_.push_back(Link{e.u, e.v, e.capacity, 0.0});
    }
  }
  for (Link& l : links_) l.weight = to_double(l.capacity);

  degree_.assign(n_, Capacity{0});
  for (const Link& l : links_) {
    degree_[l.u] += l.capacity;
    degree_[l.v] += l.capacity;
  }
  for (int x = 0; x < n_; ++x) degree_[x] += loops_[x];
  degree_value_.resize(n_);
  for (int x = 0; x < n_; ++x) degree_value_[x] = to_double(degree_[x]);

  arcs_.assign(n_, {});
  for (int id = 0; id < static_cast<int>(links_.size()); ++id) {
    const Link& l = links_[id];
    arcs_[l.u].push_back(Arc{l.v, id, l.weight});
    arcs_[l.v].push_back(Arc{l.u, id, l.weight});
  }
  for (int x = 0; x < n_; ++x) {
    if (loops_[x] > Capacity{0}) arcs_[x].push_back(Arc{x, -1, to_double(loops_[x])});
    std::sort(arcs_[x].begin(), arcs_[x].end(),
              [](const Arc& a, const Arc& b) { return a.to < b.to; });
  }

  connected_ = n_ > 0;
  if (n_ > 0) {
    std::vector<char> seen(n_, 0);
    std::queue<Vertex> frontier;
    frontier.push(0);
    seen[0] = 1;
    int reached = 1;
    while (!frontier.empty()) {
      Vertex x = frontier.front();
      frontier.pop();
      for (const Arc& a : arcs_[x]) {
        if (!seen[a.to]) {
          seen[a.to] = 1;
          ++reached;
          frontier.push(a.to);
        }
      }
    }
    connected_ = reached == n_;
  }
}

Graph build_graph(std::span<const EdgeSpec> edges, int n) {
  if (n < 0) {
    n = 0;
    for (const EdgeSpec& e : edges) n = std::max({n, e.u + 1, e.v + 1});
  }
  Graph g;
  g.n_ = n;
  g.loops_.assign(n, Capacity{0});
  g.edges_.reserve(edges.size());
  for (const EdgeSpec& e : edges) {
    if (e.u < 0 || e.v < 0 || e.u >= n || e.v >= n) {
      throw InputError("vertex id out of range: " + std::to_string(e.u) + " " +
                       std::to_string(e.v));
    }
    if (e.u == e.v) {
      throw InputError("self-edge at vertex " + std::to_string(e.u) +
                       " (loops are only added by lazification)");
    }
    if (e.capacity <= Capacity{0}) {
      throw InputError("nonpositive capacity on edge " + std::to_string(e.u) +
                       "-" + std::to_string(e.v));
    }
    g.edges_.push_back(
        Edge{std::min(e.u, e.v), std::max(e.u, e.v), e.capacity, 0});
  }
  std::stable_sort(g.edges_.begin(), g.edges_.end(),
                   [](const Edge& a, const Edge& b) {
                     return std::pair(a.u, a.v) < std::pair(b.u, b.v);
                   });
  for (std::size_t i = 1; i < g.edges_.size(); ++i) {
    const Edge& prev = g.edges_[i - 1];
    Edge& cur = g.edges_[i];
    if (prev.u == cur.u && prev.v == cur.v) cur.parallel_id = prev.parallel_id + 1;
  }
  g.finalize();
  return g;
}

void require_connected(const Graph& g) {
  if (g.num_vertices() < 2) {
    throw InputError("graph needs at least two vertices");
  }
  if (!g.connected()) throw InputError("graph is disconnected");
}

UnitExpansion unit_capacity_expansion(const Graph& g) {
  std::int64_t scale = 1;
  auto absorb = [&](const Capacity& c) {
    scale = std::lcm(scale, c.denominator());
    if (scale <= 0 || scale > kMaxExpandedEdges) {
      throw InputError("capacity denominators too large to expand");
    }
  };
  for (const Edge& e : g.edges()) absorb(e.capacity);
  for (const Capacity& c : g.self_loops()) absorb(c);

  std::vector<EdgeSpec> specs;
  std::vector<int> projection;
  std::int64_t total = 0;
  for (int id = 0; id < static_cast<int>(g.edges().size()); ++id) {
    const Edge& e = g.edges()[id];
    const Capacity scaled = e.capacity * scale;
    const std::int64_t copies = scaled.numerator();
    total += copies;
    if (total > kMaxExpandedEdges) {
      throw InputError("unit expansion exceeds edge budget");
    }
    for (std::int64_t c = 0; c < copies; ++c) {
      specs.push_back(EdgeSpec{e.u, e.v, Capacity{1}});
      projection.push_back(id);
    }
  }
  UnitExpansion out;
  out.graph = build_graph(specs, g.num_vertices());
  // build_graph sorts stably by (u, v), and g.edges() is already in that
  // order, so the projection computed above stays aligned.
  std::vector<Capacity> loops(g.num_vertices());
  for (int x = 0; x < g.num_vertices(); ++x) loops[x] = g.self_loops()[x] * scale;
  if (g.has_loops()) out.graph = out.graph.with_added_loops(loops);
  out.projection = std::move(projection);
  out.scale = scale;
  return out;
}

}  // namespace obroute
