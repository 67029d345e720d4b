#include "obroute/unsplittable.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "obroute/demands.hpp"
#include "obroute/parallel.hpp"
#include "obroute/rng.hpp"

namespace obroute {

namespace {

void require_same_links(const Graph& g, const Graph& walk) {
  if (g.num_vertices() != walk.num_vertices() || g.num_links() != walk.num_links()) {
    throw InputError("graph does not match the policy's walk graph");
  }
  for (int l = 0; l < g.num_links(); ++l) {
    if (g.links()[l].u != walk.links()[l].u || g.links()[l].v != walk.links()[l].v) {
      throw InputError("graph does not match the policy's walk graph");
    }
  }
}

std::span<const Vertex> part_of(const TwoLegPath& p, PathPart part) {
  if (part == PathPart::FirstLeg) return p.alpha.vertices;
  return p.gamma;
}

// Unscaled link traffic of the chosen path part under demand d.
Eigen::VectorXd link_traffic(const Graph& g, const DemandMatrix& d,
                             const UnsplittablePolicy& policy, PathPart part) {
  const int n = g.num_vertices();
  Eigen::VectorXd flow = Eigen::VectorXd::Zero(g.num_links());
  for (int x = 0; x < n; ++x) {
    for (int y = 0; y < n; ++y) {
      if (x == y || d(x, y) == 0.0) continue;
      accumulate_link_traversals(g, part_of(policy.path(x, y), part), d(x, y), flow);
    }
  }
  return flow;
}

}  // namespace

const TwoLegPath& UnsplittablePolicy::path(Vertex x, Vertex y) const {
  const int n = num_vertices();
  if (x < 0 || y < 0 || x >= n || y >= n || x == y) {
    throw std::out_of_range("no path for this pair");
  }
  return paths[static_cast<std::size_t>(x) * n + y];
}

int UnsplittablePolicy::resamples() const {
  int total = 0;
  for (const TwoLegPath& p : paths) total += p.resamples;
  return total;
}

UnsplittablePolicy build_policy(const WalkGraph& walk, std::uint64_t seed,
                                const SampleSpaceOptions& options) {
  auto shared = std::make_shared<const WalkGraph>(walk);
  UnsplittablePolicy policy;
  policy.seed = seed;
  policy.space = std::make_shared<const PathSpace>(
      build_sample_space(shared, derive_seed(seed, "space"), options));
  const int n = walk.graph.num_vertices();
  const std::uint64_t select_seed = derive_seed(seed, "select");
  policy.paths.resize(static_cast<std::size_t>(n) * n);
  parallel_for(static_cast<std::size_t>(n) * n, [&](std::size_t idx) {
    const Vertex x = static_cast<Vertex>(idx / n);
    const Vertex y = static_cast<Vertex>(idx % n);
    if (x != y) policy.paths[idx] = select_path(*policy.space, x, y, select_seed);
  });
  return policy;
}

UnsplittablePolicy build_policy(const Graph& g, std::uint64_t seed,
                                const SampleSpaceOptions& options) {
  return build_policy(lazify_if_needed(g), seed, options);
}

void accumulate_link_traversals(const Graph& g, std::span<const Vertex> path, double weight,
                                Eigen::VectorXd& link_flow) {
  for (std::size_t i = 1; i < path.size(); ++i) {
    if (path[i - 1] == path[i]) continue;
    const int l = g.link_index(path[i - 1], path[i]);
    if (l < 0) throw InputError("path step does not follow a link");
    link_flow[l] += weight;
  }
}

CongestionReport unsplittable_congestion(const Graph& g, const DemandMatrix& d,
                                         const UnsplittablePolicy& policy) {
  validate_demand(d, g.num_vertices());
  require_same_links(g, policy.walk_graph());
  Eigen::VectorXd flow = link_traffic(g, d, policy, PathPart::Full);
  for (int l = 0; l < g.num_links(); ++l) flow[l] /= g.links()[l].weight;
  return make_congestion_report(std::move(flow));
}

NormalizedDemandProfile normalized_profile(const Graph& g, const DemandMatrix& d) {
  const int n = g.num_vertices();
  validate_demand(d, n);
  NormalizedDemandProfile out;
  const Eigen::VectorXd& deg = g.degrees();
  if (n == 0 || deg.minCoeff() <= 0.0) throw InputError("normalized profile needs positive degrees");
  out.d_max = deg.maxCoeff();
  out.tilde = (out.d_max / deg.array()).matrix().asDiagonal() * d;
  out.m = out.tilde.maxCoeff();
  out.row_max = out.tilde.rowwise().sum().maxCoeff();
  out.s = out.m > 0.0 ? std::clamp(out.row_max / out.m, 1.0, static_cast<double>(n)) : 1.0;
  return out;
}

OrderedDemandView ordered_view(const NormalizedDemandProfile& profile) {
  const Eigen::MatrixXd& t = profile.tilde;
  const int n = static_cast<int>(t.rows());
  OrderedDemandView view;
  view.order.resize(n);
  view.sorted = Eigen::MatrixXd::Zero(n, std::max(n - 1, 0));
  const double cap = profile.m * profile.s;
  for (int x = 0; x < n; ++x) {
    auto& order = view.order[x];
    for (int y = 0; y < n; ++y) {
      if (y != x) order.push_back(y);
    }
    std::stable_sort(order.begin(), order.end(),
                     [&](Vertex a, Vertex b) { return t(x, a) > t(x, b); });
    for (int r = 0; r < n - 1; ++r) {
      const double value = t(x, order[r]);
      view.sorted(x, r) = value;
      const int rank = r + 1;
      if (rank > profile.s) {
        const double excess = value - cap / rank;
        view.worst_tail_excess = std::max(view.worst_tail_excess, excess);
        if (excess > 1e-12 * std::max(1.0, cap)) view.tail_bound_holds = false;
      }
    }
  }
  return view;
}

std::vector<Eigen::VectorXd> rank_loads(const UnsplittablePolicy& policy,
                                        const OrderedDemandView& view, PathPart part) {
  const Graph& walk = policy.walk_graph();
  const int n = walk.num_vertices();
  const Eigen::RowVectorXd& pi = policy.space->profile().pi;
  const double pi_max = pi.maxCoeff();
  std::vector<Eigen::VectorXd> loads(std::max(n - 1, 0),
                                     Eigen::VectorXd::Zero(walk_edge_count(walk)));
  parallel_for(loads.size(), [&](std::size_t r) {
    for (int x = 0; x < n; ++x) {
      const Vertex y = view.order[x][r];
      accumulate_traversals(walk, part_of(policy.path(x, y), part), pi[x] / pi_max, loads[r]);
    }
  });
  return loads;
}

DecompositionCheck check_decomposition(const Graph& g, const DemandMatrix& d,
                                       const UnsplittablePolicy& policy, PathPart part) {
  require_same_links(g, policy.walk_graph());
  const NormalizedDemandProfile profile = normalized_profile(g, d);
  const OrderedDemandView view = ordered_view(profile);
  const auto loads = rank_loads(policy, view, part);
  const int links = g.num_links();

  DecompositionCheck out;
  out.lhs = link_traffic(g, d, policy, part);
  out.rhs = Eigen::VectorXd::Zero(links);
  for (std::size_t r = 0; r < loads.size(); ++r) {
    const double rank = static_cast<double>(r + 1);
    const double factor = rank <= profile.s ? 1.0 : profile.s / rank;
    out.rhs += factor * loads[r].head(links);
  }
  out.rhs *= profile.m;
  out.min_slack = links ? (out.rhs - out.lhs).minCoeff() : 0.0;
  for (int l = 0; l < links; ++l) {
    if (out.lhs[l] > out.rhs[l] + 1e-9 * (1.0 + out.rhs[l])) out.holds = false;
  }
  return out;
}

RatioAudit ratio_audit(const Graph& g, const DemandMatrix& d, const UnsplittablePolicy& policy,
                       double opt, double constant) {
  RatioAudit audit;
  audit.report = unsplittable_congestion(g, d, policy);
  audit.cong = audit.report.max;
  audit.opt = opt;
  attach_opt(audit.report, opt);
  audit.ratio = *audit.report.ratio;
  audit.constant = constant;
  const double ln_n = std::log(static_cast<double>(g.num_vertices()));
  audit.profile = normalized_profile(g, d);
  audit.bound = constant * (audit.profile.d_max * ln_n * ln_n + ln_n * policy.k());
  audit.flagged = audit.ratio > audit.bound;

  const OrderedDemandView view = ordered_view(audit.profile);
  audit.tail_bound_holds = view.tail_bound_holds;
  audit.full = check_decomposition(g, d, policy, PathPart::Full);
  audit.first_leg = check_decomposition(g, d, policy, PathPart::FirstLeg);
  audit.decomposition_holds = audit.full.holds && audit.first_leg.holds;
  for (const Eigen::VectorXd& w : rank_loads(policy, view, PathPart::FirstLeg)) {
    audit.max_rank_load = std::max(audit.max_rank_load, w.maxCoeff());
  }
  return audit;
}

RankTailStatistics rank_tail_statistics(const WalkGraph& walk, int trials, std::uint64_t seed,
                                        double density, const SampleSpaceOptions& options) {
  if (trials <= 0) throw InputError("trials must be positive");
  const Graph& g = walk.graph;
  const int n = g.num_vertices();
  RankTailStatistics out;
  out.trials = trials;
  out.n = n;
  out.k = walk.profile.k;
  const double k = walk.profile.k;
  out.threshold = 36.0 * std::log(static_cast<double>(n)) + 18.0 / g.max_degree() * k * k;

  std::vector<double> peak(trials, 0.0);
  parallel_for(static_cast<std::size_t>(trials), [&](std::size_t t) {
    const UnsplittablePolicy policy = build_policy(walk, derive_seed(seed, "rank-policy", t), options);
    const DemandMatrix d = random_demand(n, derive_seed(seed, "rank-demand", t), density);
    const OrderedDemandView view = ordered_view(normalized_profile(g, d));
    for (const Eigen::VectorXd& w : rank_loads(policy, view, PathPart::FirstLeg)) {
      peak[t] = std::max(peak[t], w.maxCoeff());
    }
  });
  for (double p : peak) {
    out.max_load = std::max(out.max_load, p);
    if (p > out.threshold) ++out.exceed;
  }
  return out;
}

}  // namespace obroute
