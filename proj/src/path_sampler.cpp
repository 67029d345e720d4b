#include "obroute/path_sampler.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "obroute/parallel.hpp"

namespace obroute {

namespace {

constexpr int kMaxRedraws = 3;
constexpr int kMaxResampleWalks = 1'000'000;

}  // namespace

WalkSampler::WalkSampler(const Graph& g) : cumulative_(g.num_vertices()) {
  for (Vertex x = 0; x < g.num_vertices(); ++x) {
    const double d = g.degrees()[x];
    double acc = 0.0;
    for (const Arc& a : g.arcs(x)) {
      acc += a.weight / d;
      cumulative_[x].emplace_back(acc, a.to);
    }
    if (!cumulative_[x].empty()) cumulative_[x].back().first = 1.0;
  }
}

Vertex WalkSampler::step(Vertex from, Rng& rng) const {
  const auto& table = cumulative_[from];
  if (table.empty()) throw std::logic_error("walk from an isolated vertex");
  const double u = rng.uniform();
  for (const auto& [bound, to] : table) {
    if (u < bound) return to;
  }
  return table.back().second;
}

void WalkSampler::walk(Vertex from, int length, Rng& rng, std::vector<Vertex>& out) const {
  out.push_back(from);
  for (int s = 0; s < length; ++s) {
    from = step(from, rng);
    out.push_back(from);
  }
}

VertexSampler::VertexSampler(const Eigen::RowVectorXd& weights) {
  double acc = 0.0;
  cumulative_.reserve(weights.size());
  for (Eigen::Index i = 0; i < weights.size(); ++i) {
    acc += weights[i];
    cumulative_.push_back(acc);
  }
  if (cumulative_.empty() || acc <= 0) throw InputError("empty sampling distribution");
  for (double& c : cumulative_) c /= acc;
  cumulative_.back() = 1.0;
}

Vertex VertexSampler::draw(Rng& rng) const {
  const double u = rng.uniform();
  auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), u);
  if (it == cumulative_.end()) --it;
  return static_cast<Vertex>(it - cumulative_.begin());
}

std::size_t PathSpace::bucket_slot(Vertex x, Vertex y) const {
  if (x < 0 || y < 0 || x >= n_ || y >= n_) throw std::out_of_range("bucket vertex out of range");
  const auto lo = static_cast<std::size_t>(std::min(x, y));
  const auto hi = static_cast<std::size_t>(std::max(x, y));
  return lo * static_cast<std::size_t>(n_) + hi;
}

std::span<const Vertex> PathSpace::path(std::uint32_t id) const {
  const std::size_t len = static_cast<std::size_t>(k_) + 1;
  return std::span<const Vertex>(vertices_).subspan(id * len, len);
}

std::span<const std::uint32_t> PathSpace::bucket(Vertex x, Vertex y) const {
  return buckets_[bucket_slot(x, y)];
}

int PathSpace::empty_buckets() const {
  int empty = 0;
  for (Vertex x = 0; x < n_; ++x)
    for (Vertex y = x; y < n_; ++y)
      if (bucket(x, y).empty()) ++empty;
  return empty;
}

bool PathSpace::contains(std::span<const Vertex> p) const {
  if (static_cast<int>(p.size()) != k_ + 1) return false;
  for (std::uint32_t id : bucket(p.front(), p.back())) {
    const auto stored = path(id);
    if (std::equal(stored.begin(), stored.end(), p.begin()) ||
        std::equal(stored.rbegin(), stored.rend(), p.begin())) {
      return true;
    }
  }
  return false;
}

SampledPath PathSpace::oriented(std::uint32_t id, Vertex from) const {
  const auto stored = path(id);
  SampledPath out;
  if (stored.front() == from) {
    out.vertices.assign(stored.begin(), stored.end());
  } else if (stored.back() == from) {
    out.vertices.assign(stored.rbegin(), stored.rend());
  } else {
    throw std::invalid_argument("vertex is not an endpoint of the stored walk");
  }
  return out;
}

std::int64_t sample_space_scale(int n, double pi_min) {
  return static_cast<std::int64_t>(std::ceil(24.0 * std::log(static_cast<double>(n)) /
                                             (pi_min * pi_min)));
}

PathSpace build_sample_space(std::shared_ptr<const WalkGraph> walk, std::uint64_t seed,
                             const SampleSpaceOptions& options) {
  const Graph& g = walk->graph;
  const int n = g.num_vertices();
  if (n < 2) throw InputError("sample space needs n >= 2");
  require_connected(g);
  const SpectralProfile& profile = walk->profile;
  if (profile.k < 1) throw std::logic_error("profile has no mixing step count");

  PathSpace space;
  space.walk_ = walk;
  space.n_ = n;
  space.k_ = profile.k;
  space.m_ = options.walks_scale.value_or(sample_space_scale(n, profile.pi_min));
  space.seed_ = seed;
  space.walks_from_.resize(n);
  for (Vertex x = 0; x < n; ++x) {
    space.walks_from_[x] =
        static_cast<std::int64_t>(std::ceil(static_cast<double>(space.m_) * profile.pi[x]));
  }

  space.walker_ = std::make_shared<const WalkSampler>(g);
  space.stationary_ = std::make_shared<const VertexSampler>(profile.pi);
  const WalkSampler& sampler = *space.walker_;
  const std::size_t len = static_cast<std::size_t>(space.k_) + 1;
  std::vector<std::vector<Vertex>> per_vertex(n);
  parallel_for(static_cast<std::size_t>(n), [&](std::size_t xx) {
    const Vertex x = static_cast<Vertex>(xx);
    Rng rng(derive_seed(seed, "walk", static_cast<std::uint64_t>(x)));
    auto& out = per_vertex[x];
    out.reserve(static_cast<std::size_t>(space.walks_from_[x]) * len);
    for (std::int64_t w = 0; w < space.walks_from_[x]; ++w) sampler.walk(x, space.k_, rng, out);
  });

  const std::int64_t total =
      std::accumulate(space.walks_from_.begin(), space.walks_from_.end(), std::int64_t{0});
  if (total > static_cast<std::int64_t>(UINT32_MAX)) throw InputError("sample space too large");
  space.vertices_.reserve(static_cast<std::size_t>(total) * len);
  space.origins_.reserve(static_cast<std::size_t>(total));
  space.buckets_.assign(static_cast<std::size_t>(n) * n, {});
  for (Vertex x = 0; x < n; ++x) {
    const auto& walks = per_vertex[x];
    for (std::size_t off = 0; off < walks.size(); off += len) {
      const auto id = static_cast<std::uint32_t>(space.origins_.size());
      space.origins_.push_back(x);
      space.vertices_.insert(space.vertices_.end(), walks.begin() + off,
                             walks.begin() + off + len);
      space.buckets_[space.bucket_slot(x, walks[off + len - 1])].push_back(id);
    }
    std::vector<Vertex>().swap(per_vertex[x]);
  }
  return space;
}

PathSpace build_sample_space(const WalkGraph& walk, std::uint64_t seed,
                             const SampleSpaceOptions& options) {
  return build_sample_space(std::make_shared<const WalkGraph>(walk), seed, options);
}

namespace {

// Leg from `from` to `to`: uniform over the bucket, or by rejection sampling
// fresh walks when the bucket is empty.
SampledPath pick_leg(const PathSpace& space, const WalkSampler& sampler, Vertex from, Vertex to,
                     Rng& rng, int& resamples) {
  const auto ids = space.bucket(from, to);
  if (!ids.empty()) return space.oriented(ids[rng.below(ids.size())], from);
  ++resamples;
  std::vector<Vertex> buf;
  for (int attempt = 0; attempt < kMaxResampleWalks; ++attempt) {
    buf.clear();
    const bool forward = attempt % 2 == 0;
    sampler.walk(forward ? from : to, space.k(), rng, buf);
    if (buf.back() != (forward ? to : from)) continue;
    SampledPath leg;
    leg.resampled = true;
    if (forward) {
      leg.vertices = std::move(buf);
    } else {
      leg.vertices.assign(buf.rbegin(), buf.rend());
    }
    return leg;
  }
  throw std::runtime_error("no length-k walk found between " + std::to_string(from) + " and " +
                           std::to_string(to));
}

}  // namespace

TwoLegPath select_path(const PathSpace& space, Vertex x, Vertex y, Rng& rng) {
  const int n = space.num_vertices();
  if (x == y) throw InputError("select_path needs x != y");
  if (x < 0 || y < 0 || x >= n || y >= n) throw InputError("select_path: vertex out of range");
  const VertexSampler& stationary = space.stationary();

  TwoLegPath out;
  out.source = x;
  out.destination = y;
  Vertex r = stationary.draw(rng);
  while ((space.bucket(x, r).empty() || space.bucket(r, y).empty()) && out.redraws < kMaxRedraws) {
    r = stationary.draw(rng);
    ++out.redraws;
  }
  out.intermediate = r;
  const WalkSampler& sampler = space.walker();
  out.alpha = pick_leg(space, sampler, x, r, rng, out.resamples);
  out.beta = pick_leg(space, sampler, r, y, rng, out.resamples);
  out.gamma = out.alpha.vertices;
  out.gamma.insert(out.gamma.end(), out.beta.vertices.begin() + 1, out.beta.vertices.end());
  return out;
}

TwoLegPath select_path(const PathSpace& space, Vertex x, Vertex y, std::uint64_t seed) {
  Rng rng(derive_seed(seed, "select", static_cast<std::uint64_t>(x),
                      static_cast<std::uint64_t>(y)));
  return select_path(space, x, y, rng);
}

int walk_edge_count(const Graph& g) { return g.num_links() + g.num_vertices(); }

int walk_edge_index(const Graph& g, Vertex x, Vertex y) {
  if (x == y) {
    if (x < 0 || x >= g.num_vertices() || g.self_loops()[x] <= 0) return -1;
    return g.num_links() + x;
  }
  return g.link_index(x, y);
}

void accumulate_traversals(const Graph& g, std::span<const Vertex> path, double weight,
                           Eigen::VectorXd& load) {
  for (std::size_t s = 1; s < path.size(); ++s) {
    const int e = walk_edge_index(g, path[s - 1], path[s]);
    if (e < 0) throw InputError("path step is not an edge of the graph");
    load[e] += weight;
  }
}

EdgeLoad edge_load(const PathSpace& space, std::span<const SampledPath> legs) {
  const Graph& g = space.graph();
  const SpectralProfile& p = space.profile();
  EdgeLoad out{Eigen::VectorXd::Zero(walk_edge_count(g))};
  for (const SampledPath& leg : legs) {
    if (leg.vertices.empty()) throw InputError("empty leg");
    if (!leg.resampled && !space.contains(leg.vertices)) {
      throw InputError("leg is not a path of the sample space");
    }
    accumulate_traversals(g, leg.vertices, p.pi[leg.origin()] / p.pi_max, out.per_edge);
  }
  return out;
}

LoadStatistics load_statistics(const WalkGraph& walk, int trials, std::uint64_t seed,
                               const SampleSpaceOptions& options) {
  if (trials < 1) throw InputError("load_statistics needs at least one trial");
  auto shared = std::make_shared<const WalkGraph>(walk);
  const Graph& g = walk.graph;
  const SpectralProfile& p = walk.profile;
  const int n = g.num_vertices();
  const int edges = walk_edge_count(g);

  struct Trial {
    Eigen::VectorXd first;
    Eigen::VectorXd second;
    bool empty = false;
    int resamples = 0;
  };
  std::vector<Trial> results(static_cast<std::size_t>(trials));
  const VertexSampler stationary(p.pi);

  parallel_for(static_cast<std::size_t>(trials), [&](std::size_t t) {
    const PathSpace space = build_sample_space(shared, derive_seed(seed, "trial-space", t), options);
    Rng rng(derive_seed(seed, "trial-assign", t));
    std::vector<Vertex> targets(n);
    std::iota(targets.begin(), targets.end(), 0);
    rng.shuffle(targets);
    const WalkSampler& sampler = space.walker();
    Trial& out = results[t];
    out.first = Eigen::VectorXd::Zero(edges);
    out.second = Eigen::VectorXd::Zero(edges);
    out.empty = space.empty_buckets() > 0;
    for (Vertex x = 0; x < n; ++x) {
      const Vertex r = stationary.draw(rng);
      const double w = p.pi[x] / p.pi_max;
      const SampledPath alpha = pick_leg(space, sampler, x, r, rng, out.resamples);
      const SampledPath beta = pick_leg(space, sampler, r, targets[x], rng, out.resamples);
      accumulate_traversals(g, alpha.vertices, w, out.first);
      accumulate_traversals(g, beta.vertices, w, out.second);
    }
  });

  LoadStatistics s;
  s.trials = trials;
  s.k = p.k;
  s.n = n;
  s.d_max = g.max_degree();
  s.pi_max = p.pi_max;
  s.mean_first = Eigen::VectorXd::Zero(edges);
  s.mean_second = Eigen::VectorXd::Zero(edges);
  s.tail_threshold = 9.0 * 3.0 * std::log(static_cast<double>(n)) +
                     18.0 / s.d_max * static_cast<double>(p.k) * p.k;
  for (const Trial& t : results) {
    s.mean_first += t.first;
    s.mean_second += t.second;
    s.max_load_first.push_back(t.first.maxCoeff());
    if (t.first.maxCoeff() > s.tail_threshold) ++s.tail_exceed_first;
    if (t.second.maxCoeff() > s.tail_threshold) ++s.tail_exceed_second;
    if (t.empty) ++s.empty_bucket_builds;
    s.resamples += t.resamples;
  }
  s.mean_first /= trials;
  s.mean_second /= trials;

  // Only edges that exist in the walk graph take part in the spread ratio.
  double lo = INFINITY;
  double hi = 0.0;
  for (int e = 0; e < edges; ++e) {
    const bool exists = e < g.num_links() || g.self_loops()[e - g.num_links()] > 0;
    if (!exists) continue;
    lo = std::min(lo, s.mean_first[e]);
    hi = std::max(hi, s.mean_first[e]);
  }
  s.sum_first = s.mean_first.sum();
  s.expected_sum = p.k / p.pi_max;
  s.spread_ratio = lo > 0 ? hi / lo : INFINITY;
  s.lower_band = 2.0 / 3.0 * p.k / s.d_max;
  s.upper_band = 6.0 * p.k / s.d_max;
  return s;
}

}  // namespace obroute
