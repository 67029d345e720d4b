#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "obroute/graph.hpp"
#include "obroute/rng.hpp"
#include "obroute/spectral.hpp"

namespace obroute {

// A length-k walk, vertices[0] is the origin. Consecutive vertices are
// adjacent or equal (loop step).
struct SampledPath {
  std::vector<Vertex> vertices;
  // Drawn on demand because the bucket was empty; not part of the space.
  bool resampled = false;

  Vertex origin() const { return vertices.front(); }
  Vertex terminal() const { return vertices.back(); }
  int length() const { return static_cast<int>(vertices.size()) - 1; }
};

// Samples capacity-weighted random walks on a fixed graph.
class WalkSampler {
 public:
  explicit WalkSampler(const Graph& g);
  Vertex step(Vertex from, Rng& rng) const;
  void walk(Vertex from, int length, Rng& rng, std::vector<Vertex>& out) const;

 private:
  std::vector<std::vector<std::pair<double, Vertex>>> cumulative_;
};

// Draws vertices from a distribution given as a row vector.
class VertexSampler {
 public:
  explicit VertexSampler(const Eigen::RowVectorXd& weights);
  Vertex draw(Rng& rng) const;

 private:
  std::vector<double> cumulative_;
};

struct SampleSpaceOptions {
  // Overrides m = ceil(24 ln n / pi_min^2); tests use it to shrink spaces.
  std::optional<std::int64_t> walks_scale;
};

// Buckets of length-k walks keyed by the unordered endpoint pair {x, y}
// (x == y allowed). Walks keep the orientation they were sampled in.
// Immutable after construction.
class PathSpace {
 public:
  int num_vertices() const { return n_; }
  int k() const { return k_; }
  std::int64_t m() const { return m_; }
  std::uint64_t seed() const { return seed_; }
  const Graph& graph() const { return walk_->graph; }
  const SpectralProfile& profile() const { return walk_->profile; }
  std::shared_ptr<const WalkGraph> walk_graph() const { return walk_; }
  const WalkSampler& walker() const { return *walker_; }
  const VertexSampler& stationary() const { return *stationary_; }

  std::int64_t total_walks() const { return static_cast<std::int64_t>(origins_.size()); }
  // Walks started from x: ceil(m pi_x).
  std::int64_t walks_from(Vertex x) const { return walks_from_[x]; }

  std::span<const Vertex> path(std::uint32_t id) const;
  std::span<const std::uint32_t> bucket(Vertex x, Vertex y) const;
  // Unordered pairs {x <= y} whose bucket is empty.
  int empty_buckets() const;
  // True when some copy of `p` (either orientation) is stored in its bucket.
  bool contains(std::span<const Vertex> p) const;
  // Stored walk `id` oriented to start at `from`, which must be an endpoint.
  SampledPath oriented(std::uint32_t id, Vertex from) const;

  friend PathSpace build_sample_space(std::shared_ptr<const WalkGraph> walk, std::uint64_t seed,
                                      const SampleSpaceOptions& options);

 private:
  std::size_t bucket_slot(Vertex x, Vertex y) const;

  std::shared_ptr<const WalkGraph> walk_;
  std::shared_ptr<const WalkSampler> walker_;
  std::shared_ptr<const VertexSampler> stationary_;
  int n_ = 0;
  int k_ = 0;
  std::int64_t m_ = 0;
  std::uint64_t seed_ = 0;
  std::vector<std::int64_t> walks_from_;
  std::vector<Vertex> vertices_;  // walk w occupies [w (k+1), (w+1)(k+1))
  std::vector<Vertex> origins_;
  std::vector<std::vector<std::uint32_t>> buckets_;
};

// From every vertex x, ceil(m pi_x) independent length-k walks; per-vertex RNG
// streams derived from `seed`. Throws InputError for n < 2.
PathSpace build_sample_space(std::shared_ptr<const WalkGraph> walk, std::uint64_t seed,
                             const SampleSpaceOptions& options = {});
PathSpace build_sample_space(const WalkGraph& walk, std::uint64_t seed,
                             const SampleSpaceOptions& options = {});

std::int64_t sample_space_scale(int n, double pi_min);

struct TwoLegPath {
  Vertex source = 0;
  Vertex destination = 0;
  Vertex intermediate = 0;
  SampledPath alpha;  // source -> intermediate
  SampledPath beta;   // intermediate -> destination
  std::vector<Vertex> gamma;  // alpha then beta, 2k edges
  int redraws = 0;    // intermediates redrawn because a bucket was empty
  int resamples = 0;  // legs drawn outside the space
};

// Intermediate r ~ pi, alpha uniform in B_{x,r}, beta uniform in B_{r,y},
// both oriented to run forward. On an empty bucket up to 3 fresh
// intermediates are drawn; after that the missing leg is sampled by fresh
// walks from its endpoints.
TwoLegPath select_path(const PathSpace& space, Vertex x, Vertex y, std::uint64_t seed);
// Same, drawing from an existing stream.
TwoLegPath select_path(const PathSpace& space, Vertex x, Vertex y, Rng& rng);

// Walk edges are the links of the walk graph followed by one loop slot per
// vertex (index num_links + x).
int walk_edge_count(const Graph& g);
// Index of the walk edge used by the step x -> y; -1 when there is none.
int walk_edge_index(const Graph& g, Vertex x, Vertex y);
// Adds, for each step of `path`, `weight` to the traversed walk edge.
void accumulate_traversals(const Graph& g, std::span<const Vertex> path, double weight,
                           Eigen::VectorXd& load);

// W_e = (1 / pi_max) sum_x pi_x [traversals of e by alpha_x], with x the
// origin of each leg. Repeated traversals count each time.
struct EdgeLoad {
  Eigen::VectorXd per_edge;
  double max() const { return per_edge.size() ? per_edge.maxCoeff() : 0.0; }
};

// Throws InputError if a non-resampled leg is not stored in `space`.
EdgeLoad edge_load(const PathSpace& space, std::span<const SampledPath> legs);

struct LoadStatistics {
  int trials = 0;
  int k = 0;
  int n = 0;
  double d_max = 0.0;  // of the walk graph
  double pi_max = 0.0;
  Eigen::VectorXd mean_first;   // Monte Carlo E[W_e], first legs
  Eigen::VectorXd mean_second;  // same for second legs
  double sum_first = 0.0;
  double expected_sum = 0.0;    // k / pi_max
  double spread_ratio = 0.0;    // max_e / min_e of mean_first
  double lower_band = 0.0;      // (2/3) k / d_max
  double upper_band = 0.0;      // 6 k / d_max
  double tail_threshold = 0.0;  // 9 (2 + 1) ln n + (18 / d_max) k^2
  int tail_exceed_first = 0;    // trials with max_e W_e above threshold
  int tail_exceed_second = 0;
  std::vector<double> max_load_first;  // per trial
  int empty_bucket_builds = 0;
  int resamples = 0;
};

// Fresh sample space and fresh leg assignment per trial: every vertex picks a
// pi-random intermediate for its first leg, and second legs run to a random
// permutation of the vertices.
LoadStatistics load_statistics(const WalkGraph& walk, int trials, std::uint64_t seed,
                               const SampleSpaceOptions& options = {});

}  // namespace obroute
