#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <memory>
#include <vector>

#include "obroute/congestion.hpp"
#include "obroute/graph.hpp"
#include "obroute/path_sampler.hpp"

namespace obroute {

// One two-leg path per ordered pair x != y, all drawn from one sample space.
// The policy never sees a demand matrix.
struct UnsplittablePolicy {
  std::shared_ptr<const PathSpace> space;
  std::uint64_t seed = 0;
  std::vector<TwoLegPath> paths;  // index x * n + y; diagonal entries unused

  int num_vertices() const { return space->num_vertices(); }
  int k() const { return space->k(); }
  const Graph& walk_graph() const { return space->graph(); }
  const TwoLegPath& path(Vertex x, Vertex y) const;
  int resamples() const;
};

UnsplittablePolicy build_policy(const Graph& g, std::uint64_t seed,
                                const SampleSpaceOptions& options = {});
UnsplittablePolicy build_policy(const WalkGraph& walk, std::uint64_t seed,
                                const SampleSpaceOptions& options = {});

// Adds weight * traversals to link_flow for each non-loop step of `path`.
// Repeated traversals count each time.
void accumulate_link_traversals(const Graph& g, std::span<const Vertex> path, double weight,
                                Eigen::VectorXd& link_flow);

// Per-link sum_xy D_xy [traversals of gamma_xy] / c(e).
CongestionReport unsplittable_congestion(const Graph& g, const DemandMatrix& d,
                                         const UnsplittablePolicy& policy);

struct NormalizedDemandProfile {
  DemandMatrix tilde;  // (d_max / d_i) D_ij
  double d_max = 0.0;
  double m = 0.0;        // max entry of tilde
  double row_max = 0.0;  // max row sum of tilde
  double s = 1.0;        // row_max / m clamped to [1, n]; 1 when m == 0

  // m s / d_max, a lower bound on OPT.
  double lower_bound() const { return d_max > 0 ? m * s / d_max : 0.0; }
};

// Throws InputError on a nonpositive degree or invalid demand.
NormalizedDemandProfile normalized_profile(const Graph& g, const DemandMatrix& d);

// Per-source destinations in decreasing demand, ties by destination id. The
// source itself is left out, so each row has n - 1 ranks.
struct OrderedDemandView {
  std::vector<std::vector<Vertex>> order;
  Eigen::MatrixXd sorted;  // n x (n - 1)
  // tilde^(t) <= m s / t for every rank t > s.
  bool tail_bound_holds = true;
  double worst_tail_excess = 0.0;
};

OrderedDemandView ordered_view(const NormalizedDemandProfile& profile);

enum class PathPart { FirstLeg, Full };

// W^(t)_e = (1 / pi_max) sum_x pi_x [traversals of e by the path of x's
// rank-t destination], t = 1 .. n - 1, over walk edges (links, then loops).
std::vector<Eigen::VectorXd> rank_loads(const UnsplittablePolicy& policy,
                                        const OrderedDemandView& view, PathPart part);

// Checks flow_e <= m (sum_{t <= s} W^(t)_e + s sum_{t > s} W^(t)_e / t) on
// every link, where flow_e is the unscaled traffic of the chosen path part.
struct DecompositionCheck {
  bool holds = true;
  double min_slack = 0.0;  // min over links of rhs - lhs
  Eigen::VectorXd lhs;
  Eigen::VectorXd rhs;
};

DecompositionCheck check_decomposition(const Graph& g, const DemandMatrix& d,
                                       const UnsplittablePolicy& policy, PathPart part);

inline constexpr double kDefaultAuditConstant = 40.0;

struct RatioAudit {
  double cong = 0.0;
  double opt = 0.0;
  double ratio = 0.0;
  double constant = kDefaultAuditConstant;  // empirical, not from the analysis
  double bound = 0.0;  // constant (d_max ln^2 n + k ln n)
  bool flagged = false;
  NormalizedDemandProfile profile;
  bool tail_bound_holds = true;
  DecompositionCheck full;
  DecompositionCheck first_leg;
  bool decomposition_holds = true;
  double max_rank_load = 0.0;  // max over t, e of first-leg W^(t)_e
  CongestionReport report;
};

// Throws std::domain_error when opt == 0 but the congestion is not.
RatioAudit ratio_audit(const Graph& g, const DemandMatrix& d, const UnsplittablePolicy& policy,
                       double opt, double constant = kDefaultAuditConstant);

// Fraction of trials with some rank t and walk edge e whose first-leg W^(t)_e
// exceeds 36 ln n + (18 / d_max) k^2. Each trial builds a fresh policy and a
// fresh random demand of the given density.
struct RankTailStatistics {
  int trials = 0;
  int n = 0;
  int k = 0;
  double threshold = 0.0;
  int exceed = 0;
  double max_load = 0.0;
  double frequency() const { return trials ? static_cast<double>(exceed) / trials : 0.0; }
};

RankTailStatistics rank_tail_statistics(const WalkGraph& walk, int trials, std::uint64_t seed,
                                        double density = 1.0,
                                        const SampleSpaceOptions& options = {});

}  // namespace obroute
