#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "obroute/congestion.hpp"
#include "obroute/graph.hpp"
#include "obroute/splittable.hpp"
#include "obroute/unsplittable.hpp"

namespace obroute {

enum class OptMethod { LpExact, DegreeLowerBound };

const char* to_string(OptMethod m);

struct OptOptions {
  int max_vertices = 24;
  int max_links = 80;
  double tolerance = 1e-6;
  // Past the budget, report the degree bound instead of throwing.
  bool allow_fallback = true;
};

// Directed flow of all commodities leaving one source, per link and
// direction.
struct SourceFlow {
  Vertex source = 0;
  Eigen::VectorXd forward;   // along u -> v
  Eigen::VectorXd backward;  // along v -> u
};

struct OptResult {
  double value = 0.0;
  OptMethod method = OptMethod::LpExact;
  double tolerance = 1e-6;
  std::vector<SourceFlow> certificate;
  int iterations = 0;
  double conservation_residual = 0.0;
  double certificate_congestion = 0.0;
  bool certificate_valid = true;
};

// max_x { sum_z D_xz / d_x, sum_z D_zx / d_x }.
double opt_lower_bound_degree(const Graph& g, const DemandMatrix& d);

// Minimum over all splittable flows of the maximum link congestion, solved as
// one LP with commodities aggregated by source. Throws InputError when the
// instance is over budget and fallback is disabled, and std::runtime_error if
// the solver fails or its certificate does not check out.
OptResult opt_congestion(const Graph& g, const DemandMatrix& d, const OptOptions& options = {});

struct NamedDemand {
  std::string label;
  DemandMatrix d;
};

struct RatioEntry {
  std::string label;
  double cong = 0.0;
  double opt = 0.0;
  OptMethod method = OptMethod::LpExact;
  double ratio = 0.0;
};

// Max of CONG / OPT over a finite suite. Only a lower estimate of the
// policy's true ratio.
struct PerformanceReport {
  std::vector<RatioEntry> entries;
  double ratio = 0.0;
  int witness = -1;
  bool lower_estimate = true;
};

PerformanceReport performance_ratio(const Graph& g, const RoutingPolicy& policy,
                                    std::span<const NamedDemand> suite,
                                    const OptOptions& options = {});
PerformanceReport performance_ratio(const Graph& g, const UnsplittablePolicy& policy,
                                    std::span<const NamedDemand> suite,
                                    const OptOptions& options = {});

struct ChernoffReport {
  std::size_t samples = 0;
  std::size_t exceed = 0;
  double frequency = 0.0;
  double threshold = 0.0;
  double bound = 0.0;
  double slack = 3.0;
  bool pass = true;
};

// Empirical frequency of samples above `threshold`, passing when it is at
// most bound * slack. Throws InputError on an empty sample.
ChernoffReport chernoff_check(std::span<const double> samples, double threshold, double bound,
                              double slack = 3.0);

}  // namespace obroute
