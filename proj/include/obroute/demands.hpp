#pragma once

#include <cstdint>
#include <span>

#include "obroute/congestion.hpp"
#include "obroute/graph.hpp"

namespace obroute {

// Unit demand x -> sigma(x) for every x with sigma(x) != x.
DemandMatrix permutation_demand(std::span<const Vertex> sigma);

// Unit demand in both directions across every link.
DemandMatrix adjacency_demand(const Graph& g);

// vol on every ordered pair x != y.
DemandMatrix uniform_all_pairs(int n, double vol);

// pi_x / pi_max from x to sigma(x); fixed points send nothing.
DemandMatrix canonical_demand(const Graph& g, std::span<const Vertex> sigma);

// Each ordered pair carries a uniform volume in (0, 1] with probability
// `density`.
DemandMatrix random_demand(int n, std::uint64_t seed, double density = 1.0);

}  // namespace obroute
