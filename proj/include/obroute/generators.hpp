#pragma once

#include <cstdint>
#include <string_view>

#include "obroute/graph.hpp"

namespace obroute {

// Unit-capacity graph families.
Graph hypercube(int dimension);
Graph complete_graph(int n);
Graph cycle_graph(int n);
Graph grid_graph(int rows, int cols);
Graph star_graph(int leaves);
Graph path_graph(int n);
// Pairing model with rejection of loops, multi-edges and disconnected
// outcomes. Requires n * d even and d < n.
Graph random_regular(int n, int d, std::uint64_t seed);
// Random spanning tree plus each remaining pair with probability `density`;
// capacities uniform in {1, ..., max_capacity}.
Graph random_connected(int n, double density, int max_capacity, std::uint64_t seed);

// Parses "KIND:ARGS", e.g. "complete:4", "hypercube:3", "grid:3,4",
// "random_regular:16,4" (seed taken from `seed`) or "random_regular:16,4,9".
// "random:N,PERCENT,MAXCAP" maps to random_connected.
Graph generate(std::string_view spec, std::uint64_t seed = 0);

}  // namespace obroute
