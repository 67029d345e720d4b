#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "obroute/graph.hpp"
#include "obroute/path_sampler.hpp"

namespace obroute {

// Throws InputError unless sigma is a bijection on [0, n).
void validate_permutation(std::span<const Vertex> sigma, int n);

struct SimulationOptions {
  // Capacity is one packet per round per link; with this flag, one per
  // direction.
  bool per_direction = false;
  bool record_trace = false;
};

struct TraceEvent {
  int round = 0;
  Vertex packet = 0;
  int link = 0;
};

struct SimulationResult {
  std::vector<int> arrivals;    // per source vertex, -1 when it sends nothing
  int delay = 0;                // max arrival
  std::vector<int> peak_queue;  // per link: most packets requesting it in one round
  int max_crossings = 0;        // most packets crossing one link (direction) in a round
  std::int64_t contention_events = 0;
  int rounds = 0;
  std::vector<TraceEvent> trace;  // link crossings, when recorded
};

// Synchronous rounds. Each packet advances one step per round unless it loses
// its link to a packet with a smaller source id. Loop steps use no capacity.
// paths[x] runs from x to sigma(x); it is ignored for fixed points.
SimulationResult simulate(const Graph& g, std::span<const Vertex> sigma,
                          std::span<const std::vector<Vertex>> paths,
                          const SimulationOptions& options = {});

// Recomputes arrival times from a recorded trace.
std::vector<int> replay_arrivals(std::span<const Vertex> sigma,
                                 std::span<const std::vector<Vertex>> paths,
                                 std::span<const TraceEvent> trace);

// Total traversals of each link by the given paths.
std::vector<int> link_coincidences(const Graph& g, std::span<const std::vector<Vertex>> paths);

struct ValiantReport {
  SimulationResult sim;
  int k = 0;
  int path_length = 0;     // 2k
  int max_coincidence = 0; // max over links of traversals by all paths
  int diagnostic = 0;      // 2k * max_coincidence
  int bound = 0;           // 2k * (1 + max_coincidence)
  int resamples = 0;
  std::vector<std::vector<Vertex>> paths;
};

// Builds a sample space on the lazified graph, selects gamma_{x, sigma(x)}
// and simulates.
ValiantReport route_permutation(const Graph& g, std::span<const Vertex> sigma, std::uint64_t seed,
                                const SimulationOptions& options = {});
ValiantReport route_permutation(const WalkGraph& walk, std::span<const Vertex> sigma,
                                std::uint64_t seed, const SimulationOptions& options = {});

std::vector<Vertex> random_permutation(int n, std::uint64_t seed);

struct DelayStatistics {
  int runs = 0;
  int k = 0;
  std::vector<int> delays;
  std::vector<int> bounds;
  int max_delay = 0;
  double mean_delay = 0.0;
  bool regular = false;
  double degree = 0.0;     // of the input graph when regular
  double normalizer = 0.0; // 2k ln n + (2k)^2 / d
  std::vector<double> ratios;
  bool within_bound = true;
};

DelayStatistics delay_statistics(const Graph& g, int permutations, std::uint64_t seed,
                                 const SimulationOptions& options = {});

}  // namespace obroute
