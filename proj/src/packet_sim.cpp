#include "obroute/packet_sim.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "obroute/parallel.hpp"

namespace obroute {

void validate_permutation(std::span<const Vertex> sigma, int n) {
  if (static_cast<int>(sigma.size()) != n) {
    throw InputError("permutation has " + std::to_string(sigma.size()) + " entries, expected " +
                     std::to_string(n));
  }
  std::vector<char> hit(n, 0);
  for (Vertex y : sigma) {
    if (y < 0 || y >= n || hit[y]) throw InputError("permutation is not a bijection");
    hit[y] = 1;
  }
}

namespace {

void validate_paths(const Graph& g, std::span<const Vertex> sigma,
                    std::span<const std::vector<Vertex>> paths) {
  const int n = g.num_vertices();
  if (static_cast<int>(paths.size()) != n) throw InputError("need one path slot per vertex");
  for (Vertex x = 0; x < n; ++x) {
    if (sigma[x] == x) continue;
    const auto& p = paths[x];
    if (p.size() < 2 || p.front() != x || p.back() != sigma[x]) {
      throw InputError("path for packet " + std::to_string(x) + " does not join x to sigma(x)");
    }
    for (std::size_t s = 1; s < p.size(); ++s) {
      if (walk_edge_index(g, p[s - 1], p[s]) < 0) {
        throw InputError("path for packet " + std::to_string(x) + " leaves the graph");
      }
    }
  }
}

}  // namespace

SimulationResult simulate(const Graph& g, std::span<const Vertex> sigma,
                          std::span<const std::vector<Vertex>> paths,
                          const SimulationOptions& options) {
  const int n = g.num_vertices();
  validate_permutation(sigma, n);
  validate_paths(g, sigma, paths);

  SimulationResult out;
  out.arrivals.assign(n, -1);
  out.peak_queue.assign(g.num_links(), 0);

  std::vector<Vertex> active;
  std::vector<std::size_t> position(n, 0);
  for (Vertex x = 0; x < n; ++x) {
    if (sigma[x] != x) active.push_back(x);
  }
  // Slot = link, or 2 * link + direction in per-direction mode.
  const std::size_t slots = static_cast<std::size_t>(g.num_links()) * (options.per_direction ? 2 : 1);
  std::vector<int> claimed(slots, 0);
  std::vector<int> crossings(slots, 0);
  std::vector<int> crossing_round(slots, 0);
  std::vector<int> requests(g.num_links(), 0);
  std::vector<int> request_round(g.num_links(), 0);

  int round = 0;
  while (!active.empty()) {
    ++round;
    std::vector<Vertex> still;
    still.reserve(active.size());
    // `active` stays sorted by source id, so the first requester wins.
    for (Vertex p : active) {
      const auto& path = paths[p];
      const Vertex from = path[position[p]];
      const Vertex to = path[position[p] + 1];
      bool moved = true;
      if (from != to) {
        const int link = g.link_index(from, to);
        if (request_round[link] != round) {
          request_round[link] = round;
          requests[link] = 0;
        }
        out.peak_queue[link] = std::max(out.peak_queue[link], ++requests[link]);
        std::size_t slot = static_cast<std::size_t>(link);
        if (options.per_direction) slot = 2 * slot + (from < to ? 0 : 1);
        if (claimed[slot] == round) {
          moved = false;
          ++out.contention_events;
        } else {
          claimed[slot] = round;
        }
        if (moved) {
          if (crossing_round[slot] != round) {
            crossing_round[slot] = round;
            crossings[slot] = 0;
          }
          out.max_crossings = std::max(out.max_crossings, ++crossings[slot]);
          if (options.record_trace) out.trace.push_back(TraceEvent{round, p, link});
        }
      }
      if (moved) ++position[p];
      if (position[p] + 1 == path.size()) {
        out.arrivals[p] = round;
      } else {
        still.push_back(p);
      }
    }
    active.swap(still);
  }
  out.rounds = round;
  out.delay = std::max(0, *std::max_element(out.arrivals.begin(), out.arrivals.end()));
  return out;
}

std::vector<int> replay_arrivals(std::span<const Vertex> sigma,
                                 std::span<const std::vector<Vertex>> paths,
                                 std::span<const TraceEvent> trace) {
  // A packet moves in every round except those where it requested a link
  // and did not appear in the trace. Reconstruct by walking each path: loop
  // steps take exactly one round, link steps complete at their trace round.
  const int n = static_cast<int>(sigma.size());
  std::vector<std::vector<int>> cross_rounds(n);
  for (const TraceEvent& e : trace) cross_rounds[e.packet].push_back(e.round);
  std::vector<int> arrivals(n, -1);
  for (Vertex x = 0; x < n; ++x) {
    if (sigma[x] == x) continue;
    const auto& p = paths[x];
    std::size_t next_cross = 0;
    int t = 0;
    for (std::size_t s = 1; s < p.size(); ++s) {
      if (p[s - 1] == p[s]) {
        ++t;
      } else {
        if (next_cross >= cross_rounds[x].size()) {
          throw InputError("trace is missing crossings for packet " + std::to_string(x));
        }
        t = cross_rounds[x][next_cross++];
      }
    }
    arrivals[x] = t;
  }
  return arrivals;
}

std::vector<int> link_coincidences(const Graph& g, std::span<const std::vector<Vertex>> paths) {
  std::vector<int> count(g.num_links(), 0);
  for (const auto& p : paths) {
    for (std::size_t s = 1; s < p.size(); ++s) {
      if (p[s - 1] == p[s]) continue;
      const int link = g.link_index(p[s - 1], p[s]);
      if (link < 0) throw InputError("path step is not an edge of the graph");
      ++count[link];
    }
  }
  return count;
}

ValiantReport route_permutation(const WalkGraph& walk, std::span<const Vertex> sigma,
                                std::uint64_t seed, const SimulationOptions& options) {
  const Graph& g = walk.graph;
  const int n = g.num_vertices();
  validate_permutation(sigma, n);
  const PathSpace space = build_sample_space(walk, derive_seed(seed, "space"));
  ValiantReport report;
  report.k = walk.profile.k;
  report.path_length = 2 * report.k;
  report.paths.assign(n, {});
  const std::uint64_t select_seed = derive_seed(seed, "select");
  for (Vertex x = 0; x < n; ++x) {
    if (sigma[x] == x) continue;
    TwoLegPath leg = select_path(space, x, sigma[x], select_seed);
    report.resamples += leg.resamples;
    report.paths[x] = std::move(leg.gamma);
  }
  report.sim = simulate(g, sigma, report.paths, options);
  const auto counts = link_coincidences(g, report.paths);
  report.max_coincidence = counts.empty() ? 0 : *std::max_element(counts.begin(), counts.end());
  report.diagnostic = report.path_length * report.max_coincidence;
  report.bound = report.path_length * (1 + report.max_coincidence);
  return report;
}

ValiantReport route_permutation(const Graph& g, std::span<const Vertex> sigma, std::uint64_t seed,
                                const SimulationOptions& options) {
  return route_permutation(lazify_if_needed(g), sigma, seed, options);
}

std::vector<Vertex> random_permutation(int n, std::uint64_t seed) {
  std::vector<Vertex> sigma(n);
  std::iota(sigma.begin(), sigma.end(), 0);
  Rng rng(derive_seed(seed, "permutation", static_cast<std::uint64_t>(n)));
  rng.shuffle(sigma);
  return sigma;
}

DelayStatistics delay_statistics(const Graph& g, int permutations, std::uint64_t seed,
                                 const SimulationOptions& options) {
  if (permutations < 1) throw InputError("delay_statistics needs at least one permutation");
  const WalkGraph walk = lazify_if_needed(g);
  const int n = g.num_vertices();
  DelayStatistics s;
  s.runs = permutations;
  s.k = walk.profile.k;
  s.regular = g.is_regular();
  s.degree = g.max_degree();
  const double two_k = 2.0 * s.k;
  s.normalizer = two_k * std::log(static_cast<double>(n)) + two_k * two_k / s.degree;
  s.delays.assign(permutations, 0);
  s.bounds.assign(permutations, 0);
  parallel_for(static_cast<std::size_t>(permutations), [&](std::size_t t) {
    const auto sigma = random_permutation(n, derive_seed(seed, "run-permutation", t));
    const ValiantReport r = route_permutation(walk, sigma, derive_seed(seed, "run", t), options);
    s.delays[t] = r.sim.delay;
    s.bounds[t] = r.bound;
  });
  for (int t = 0; t < permutations; ++t) {
    s.max_delay = std::max(s.max_delay, s.delays[t]);
    s.mean_delay += s.delays[t];
    s.ratios.push_back(s.delays[t] / s.normalizer);
    if (s.delays[t] > s.bounds[t]) s.within_bound = false;
  }
  s.mean_delay /= permutations;
  return s;
}

}  // namespace obroute
