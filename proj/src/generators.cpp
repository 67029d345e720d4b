#include "obroute/generators.hpp"

#include <charconv>
#include <set>
#include <string>
#include <vector>

#include "obroute/rng.hpp"

namespace obroute {

namespace {

constexpr int kRegularAttempts = 100000;

void require(bool ok, const std::string& what) {
  if (!ok) throw InputError(what);
}

}  // namespace

Graph hypercube(int dimension) {
  require(dimension >= 1 && dimension <= 20, "hypercube dimension out of range");
  const int n = 1 << dimension;
  std::vector<EdgeSpec> edges;
  for (int x = 0; x < n; ++x) {
    for (int b = 0; b < dimension; ++b) {
      const int y = x ^ (1 << b);
      if (x < y) edges.push_back({x, y, Capacity{1}});
    }
  }
  return build_graph(edges, n);
}

Graph complete_graph(int n) {
  require(n >= 2, "complete graph needs n >= 2");
  std::vector<EdgeSpec> edges;
  for (int x = 0; x < n; ++x)
    for (int y = x + 1; y < n; ++y) edges.push_back({x, y, Capacity{1}});
  return build_graph(edges, n);
}

Graph cycle_graph(int n) {
  require(n >= 3, "cycle needs n >= 3");
  std::vector<EdgeSpec> edges;
  for (int x = 0; x < n; ++x) edges.push_back({x, (x + 1) % n, Capacity{1}});
  return build_graph(edges, n);
}

Graph grid_graph(int rows, int cols) {
  require(rows >= 1 && cols >= 1 && rows * cols >= 2, "grid too small");
  std::vector<EdgeSpec> edges;
  auto id = [cols](int r, int c) { return r * cols + c; };
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) {
      if (c + 1 < cols) edges.push_back({id(r, c), id(r, c + 1), Capacity{1}});
      if (r + 1 < rows) edges.push_back({id(r, c), id(r + 1, c), Capacity{1}});
    }
  }
  return build_graph(edges, rows * cols);
}

Graph star_graph(int leaves) {
  require(leaves >= 1, "star needs a leaf");
  std::vector<EdgeSpec> edges;
  for (int l = 1; l <= leaves; ++l) edges.push_back({0, l, Capacity{1}});
  return build_graph(edges, leaves + 1);
}

Graph path_graph(int n) {
  require(n >= 2, "path needs n >= 2");
  std::vector<EdgeSpec> edges;
  for (int x = 0; x + 1 < n; ++x) edges.push_back({x, x + 1, Capacity{1}});
  return build_graph(edges, n);
}

Graph random_regular(int n, int d, std::uint64_t seed) {
  require(n >= 2 && d >= 1 && d < n, "random_regular needs 1 <= d < n");
  require((static_cast<long long>(n) * d) % 2 == 0, "random_regular needs n*d even");
  Rng rng(derive_seed(seed, "random_regular", n, d));
  std::vector<int> points(static_cast<std::size_t>(n) * d);
  for (int attempt = 0; attempt < kRegularAttempts; ++attempt) {
    for (std::size_t i = 0; i < points.size(); ++i) points[i] = static_cast<int>(i) / d;
    rng.shuffle(points);
    std::set<std::pair<int, int>> seen;
    std::vector<EdgeSpec> edges;
    bool simple = true;
    for (std::size_t i = 0; i < points.size(); i += 2) {
      const int u = std::min(points[i], points[i + 1]);
      const int v = std::max(points[i], points[i + 1]);
      if (u == v || !seen.emplace(u, v).second) {
        simple = false;
        break;
      }
      edges.push_back({u, v, Capacity{1}});
    }
    if (!simple) continue;
    Graph g = build_graph(edges, n);
    if (g.connected()) return g;
  }
  throw InputError("random_regular: no simple connected pairing found");
}

Graph random_connected(int n, double density, int max_capacity, std::uint64_t seed) {
  require(n >= 2, "random_connected needs n >= 2");
  require(density >= 0.0 && density <= 1.0, "density must lie in [0, 1]");
  require(max_capacity >= 1, "max_capacity must be positive");
  Rng rng(derive_seed(seed, "random_connected", n, max_capacity));
  auto cap = [&] { return Capacity{static_cast<std::int64_t>(rng.below(max_capacity)) + 1}; };
  std::vector<int> order(n);
  for (int x = 0; x < n; ++x) order[x] = x;
  rng.shuffle(order);
  std::set<std::pair<int, int>> seen;
  std::vector<EdgeSpec> edges;
  for (int i = 1; i < n; ++i) {
    const int a = order[i];
    const int b = order[rng.below(i)];
    seen.emplace(std::min(a, b), std::max(a, b));
    edges.push_back({a, b, cap()});
  }
  for (int u = 0; u < n; ++u) {
    for (int v = u + 1; v < n; ++v) {
      if (seen.count({u, v}) == 0 && rng.bernoulli(density)) edges.push_back({u, v, cap()});
    }
  }
  return build_graph(edges, n);
}

Graph generate(std::string_view spec, std::uint64_t seed) {
  const auto colon = spec.find(':');
  const std::string_view kind = spec.substr(0, colon);
  std::vector<long long> args;
  if (colon != std::string_view::npos) {
    std::string_view rest = spec.substr(colon + 1);
    while (!rest.empty()) {
      const auto comma = rest.find(',');
      const std::string_view tok = rest.substr(0, comma);
      long long value = 0;
      auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), value);
      if (ec != std::errc{} || ptr != tok.data() + tok.size()) {
        throw InputError("bad generator argument '" + std::string(tok) + "'");
      }
      args.push_back(value);
      if (comma == std::string_view::npos) break;
      rest = rest.substr(comma + 1);
    }
  }
  auto arity = [&](std::size_t lo, std::size_t hi) {
    if (args.size() < lo || args.size() > hi) {
      throw InputError("wrong number of arguments for generator '" +
                       std::string(kind) + "'");
    }
  };
  if (kind == "hypercube") {
    arity(1, 1);
    return hypercube(static_cast<int>(args[0]));
  }
  if (kind == "complete") {
    arity(1, 1);
    return complete_graph(static_cast<int>(args[0]));
  }
  if (kind == "cycle") {
    arity(1, 1);
    return cycle_graph(static_cast<int>(args[0]));
  }
  if (kind == "grid") {
    arity(2, 2);
    return grid_graph(static_cast<int>(args[0]), static_cast<int>(args[1]));
  }
  if (kind == "star") {
    arity(1, 1);
    return star_graph(static_cast<int>(args[0]));
  }
  if (kind == "path") {
    arity(1, 1);
    return path_graph(static_cast<int>(args[0]));
  }
  if (kind == "random_regular") {
    arity(2, 3);
    const std::uint64_t s = args.size() == 3 ? static_cast<std::uint64_t>(args[2]) : seed;
    return random_regular(static_cast<int>(args[0]), static_cast<int>(args[1]), s);
  }
  if (kind == "random") {
    arity(3, 3);
    return random_connected(static_cast<int>(args[0]), static_cast<double>(args[1]) / 100.0,
                            static_cast<int>(args[2]), seed);
  }
  throw InputError("unknown generator '" + std::string(kind) + "'");
}

}  // namespace obroute
