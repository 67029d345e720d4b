#include "obroute/demands.hpp"

#include "obroute/packet_sim.hpp"
#include "obroute/rng.hpp"
#include "obroute/spectral.hpp"

namespace obroute {

DemandMatrix permutation_demand(std::span<const Vertex> sigma) {
  const int n = static_cast<int>(sigma.size());
  validate_permutation(sigma, n);
  DemandMatrix d = DemandMatrix::Zero(n, n);
  for (int x = 0; x < n; ++x) {
    if (sigma[x] != x) d(x, sigma[x]) = 1.0;
  }
  return d;
}

DemandMatrix adjacency_demand(const Graph& g) {
  const int n = g.num_vertices();
  DemandMatrix d = DemandMatrix::Zero(n, n);
  for (const Link& l : g.links()) {
    d(l.u, l.v) = 1.0;
    d(l.v, l.u) = 1.0;
  }
  return d;
}

DemandMatrix uniform_all_pairs(int n, double vol) {
  if (n < 0 || !(vol >= 0.0)) throw InputError("uniform demand needs n >= 0 and vol >= 0");
  DemandMatrix d = DemandMatrix::Constant(n, n, vol);
  d.diagonal().setZero();
  return d;
}

DemandMatrix canonical_demand(const Graph& g, std::span<const Vertex> sigma) {
  const int n = g.num_vertices();
  validate_permutation(sigma, n);
  const Eigen::RowVectorXd pi = stationary_distribution(g);
  const double pi_max = pi.maxCoeff();
  DemandMatrix d = DemandMatrix::Zero(n, n);
  for (int x = 0; x < n; ++x) {
    if (sigma[x] != x) d(x, sigma[x]) = pi[x] / pi_max;
  }
  return d;
}

DemandMatrix random_demand(int n, std::uint64_t seed, double density) {
  if (n < 0) throw InputError("negative vertex count");
  if (!(density >= 0.0 && density <= 1.0)) throw InputError("density must lie in [0, 1]");
  Rng rng(derive_seed(seed, "demand", static_cast<std::uint64_t>(n)));
  DemandMatrix d = DemandMatrix::Zero(n, n);
  for (int x = 0; x < n; ++x) {
    for (int y = 0; y < n; ++y) {
      if (x == y) continue;
      const double present = rng.uniform();
      const double volume = 1.0 - rng.uniform();
      if (present < density) d(x, y) = volume;
    }
  }
  return d;
}

}  // namespace obroute
