#include "obroute/spectral.hpp"

#include <cmath>
#include <stdexcept>

namespace obroute {

namespace {
constexpr double kSnap = 1e-12;
}  // namespace

Eigen::MatrixXd transition_matrix(const Graph& g) {
  const int n = g.num_vertices();
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n, n);
  for (int x = 0; x < n; ++x) {
    const double d = g.degrees()[x];
    if (d <= 0) continue;
    for (const Arc& arc : g.arcs(x)) a(x, arc.to) += arc.weight / d;
  }
  return a;
}

Eigen::RowVectorXd stationary_distribution(const Graph& g) {
  const double total = g.num_vertices() > 0 ? g.total_degree() : 0.0;
  if (total <= 0) throw InputError("stationary distribution of an empty graph");
  return g.degrees().transpose() / total;
}

SpectralProfile spectral(const Graph& g) {
  require_connected(g);
  const int n = g.num_vertices();
  const Eigen::VectorXd& d = g.degrees();
  Eigen::MatrixXd s = Eigen::MatrixXd::Zero(n, n);
  for (int x = 0; x < n; ++x) {
    for (const Arc& arc : g.arcs(x)) {
      s(x, arc.to) += arc.weight / std::sqrt(d[x] * d[arc.to]);
    }
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(s, Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) throw std::runtime_error("eigensolver failed");

  SpectralProfile p;
  p.eigenvalues = solver.eigenvalues().cwiseMax(-1.0).cwiseMin(1.0);
  // Snap roundoff at 0 and +-1 so reports do not carry platform noise.
  for (double& e : p.eigenvalues) {
    if (std::abs(e) < kSnap) e = 0.0;
    if (std::abs(std::abs(e) - 1.0) < kSnap) e = std::copysign(1.0, e);
  }
  p.pi = stationary_distribution(g);
  p.pi_min = p.pi.minCoeff();
  p.pi_max = p.pi.maxCoeff();
  p.lambdaN = p.eigenvalues[0];
  p.lambda2 = p.eigenvalues[n - 2];
  p.lambda = std::max(p.lambda2, std::abs(p.lambdaN));
  p.lambda_bar = p.lambda;
  return p;
}

WalkGraph lazify_if_needed(const Graph& g) {
  require_connected(g);
  SpectralProfile base = spectral(g);
  Graph lazy = g.with_added_loops(g.degree_vector());
  SpectralProfile lazy_profile = spectral(lazy);

  WalkGraph out;
  if (lazy_profile.lambda < base.lambda - kEigenTolerance) {
    out.graph = std::move(lazy);
    out.profile = std::move(lazy_profile);
    out.profile.lazified = true;
  } else {
    out.graph = g;
    out.profile = std::move(base);
  }
  if (out.profile.lambda_bar >= 1.0) {
    throw std::logic_error("lambda_bar >= 1 after lazification of a connected graph");
  }
  out.profile.k = mixing_steps(out.profile);
  return out;
}

int mixing_steps(double lambda_bar, double pi_min) {
  if (!(lambda_bar < 1.0)) {
    throw std::domain_error("mixing_steps: lambda_bar >= 1 (disconnected or bipartite walk)");
  }
  if (!(pi_min > 0.0 && pi_min <= 1.0)) throw std::domain_error("mixing_steps: pi_min out of (0, 1]");
  if (lambda_bar <= 0.0) return 1;
  const double target = pi_min / 2.0;
  const double exact = std::log(target) / std::log(lambda_bar);
  int k = std::max(1, static_cast<int>(std::ceil(exact - 1e-9)));
  while (std::pow(lambda_bar, k) > target * (1.0 + 1e-12)) ++k;
  return k;
}

}  // namespace obroute
