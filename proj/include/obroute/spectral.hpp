#pragma once

#include <Eigen/Dense>

#include "obroute/graph.hpp"
#include "obroute/matrix_ops.hpp"

namespace obroute {

// Eigenvalues are reported to this absolute accuracy.
inline constexpr double kEigenTolerance = 1e-10;

struct SpectralProfile {
  Eigen::RowVectorXd pi;
  double pi_min = 0.0;
  double pi_max = 0.0;
  double lambda2 = 0.0;
  double lambdaN = 0.0;
  double lambda = 0.0;      // max(lambda2, |lambdaN|)
  double lambda_bar = 0.0;  // min over the graph and its lazy version
  bool lazified = false;
  int k = 0;                // mixing steps, 0 until computed
  Eigen::VectorXd eigenvalues;  // ascending
};

// A_xy = c(x, y) / d_x, loops on the diagonal.
Eigen::MatrixXd transition_matrix(const Graph& g);

// pi_x = d_x / sum_y d_y. Throws InputError on an empty graph.
Eigen::RowVectorXd stationary_distribution(const Graph& g);

// Spectrum of A via the symmetric matrix D^{1/2} A D^{-1/2}. Requires a
// connected graph. lambda_bar = lambda and k = 0.
SpectralProfile spectral(const Graph& g);

struct WalkGraph {
  Graph graph;
  SpectralProfile profile;
};

// Compares G with G' = G plus a loop of capacity d_x at every vertex (walk
// (I + A) / 2) and keeps whichever has strictly smaller lambda. The returned
// profile has lambda_bar < 1 and k set.
WalkGraph lazify_if_needed(const Graph& g);

// k = ceil(ln(pi_min / 2) / ln(lambda_bar)), at least 1; lambda_bar == 0 gives
// 1. Throws std::domain_error for lambda_bar >= 1.
int mixing_steps(double lambda_bar, double pi_min);
inline int mixing_steps(const SpectralProfile& p) { return mixing_steps(p.lambda_bar, p.pi_min); }

}  // namespace obroute
