#pragma once

#include <Eigen/Dense>

#include <optional>

#include "obroute/graph.hpp"

namespace obroute {

// Nonnegative n x n demand volumes with zero diagonal.
using DemandMatrix = Eigen::MatrixXd;

// Throws InputError unless d is n x n, finite, nonnegative, zero diagonal.
void validate_demand(const DemandMatrix& d, int n);

// Per-link utilization (traffic / capacity). Loops never appear here.
struct CongestionReport {
  Eigen::VectorXd per_link;
  double max = 0.0;
  int argmax = -1;
  std::optional<double> opt;
  std::optional<double> ratio;
};

CongestionReport make_congestion_report(Eigen::VectorXd per_link);

// Sets opt and ratio = max / opt. A zero opt gives ratio 0 when max is zero
// and throws std::domain_error otherwise.
void attach_opt(CongestionReport& report, double opt);

}  // namespace obroute
