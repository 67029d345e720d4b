#pragma once

#include <Eigen/Dense>

#include <vector>

namespace obroute {

enum class RowSense { LessEqual, Equal, GreaterEqual };

// minimize c x  subject to  a x (sense) b,  x >= 0.
struct LinearProgram {
  Eigen::MatrixXd a;
  Eigen::VectorXd b;
  Eigen::VectorXd c;
  std::vector<RowSense> sense;
};

enum class LpStatus { Optimal, Infeasible, Unbounded, IterationLimit };

struct LpSolution {
  LpStatus status = LpStatus::IterationLimit;
  Eigen::VectorXd x;
  double objective = 0.0;
  int iterations = 0;
};

// Dense two-phase primal simplex. Dantzig pricing, switching to Bland's rule
// after a run of degenerate pivots. The final basic solution is recomputed
// from the original constraint columns to shed accumulated pivot error.
LpSolution solve_lp(const LinearProgram& lp, double tolerance = 1e-9);

}  // namespace obroute
