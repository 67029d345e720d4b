#include "obroute/lp.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace obroute {

namespace {

using Tableau = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

constexpr int kDegenerateRunBeforeBland = 50;

class Simplex {
 public:
  Simplex(Tableau t, std::vector<int> basis, double tol)
      : t_(std::move(t)), basis_(std::move(basis)), tol_(tol) {}

  // Optimizes over columns [0, active_cols). Objective row is the last row,
  // holding reduced costs; rhs is the last column.
  LpStatus run(int active_cols, int max_iterations) {
    const int rows = static_cast<int>(t_.rows()) - 1;
    const int rhs = static_cast<int>(t_.cols()) - 1;
    int degenerate_run = 0;
    for (; iterations_ < max_iterations; ++iterations_) {
      const bool bland = degenerate_run >= kDegenerateRunBeforeBland;
      int enter = -1;
      double best = -tol_;
      for (int j = 0; j < active_cols; ++j) {
        const double rc = t_(rows, j);
        if (rc < best) {
          enter = j;
          if (bland) break;
          best = rc;
        }
      }
      if (enter < 0) return LpStatus::Optimal;

      int leave = -1;
      double ratio = std::numeric_limits<double>::infinity();
      for (int i = 0; i < rows; ++i) {
        const double coef = t_(i, enter);
        if (coef <= tol_) continue;
        const double r = t_(i, rhs) / coef;
        if (r < ratio - tol_ || (r <= ratio + tol_ && leave >= 0 && basis_[i] < basis_[leave])) {
          ratio = std::min(ratio, r);
          leave = i;
        }
      }
      if (leave < 0) return LpStatus::Unbounded;
      degenerate_run = ratio <= tol_ ? degenerate_run + 1 : 0;
      pivot(leave, enter);
    }
    return LpStatus::IterationLimit;
  }

  void pivot(int row, int col) {
    t_.row(row) /= t_(row, col);
    for (int i = 0; i < t_.rows(); ++i) {
      if (i == row) continue;
      const double f = t_(i, col);
      if (f != 0.0) t_.row(i) -= f * t_.row(row);
    }
    t_(row, col) = 1.0;
    basis_[row] = col;
  }

  Tableau& tableau() { return t_; }
  std::vector<int>& basis() { return basis_; }
  int iterations() const { return iterations_; }

 private:
  Tableau t_;
  std::vector<int> basis_;
  double tol_;
  int iterations_ = 0;
};

}  // namespace

LpSolution solve_lp(const LinearProgram& lp, double tolerance) {
  const int m = static_cast<int>(lp.a.rows());
  const int n = static_cast<int>(lp.a.cols());
  if (lp.b.size() != m || lp.c.size() != n || static_cast<int>(lp.sense.size()) != m) {
    throw std::invalid_argument("solve_lp: inconsistent dimensions");
  }

  // Normalize to b >= 0.
  Eigen::MatrixXd a = lp.a;
  Eigen::VectorXd b = lp.b;
  std::vector<RowSense> sense = lp.sense;
  for (int i = 0; i < m; ++i) {
    if (b[i] < 0) {
      a.row(i) *= -1.0;
      b[i] = -b[i];
      if (sense[i] == RowSense::LessEqual) {
        sense[i] = RowSense::GreaterEqual;
      } else if (sense[i] == RowSense::GreaterEqual) {
        sense[i] = RowSense::LessEqual;
      }
    }
  }

  // Column layout: structural | slack/surplus | artificial | rhs.
  int slacks = 0;
  int artificials = 0;
  for (RowSense s : sense) {
    if (s != RowSense::Equal) ++slacks;
    if (s != RowSense::LessEqual) ++artificials;
  }
  const int structural_and_slack = n + slacks;
  const int total = structural_and_slack + artificials;
  Tableau t = Tableau::Zero(m + 1, total + 1);
  std::vector<int> basis(m);
  // Full constraint matrix in equality form, kept for the final re-solve.
  Eigen::MatrixXd full = Eigen::MatrixXd::Zero(m, total);
  full.leftCols(n) = a;
  int next_slack = n;
  int next_art = structural_and_slack;
  for (int i = 0; i < m; ++i) {
    if (sense[i] == RowSense::LessEqual) {
      full(i, next_slack) = 1.0;
      basis[i] = next_slack++;
    } else {
      if (sense[i] == RowSense::GreaterEqual) full(i, next_slack++) = -1.0;
      full(i, next_art) = 1.0;
      basis[i] = next_art++;
    }
  }
  t.topLeftCorner(m, total) = full;
  t.col(total).head(m) = b;

  const int max_iterations = 50 * (m + total) + 1000;
  LpSolution out;

  // Phase 1: minimize the sum of artificials.
  if (artificials > 0) {
    for (int i = 0; i < m; ++i) {
      if (basis[i] >= structural_and_slack) t.row(m) -= t.row(i);
    }
    for (int j = structural_and_slack; j < total; ++j) t(m, j) = 0.0;
  }
  Simplex simplex(std::move(t), std::move(basis), tolerance);
  if (artificials > 0) {
    const LpStatus s = simplex.run(total, max_iterations);
    if (s == LpStatus::IterationLimit) {
      out.status = s;
      return out;
    }
    const double infeasibility = -simplex.tableau()(m, total);
    if (infeasibility > std::max(1e-7, tolerance * 10 * (1.0 + b.lpNorm<Eigen::Infinity>()))) {
      out.status = LpStatus::Infeasible;
      out.iterations = simplex.iterations();
      return out;
    }
    // Drive zero-level artificials out of the basis where possible; rows
    // where that fails are redundant and keep a harmless artificial at 0.
    for (int i = 0; i < m; ++i) {
      if (simplex.basis()[i] < structural_and_slack) continue;
      for (int j = 0; j < structural_and_slack; ++j) {
        if (std::abs(simplex.tableau()(i, j)) > 1e-7) {
          simplex.pivot(i, j);
          break;
        }
      }
    }
  }

  // Phase 2 objective row: c - c_B B^{-1} A.
  Tableau& tab = simplex.tableau();
  tab.row(m).setZero();
  tab.row(m).head(n) = lp.c.transpose();
  for (int i = 0; i < m; ++i) {
    const int j = simplex.basis()[i];
    if (j < n && lp.c[j] != 0.0) tab.row(m) -= lp.c[j] * tab.row(i);
  }
  const LpStatus s = simplex.run(structural_and_slack, max_iterations);
  out.status = s;
  out.iterations = simplex.iterations();
  if (s != LpStatus::Optimal) return out;

  // Re-solve B x_B = b on the original columns.
  const auto& basis_cols = simplex.basis();
  Eigen::MatrixXd bmat(m, m);
  for (int i = 0; i < m; ++i) bmat.col(i) = full.col(basis_cols[i]);
  Eigen::VectorXd xb = bmat.colPivHouseholderQr().solve(b);
  Eigen::VectorXd x_full = Eigen::VectorXd::Zero(total);
  if ((bmat * xb - b).lpNorm<Eigen::Infinity>() <= 1e-8 * (1.0 + b.lpNorm<Eigen::Infinity>())) {
    for (int i = 0; i < m; ++i) x_full[basis_cols[i]] = std::max(0.0, xb[i]);
  } else {
    for (int i = 0; i < m; ++i) x_full[basis_cols[i]] = std::max(0.0, tab(i, total));
  }
  out.x = x_full.head(n);
  out.objective = lp.c.dot(out.x);
  return out;
}

}  // namespace obroute
