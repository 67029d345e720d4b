#pragma once

#include <Eigen/Dense>

#include <stdexcept>

namespace obroute {

template <typename Scalar>
using MatrixX = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
template <typename Scalar>
using RowVectorX = Eigen::Matrix<Scalar, 1, Eigen::Dynamic>;

// (v * M)_xy = v_x M_xy. Column sums give vM; for right-stochastic M the row
// sums give v back.
template <typename VDerived, typename MDerived>
MatrixX<typename MDerived::Scalar> pointwise_mul(
    const Eigen::MatrixBase<VDerived>& v, const Eigen::MatrixBase<MDerived>& m) {
  if (v.size() != m.rows()) throw std::invalid_argument("pointwise_mul: dimension mismatch");
  return v.derived().transpose().asDiagonal() * m.derived();
}

// Divides each nonzero row by its sum. A zero row x is replaced by row x of
// `fallback`, which is the walk matrix of the graph: c(x, y) / d_x.
template <typename MDerived, typename FDerived>
MatrixX<typename MDerived::Scalar> row_norm(const Eigen::MatrixBase<MDerived>& m,
                                            const Eigen::MatrixBase<FDerived>& fallback) {
  using Scalar = typename MDerived::Scalar;
  if (m.rows() != fallback.rows() || m.cols() != fallback.cols()) {
    throw std::invalid_argument("row_norm: dimension mismatch");
  }
  if ((m.array() < Scalar(0)).any()) throw std::invalid_argument("row_norm: negative entry");
  MatrixX<Scalar> out(m.rows(), m.cols());
  for (Eigen::Index x = 0; x < m.rows(); ++x) {
    const Scalar total = m.row(x).sum();
    if (total > Scalar(0)) {
      out.row(x) = m.row(x) / total;
    } else {
      out.row(x) = fallback.row(x);
    }
  }
  return out;
}

// v A^steps.
template <typename VDerived, typename ADerived>
RowVectorX<typename VDerived::Scalar> walk_power(const Eigen::MatrixBase<VDerived>& v,
                                                  const Eigen::MatrixBase<ADerived>& a,
                                                  int steps) {
  if (steps < 0) throw std::invalid_argument("walk_power: negative step count");
  if (v.size() != a.rows() || a.rows() != a.cols()) {
    throw std::invalid_argument("walk_power: dimension mismatch");
  }
  RowVectorX<typename VDerived::Scalar> out = v.derived().reshaped().transpose();
  for (int s = 0; s < steps; ++s) out = (out * a.derived()).eval();
  return out;
}

// rev(v, A) = row_norm((v * A)^T). Right stochastic, respects the graph of A
// and satisfies v A rev(v, A) = v for nonnegative v.
template <typename VDerived, typename ADerived>
MatrixX<typename ADerived::Scalar> reverse_operator(const Eigen::MatrixBase<VDerived>& v,
                                                    const Eigen::MatrixBase<ADerived>& a) {
  using Scalar = typename ADerived::Scalar;
  if ((v.array() < Scalar(0)).any()) throw std::invalid_argument("reverse_operator: negative mass");
  return row_norm(pointwise_mul(v, a).transpose(), a);
}

}  // namespace obroute
