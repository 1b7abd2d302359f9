#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <string>
#include <utility>

#include "reachcert/errors.hpp"

namespace reachcert {

namespace detail {
// Rejection threshold for "positive definite". Matrices that reach the
// SPD routines are SPD by theorem; an eigenvalue at or below this level
// signals a caller bug and is reported, never regularized.
inline constexpr double kSpdMinEig = 1e-12;
}  // namespace detail

// (lambda_min, lambda_max) of a symmetric matrix.
template <typename Derived>
std::pair<double, double> sym_eig_bounds(const Eigen::MatrixBase<Derived>& a) {
  using Mat = Eigen::Matrix<double, Derived::RowsAtCompileTime,
                            Derived::ColsAtCompileTime>;
  Eigen::SelfAdjointEigenSolver<Mat> es(a, Eigen::EigenvaluesOnly);
  const auto& ev = es.eigenvalues();
  return {ev(0), ev(ev.size() - 1)};
}

// Unique SPD square root via eigendecomposition.
template <typename Derived>
Eigen::Matrix<double, Derived::RowsAtCompileTime, Derived::ColsAtCompileTime>
spd_sqrt(const Eigen::MatrixBase<Derived>& a) {
  using Mat = Eigen::Matrix<double, Derived::RowsAtCompileTime,
                            Derived::ColsAtCompileTime>;
  Eigen::SelfAdjointEigenSolver<Mat> es(a);
  const double min_eig = es.eigenvalues()(0);
  if (!(min_eig > detail::kSpdMinEig)) {
    throw NotSpdError("spd_sqrt: matrix is not positive definite (min eigenvalue " +
                          std::to_string(min_eig) + ")",
                      min_eig);
  }
  return es.eigenvectors() *
         es.eigenvalues().cwiseSqrt().asDiagonal() *
         es.eigenvectors().transpose();
}

// Inverse of spd_sqrt, computed from the same decomposition.
template <typename Derived>
Eigen::Matrix<double, Derived::RowsAtCompileTime, Derived::ColsAtCompileTime>
spd_inv_sqrt(const Eigen::MatrixBase<Derived>& a) {
  using Mat = Eigen::Matrix<double, Derived::RowsAtCompileTime,
                            Derived::ColsAtCompileTime>;
  Eigen::SelfAdjointEigenSolver<Mat> es(a);
  const double min_eig = es.eigenvalues()(0);
  if (!(min_eig > detail::kSpdMinEig)) {
    throw NotSpdError("spd_inv_sqrt: matrix is not positive definite (min eigenvalue " +
                          std::to_string(min_eig) + ")",
                      min_eig);
  }
  return es.eigenvectors() *
         es.eigenvalues().cwiseSqrt().cwiseInverse().asDiagonal() *
         es.eigenvectors().transpose();
}

// Euclidean-induced operator norm, sqrt(lambda_max(A'A)), evaluated on the
// smaller Gram side.
template <typename Derived>
double induced_norm2(const Eigen::MatrixBase<Derived>& a) {
  double lam;
  if (a.rows() <= a.cols()) {
    lam = sym_eig_bounds((a * a.transpose()).eval()).second;
  } else {
    lam = sym_eig_bounds((a.transpose() * a).eval()).second;
  }
  return std::sqrt(std::max(lam, 0.0));
}

}  // namespace reachcert
