#pragma once

#include <Eigen/Dense>

#include "spotvol/execution.hpp"

namespace spotvol::kernels {

/// Thin SVD a = u * diag(sigma) * v^T with r = min(rows, cols) columns.
/// Singular values are returned unsorted in the order the sweep left them.
struct ThinSvd {
  Eigen::MatrixXd u;
  Eigen::VectorXd sigma;
  Eigen::MatrixXd v;
  int sweeps = 0;
};

/// One-sided (Hestenes) Jacobi SVD.
///
/// The parallel path visits column pairs in round-robin tournament order so
/// that the pairs of one round are disjoint and can be rotated concurrently.
/// The serial path is the classic cyclic-by-row ordering and serves as the
/// reference implementation in tests; both converge to the same decomposition
/// up to rounding.
ThinSvd jacobi_svd(const Eigen::MatrixXd& a, Execution exec = Execution::parallel);

}  // namespace spotvol::kernels
