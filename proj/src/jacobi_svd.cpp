#include "spotvol/jacobi_svd.hpp"

#include <cmath>
#include <limits>
#include <numeric>
#include <vector>

#include "spotvol/error.hpp"

namespace spotvol::kernels {

namespace {

using Eigen::Index;

constexpr int kMaxSweeps = 80;

// Orthogonalizes columns i and j of w, applying the same rotation to q.
bool rotate_pair(Eigen::MatrixXd& w, Eigen::MatrixXd& q, Index i, Index j, double tol) {
  const double alpha = w.col(i).squaredNorm();
  const double beta = w.col(j).squaredNorm();
  if (alpha == 0.0 || beta == 0.0) return false;
  const double gamma = w.col(i).dot(w.col(j));
  if (std::abs(gamma) <= tol * std::sqrt(alpha) * std::sqrt(beta)) return false;

  const double zeta = (beta - alpha) / (2.0 * gamma);
  const double t = std::copysign(1.0, zeta) / (std::abs(zeta) + std::hypot(1.0, zeta));
  const double c = 1.0 / std::sqrt(1.0 + t * t);
  const double s = c * t;

  double* wi = w.col(i).data();
  double* wj = w.col(j).data();
  for (Index r = 0; r < w.rows(); ++r) {
    const double x = wi[r], y = wj[r];
    wi[r] = c * x - s * y;
    wj[r] = s * x + c * y;
  }
  double* qi = q.col(i).data();
  double* qj = q.col(j).data();
  for (Index r = 0; r < q.rows(); ++r) {
    const double x = qi[r], y = qj[r];
    qi[r] = c * x - s * y;
    qj[r] = s * x + c * y;
  }
  return true;
}

bool sweep_serial(Eigen::MatrixXd& w, Eigen::MatrixXd& q, double tol) {
  bool rotated = false;
  for (Index i = 0; i + 1 < w.cols(); ++i)
    for (Index j = i + 1; j < w.cols(); ++j) rotated = rotate_pair(w, q, i, j, tol) || rotated;
  return rotated;
}

// Circle-method tournament: each round pairs every column exactly once.
bool sweep_parallel(Eigen::MatrixXd& w, Eigen::MatrixXd& q, double tol, std::vector<Index>& order) {
  const auto players = static_cast<Index>(order.size());
  const Index half = players / 2;
  bool rotated = false;
  for (Index round = 0; round + 1 < players; ++round) {
#pragma omp parallel for schedule(static) reduction(|| : rotated)
    for (Index k = 0; k < half; ++k) {
      Index i = order[static_cast<std::size_t>(k)];
      Index j = order[static_cast<std::size_t>(players - 1 - k)];
      if (i < 0 || j < 0) continue;
      if (i > j) std::swap(i, j);
      if (rotate_pair(w, q, i, j, tol)) rotated = true;
    }
    const Index last = order.back();
    for (Index p = players - 1; p > 1; --p) order[static_cast<std::size_t>(p)] = order[static_cast<std::size_t>(p - 1)];
    order[1] = last;
  }
  return rotated;
}

// Replaces column j of `basis` with a unit vector orthogonal to the columns in `keep`.
void complete_column(Eigen::MatrixXd& basis, Index j, const std::vector<Index>& keep) {
  const Index m = basis.rows();
  Eigen::VectorXd best;
  double best_norm = -1.0;
  for (Index e = 0; e < m; ++e) {
    Eigen::VectorXd x = Eigen::VectorXd::Unit(m, e);
    for (int pass = 0; pass < 2; ++pass)
      for (Index k : keep) x -= basis.col(k).dot(x) * basis.col(k);
    const double nrm = x.norm();
    if (nrm > best_norm + 1e-12) {
      best_norm = nrm;
      best = x;
    }
  }
  basis.col(j) = best / best_norm;
}

}  // namespace

ThinSvd jacobi_svd(const Eigen::MatrixXd& a, Execution exec) {
  const bool tall = a.rows() >= a.cols();
  Eigen::MatrixXd w = tall ? Eigen::MatrixXd(a) : Eigen::MatrixXd(a.transpose());
  const Index n = w.cols();
  Eigen::MatrixXd q = Eigen::MatrixXd::Identity(n, n);
  const double tol = static_cast<double>(std::max<Index>(w.rows(), 1)) * std::numeric_limits<double>::epsilon();

  for (Index r = 0; r < w.rows(); ++r)
    for (Index c = 0; c < n; ++c)
      if (!std::isfinite(w(r, c))) throw NonFiniteInputError(static_cast<std::size_t>(tall ? r : c),
                                                             static_cast<std::size_t>(tall ? c : r));

  std::vector<Index> order(static_cast<std::size_t>(n + (n % 2)));
  std::iota(order.begin(), order.end(), Index{0});
  if (n % 2) order.back() = -1;

  ThinSvd out;
  bool converged = n < 2;
  while (!converged && out.sweeps < kMaxSweeps) {
    ++out.sweeps;
    const bool rotated = exec == Execution::serial ? sweep_serial(w, q, tol) : sweep_parallel(w, q, tol, order);
    converged = !rotated;
  }
  if (!converged) throw Error(ErrorKind::NoConvergence, "Jacobi SVD did not converge");

  Eigen::VectorXd sigma(n);
  for (Index j = 0; j < n; ++j) sigma(j) = w.col(j).norm();
  const double sigma_max = n > 0 ? sigma.maxCoeff() : 0.0;

  std::vector<Index> good, degenerate;
  for (Index j = 0; j < n; ++j) {
    if (sigma(j) > 0.0 && sigma(j) > sigma_max * 1e-30) {
      w.col(j) /= sigma(j);
      good.push_back(j);
    } else {
      degenerate.push_back(j);
    }
  }
  for (Index j : degenerate) {
    complete_column(w, j, good);
    good.push_back(j);
  }

  out.sigma = std::move(sigma);
  if (tall) {
    out.u = std::move(w);
    out.v = std::move(q);
  } else {
    out.u = std::move(q);
    out.v = std::move(w);
  }
  return out;
}

}  // namespace spotvol::kernels
