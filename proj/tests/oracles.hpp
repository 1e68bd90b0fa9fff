#pragma once

// Test-only reference computations. Nothing here calls into the code paths
// it is used to check.

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

namespace spotvol::oracle {

inline Eigen::MatrixXd random_matrix(Eigen::Index rows, Eigen::Index cols, std::mt19937_64& gen,
                                     double lo = -1.0, double hi = 1.0) {
  std::uniform_real_distribution<double> dist(lo, hi);
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index c = 0; c < cols; ++c)
    for (Eigen::Index r = 0; r < rows; ++r) m(r, c) = dist(gen);
  return m;
}

/// Singular values from the eigenvalues of A^T A, largest first, r = min(rows, cols).
inline std::vector<double> singular_values_via_gram(const Eigen::MatrixXd& a) {
  const Eigen::MatrixXd gram = a.transpose() * a;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(gram, Eigen::EigenvaluesOnly);
  std::vector<double> ev(es.eigenvalues().data(), es.eigenvalues().data() + es.eigenvalues().size());
  std::sort(ev.rbegin(), ev.rend());
  ev.resize(static_cast<std::size_t>(std::min(a.rows(), a.cols())));
  for (double& e : ev) e = std::sqrt(std::max(e, 0.0));
  return ev;
}

/// Closed-form mean of Exp(mu) conditioned on X <= mu * ln(1 / (1 - q)).
inline double truncated_exponential_mean(double mu, double q) {
  const double c = mu * std::log(1.0 / (1.0 - q));
  const double z = c / mu;
  return mu * (1.0 - z * std::exp(-z) / (1.0 - std::exp(-z)));
}

/// Same quantity by composite Simpson quadrature of x f(x) / F(c) on [0, c].
inline double truncated_exponential_mean_quadrature(double mu, double q, int intervals = 20000) {
  const double c = mu * std::log(1.0 / (1.0 - q));
  const double h = c / intervals;
  auto f = [&](double x) { return x * std::exp(-x / mu) / mu; };
  double acc = f(0.0) + f(c);
  for (int i = 1; i < intervals; ++i) acc += (i % 2 ? 4.0 : 2.0) * f(i * h);
  return (acc * h / 3.0) / q;
}

/// Two-sample Kolmogorov-Smirnov statistic.
inline double ks_statistic(std::vector<double> a, std::vector<double> b) {
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  std::size_t i = 0, j = 0;
  double d = 0.0;
  while (i < a.size() && j < b.size()) {
    const double x = std::min(a[i], b[j]);
    while (i < a.size() && a[i] <= x) ++i;
    while (j < b.size() && b[j] <= x) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / a.size() - static_cast<double>(j) / b.size()));
  }
  return d;
}

inline double max_abs_deviation_from_identity(const Eigen::MatrixXd& q) {
  const Eigen::MatrixXd g = q.transpose() * q;
  return (g - Eigen::MatrixXd::Identity(g.rows(), g.cols())).cwiseAbs().maxCoeff();
}

}  // namespace spotvol::oracle
