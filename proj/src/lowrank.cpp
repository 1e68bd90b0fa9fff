#include "spotvol/lowrank.hpp"

#include <algorithm>
#include <cmath>
#include <fmt/format.h>
#include <numeric>

#include "spotvol/error.hpp"
#include "spotvol/jacobi_svd.hpp"

namespace spotvol {

using Eigen::Index;

Eigen::MatrixXd SpectralDecomposition::reconstruct() const {
  return u * singular_values.asDiagonal() * v.transpose();
}

SpectralDecomposition decompose(const Eigen::MatrixXd& values, Execution exec) {
  if (values.size() == 0) throw Error(ErrorKind::ShapeMismatch, "cannot decompose an empty matrix");
  for (Index c = 0; c < values.cols(); ++c)
    for (Index r = 0; r < values.rows(); ++r)
      if (!std::isfinite(values(r, c)))
        throw NonFiniteInputError(static_cast<std::size_t>(r), static_cast<std::size_t>(c));

  auto svd = kernels::jacobi_svd(values, exec);
  const Index r = svd.sigma.size();

  std::vector<Index> order(static_cast<std::size_t>(r));
  std::iota(order.begin(), order.end(), Index{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](Index a, Index b) { return svd.sigma(a) > svd.sigma(b); });

  SpectralDecomposition out;
  out.u.resize(values.rows(), r);
  out.v.resize(values.cols(), r);
  out.singular_values.resize(r);
  for (Index k = 0; k < r; ++k) {
    const Index src = order[static_cast<std::size_t>(k)];
    Eigen::VectorXd uk = svd.u.col(src);
    Eigen::VectorXd vk = svd.v.col(src);
    // Sign convention: nonnegative mean of U_k; near-zero means fall back to
    // the sign of the largest-magnitude entry.
    const double sum = uk.sum();
    double sign = sum < 0.0 ? -1.0 : 1.0;
    if (std::abs(sum) <= 1e-12 * uk.lpNorm<1>()) {
      Index arg = 0;
      uk.cwiseAbs().maxCoeff(&arg);
      sign = uk(arg) < 0.0 ? -1.0 : 1.0;
    }
    out.u.col(k) = sign * uk;
    out.v.col(k) = sign * vk;
    out.singular_values(k) = svd.sigma(src);
  }
  return out;
}

SpectralDecomposition decompose(const DayMatrix& matrix, Execution exec) {
  for (std::size_t i = 0; i < matrix.mask.size(); ++i)
    if (matrix.mask[i] == SlotFlag::missing)
      throw Error(ErrorKind::InvalidArgument,
                  fmt::format("cell (hour {}, day {}) is missing; calendarize before decomposing",
                              i % static_cast<std::size_t>(matrix.hours()),
                              i / static_cast<std::size_t>(matrix.hours())));
  return decompose(matrix.values, exec);
}

RankPModel truncate(const SpectralDecomposition& d, int p) {
  if (p < 1 || p > d.rank())
    throw Error(ErrorKind::RankOutOfRange, fmt::format("rank {} outside [1, {}]", p, d.rank()));
  RankPModel model;
  model.p = p;
  model.approximation = d.u.leftCols(p) * d.singular_values.head(p).asDiagonal() * d.v.leftCols(p).transpose();
  double tail_energy = 0.0;
  for (Index k = p; k < d.rank(); ++k) {
    model.spectrum_tail.push_back(d.singular_values(k));
    tail_energy += d.singular_values(k) * d.singular_values(k);
  }
  model.frobenius_error = std::sqrt(tail_energy);
  return model;
}

std::vector<double> ResidualSeries::absolute() const {
  std::vector<double> out(residuals.size());
  std::transform(residuals.begin(), residuals.end(), out.begin(), [](double r) { return std::abs(r); });
  return out;
}

std::vector<double> ResidualSeries::observed_absolute() const {
  std::vector<double> out;
  out.reserve(residuals.size());
  for (std::size_t i = 0; i < residuals.size(); ++i)
    if (mask[i] == SlotFlag::observed) out.push_back(std::abs(residuals[i]));
  return out;
}

std::size_t ResidualSeries::imputed_count() const {
  return static_cast<std::size_t>(std::count(mask.begin(), mask.end(), SlotFlag::imputed));
}

ResidualSeries residual_series(const DayMatrix& matrix, const RankPModel& model) {
  if (matrix.values.rows() != model.approximation.rows() || matrix.values.cols() != model.approximation.cols())
    throw Error(ErrorKind::ShapeMismatch,
                fmt::format("matrix is {}x{} but the model is {}x{}", matrix.values.rows(), matrix.values.cols(),
                            model.approximation.rows(), model.approximation.cols()));
  if (matrix.mask.size() != static_cast<std::size_t>(matrix.values.size()))
    throw Error(ErrorKind::ShapeMismatch, "mask size does not match the value grid");

  const double floor = 1e-12 * matrix.values.norm();
  ResidualSeries out;
  out.year = matrix.year;
  out.mask = matrix.mask;
  out.residuals.resize(static_cast<std::size_t>(matrix.values.size()));
  const double* a = matrix.values.data();
  const double* ap = model.approximation.data();
  for (std::size_t i = 0; i < out.residuals.size(); ++i) {
    const double r = a[i] - ap[i];
    out.residuals[i] = std::abs(r) <= floor ? 0.0 : r;
  }
  return out;
}

SpectrumTable spectrum_report(const std::vector<YearDecomposition>& decompositions) {
  SpectrumTable table;
  for (const auto& [year, d] : decompositions) {
    const double lead = d.rank() > 0 ? d.singular_values(0) : 0.0;
    for (Index k = 0; k < d.rank(); ++k) {
      const double s = d.singular_values(k);
      table.rows.push_back({year, static_cast<int>(k + 1), s, lead > 0.0 ? s / lead : 0.0});
    }
  }
  return table;
}

void write_spectrum_csv(std::ostream& out, const SpectrumTable& table) {
  out << "year,k,sigma,sigma_normalized\n";
  for (const auto& r : table.rows) out << fmt::format("{},{},{},{}\n", r.year, r.k, r.sigma, r.sigma_normalized);
}

void write_profiles_csv(std::ostream& out, const SpectralDecomposition& d, int columns) {
  out << "k,hour,u_value\n";
  const Index cols = std::min<Index>(columns, d.rank());
  for (Index k = 0; k < cols; ++k)
    for (Index h = 0; h < d.u.rows(); ++h) out << fmt::format("{},{},{}\n", k + 1, h, d.u(h, k));
}

void write_amplitudes_csv(std::ostream& out, const SpectralDecomposition& d, int columns) {
  out << "k,day,v_value\n";
  const Index cols = std::min<Index>(columns, d.rank());
  for (Index k = 0; k < cols; ++k)
    for (Index day = 0; day < d.v.rows(); ++day) out << fmt::format("{},{},{}\n", k + 1, day + 1, d.v(day, k));
}

}  // namespace spotvol
