#pragma once

#include <Eigen/Dense>
#include <ostream>
#include <vector>

#include "spotvol/execution.hpp"
#include "spotvol/ingest.hpp"

namespace spotvol {

/// A = U S V^T with singular values sorted nonincreasing. Each column of U
/// has a nonnegative entry sum; sign flips are absorbed into V.
struct SpectralDecomposition {
  Eigen::MatrixXd u;               // H x r daily profiles
  Eigen::VectorXd singular_values;  // r
  Eigen::MatrixXd v;               // D x r per-day amplitudes

  Eigen::Index rank() const { return singular_values.size(); }
  Eigen::MatrixXd reconstruct() const;
};

SpectralDecomposition decompose(const Eigen::MatrixXd& values, Execution exec = Execution::parallel);
/// Rejects matrices that still contain `missing` cells.
SpectralDecomposition decompose(const DayMatrix& matrix, Execution exec = Execution::parallel);

struct RankPModel {
  int p = 0;
  Eigen::MatrixXd approximation;
  double frobenius_error = 0.0;  // sqrt of the discarded spectral energy
  std::vector<double> spectrum_tail;
};

inline constexpr int kDefaultRank = 2;

RankPModel truncate(const SpectralDecomposition& decomposition, int p);

/// Signed residuals A - A_p in hour order, paired with the ingest mask.
struct ResidualSeries {
  std::vector<double> residuals;
  std::vector<SlotFlag> mask;
  int year = 0;

  std::size_t size() const { return residuals.size(); }
  std::vector<double> absolute() const;
  /// Absolute residuals of `observed` cells only.
  std::vector<double> observed_absolute() const;
  std::size_t imputed_count() const;
};

/// Residuals smaller than the rounding level of the reconstruction
/// (1e-12 * ||A||_F) are reported as exact zeros.
ResidualSeries residual_series(const DayMatrix& matrix, const RankPModel& model);

struct SpectrumRow {
  int year = 0;
  int k = 0;  // 1-based
  double sigma = 0.0;
  double sigma_normalized = 0.0;
};

struct SpectrumTable {
  std::vector<SpectrumRow> rows;
};

struct YearDecomposition {
  int year = 0;
  SpectralDecomposition decomposition;
};

SpectrumTable spectrum_report(const std::vector<YearDecomposition>& decompositions);

void write_spectrum_csv(std::ostream& out, const SpectrumTable& table);
/// `k,hour,u_value` for the first `columns` profiles.
void write_profiles_csv(std::ostream& out, const SpectralDecomposition& d, int columns);
/// `k,day,v_value` for the first `columns` amplitude vectors; day is 1-based.
void write_amplitudes_csv(std::ostream& out, const SpectralDecomposition& d, int columns);

}  // namespace spotvol
