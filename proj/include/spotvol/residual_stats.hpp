#pragma once

#include <optional>
#include <ostream>
#include <span>
#include <vector>

#include "spotvol/lowrank.hpp"

namespace spotvol {

inline constexpr double kDefaultTrimQuantile = 0.99;
inline constexpr std::size_t kMinResiduals = 100;
inline constexpr std::size_t kMinTailPoints = 10;

struct ProbPoint {
  double theoretical = 0.0;  // exponential quantile at plotting position (i - 0.5) / n
  double observed = 0.0;     // i-th order statistic
};

/// Summary of the absolute residuals of one year. Only `observed` cells enter;
/// imputed cells are excluded.
struct ResidualAnalysis {
  std::size_t n = 0;
  double trim_quantile = kDefaultTrimQuantile;
  double cutoff = 0.0;          // order statistic at ceil(q * n), 1-based
  double mu_hat = 0.0;          // mean of the values <= cutoff
  double mu_hat_untrimmed = 0.0;
  double mu_hat_censored = 0.0;  // exponential MLE treating values above cutoff as censored at it
  std::optional<double> tail_median;
  std::vector<ProbPoint> probplot;
};

/// Index (0-based, into the sorted sample) of the q-quantile order statistic.
std::size_t quantile_index(std::size_t n, double q);

ResidualAnalysis fit_bulk_exponential(std::span<const double> absolute_residuals, double q = kDefaultTrimQuantile);
ResidualAnalysis fit_bulk_exponential(const ResidualSeries& residuals, double q = kDefaultTrimQuantile);

/// Median of the absolute residuals strictly above the q-quantile cutoff.
double tail_median(std::span<const double> absolute_residuals, double q = kDefaultTrimQuantile);
double tail_median(const ResidualSeries& residuals, double q = kDefaultTrimQuantile);

std::vector<ProbPoint> probplot_points(std::span<const double> absolute_residuals, double mu);
std::vector<ProbPoint> probplot_points(const ResidualSeries& residuals, double mu);

void write_probplot_csv(std::ostream& out, const std::vector<ProbPoint>& points);

}  // namespace spotvol
