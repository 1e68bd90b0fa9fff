#pragma once

#include <optional>
#include <ostream>
#include <vector>

namespace spotvol {

struct YearValue {
  int year = 0;
  double value = 0.0;
};

/// OLS fit value = intercept + slope * year with a two-sided 95% t interval on the slope.
struct VolatilityTrend {
  std::vector<YearValue> points;
  double slope = 0.0;      // per year
  double intercept = 0.0;  // at calendar year 0
  double ci_low = 0.0;
  double ci_high = 0.0;
  double stderr_slope = 0.0;
  double residual_std_error = 0.0;
  double t_critical = 0.0;
  int dof = 0;

  double fitted(int year) const { return intercept + slope * static_cast<double>(year); }
};

VolatilityTrend fit_trend(std::vector<YearValue> points);

/// Points ordered by year, for plotting. No model is fitted.
std::vector<YearValue> tail_trend(std::vector<YearValue> points);

struct TrendRow {
  int year = 0;
  double mu_hat = 0.0;
  double fitted = 0.0;
  std::optional<double> tail_median;
};

void write_trend_csv(std::ostream& out, const std::vector<TrendRow>& rows);

}  // namespace spotvol
