#include "spotvol/trend.hpp"

#include <algorithm>
#include <boost/math/distributions/students_t.hpp>
#include <cmath>
#include <fmt/format.h>

#include "spotvol/error.hpp"

namespace spotvol {

namespace {

void sort_by_year(std::vector<YearValue>& points) {
  std::stable_sort(points.begin(), points.end(), [](const YearValue& a, const YearValue& b) { return a.year < b.year; });
}

}  // namespace

VolatilityTrend fit_trend(std::vector<YearValue> points) {
  if (points.size() < 3)
    throw Error(ErrorKind::DegenerateDesign, fmt::format("{} points; at least 3 required", points.size()));
  sort_by_year(points);
  if (points.front().year == points.back().year)
    throw Error(ErrorKind::DegenerateDesign, "all points share the same year");
  for (const auto& p : points)
    if (!std::isfinite(p.value))
      throw Error(ErrorKind::NonFiniteInput, fmt::format("non-finite value for year {}", p.year));

  const double n = static_cast<double>(points.size());
  double year_mean = 0.0, value_mean = 0.0;
  for (const auto& p : points) {
    year_mean += p.year;
    value_mean += p.value;
  }
  year_mean /= n;
  value_mean /= n;

  double sxx = 0.0, sxy = 0.0;
  for (const auto& p : points) {
    const double dx = p.year - year_mean;
    sxx += dx * dx;
    sxy += dx * (p.value - value_mean);
  }

  VolatilityTrend t;
  t.slope = sxy / sxx;
  t.intercept = value_mean - t.slope * year_mean;
  t.dof = static_cast<int>(points.size()) - 2;

  double rss = 0.0;
  for (const auto& p : points) {
    const double e = p.value - (value_mean + t.slope * (p.year - year_mean));
    rss += e * e;
  }
  t.residual_std_error = std::sqrt(rss / t.dof);
  t.stderr_slope = t.residual_std_error / std::sqrt(sxx);
  t.t_critical = boost::math::quantile(boost::math::students_t(t.dof), 0.975);
  t.ci_low = t.slope - t.t_critical * t.stderr_slope;
  t.ci_high = t.slope + t.t_critical * t.stderr_slope;
  t.points = std::move(points);
  return t;
}

std::vector<YearValue> tail_trend(std::vector<YearValue> points) {
  sort_by_year(points);
  return points;
}

void write_trend_csv(std::ostream& out, const std::vector<TrendRow>& rows) {
  out << "year,mu_hat,fitted,tail_median\n";
  for (const auto& r : rows) {
    out << fmt::format("{},{},{},", r.year, r.mu_hat, r.fitted);
    if (r.tail_median) out << fmt::format("{}", *r.tail_median);
    out << '\n';
  }
}

}  // namespace spotvol
