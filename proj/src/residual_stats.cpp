#include "spotvol/residual_stats.hpp"

#include <algorithm>
#include <cmath>
#include <fmt/format.h>

#include "spotvol/error.hpp"

namespace spotvol {

namespace {

std::vector<double> sorted_abs(std::span<const double> values) {
  std::vector<double> out(values.size());
  std::transform(values.begin(), values.end(), out.begin(), [](double v) { return std::abs(v); });
  std::sort(out.begin(), out.end());
  return out;
}

void check_quantile(double q) {
  if (!(q > 0.5 && q <= 1.0))
    throw Error(ErrorKind::InvalidArgument, fmt::format("trim quantile {} outside (0.5, 1]", q));
}

double median_of_sorted(std::span<const double> s) {
  const std::size_t n = s.size();
  return n % 2 ? s[n / 2] : 0.5 * (s[n / 2 - 1] + s[n / 2]);
}

}  // namespace

std::size_t quantile_index(std::size_t n, double q) {
  // ceil(q * n) with a guard against q * n landing a rounding step above an integer
  const double scaled = q * static_cast<double>(n);
  auto k = static_cast<std::size_t>(std::ceil(scaled - 1e-9 * scaled));
  k = std::clamp<std::size_t>(k, 1, n);
  return k - 1;
}

ResidualAnalysis fit_bulk_exponential(std::span<const double> absolute_residuals, double q) {
  check_quantile(q);
  if (absolute_residuals.size() < kMinResiduals)
    throw Error(ErrorKind::TooFewResiduals,
                fmt::format("{} residuals; at least {} required", absolute_residuals.size(), kMinResiduals));
  const auto s = sorted_abs(absolute_residuals);
  const std::size_t n = s.size();

  ResidualAnalysis out;
  out.n = n;
  out.trim_quantile = q;
  out.cutoff = s[quantile_index(n, q)];
  const auto kept_end = std::upper_bound(s.begin(), s.end(), out.cutoff);
  const auto kept = static_cast<std::size_t>(kept_end - s.begin());

  double kept_sum = 0.0;
  for (auto it = s.begin(); it != kept_end; ++it) kept_sum += *it;
  double total = kept_sum;
  for (auto it = kept_end; it != s.end(); ++it) total += *it;

  out.mu_hat = kept_sum / static_cast<double>(kept);
  out.mu_hat_untrimmed = total / static_cast<double>(n);
  out.mu_hat_censored = (kept_sum + static_cast<double>(n - kept) * out.cutoff) / static_cast<double>(kept);
  return out;
}

ResidualAnalysis fit_bulk_exponential(const ResidualSeries& residuals, double q) {
  return fit_bulk_exponential(residuals.observed_absolute(), q);
}

double tail_median(std::span<const double> absolute_residuals, double q) {
  check_quantile(q);
  if (absolute_residuals.empty()) throw Error(ErrorKind::TooFewTailPoints, "no residuals");
  const auto s = sorted_abs(absolute_residuals);
  const double cutoff = s[quantile_index(s.size(), q)];
  const auto first = std::upper_bound(s.begin(), s.end(), cutoff);
  const auto count = static_cast<std::size_t>(s.end() - first);
  if (count < kMinTailPoints)
    throw Error(ErrorKind::TooFewTailPoints,
                fmt::format("{} residuals above the cutoff; at least {} required", count, kMinTailPoints));
  return median_of_sorted(std::span<const double>(&*first, count));
}

double tail_median(const ResidualSeries& residuals, double q) {
  return tail_median(residuals.observed_absolute(), q);
}

std::vector<ProbPoint> probplot_points(std::span<const double> absolute_residuals, double mu) {
  if (!(mu > 0.0)) throw Error(ErrorKind::NonPositiveMu, fmt::format("exponential mean {} is not positive", mu));
  const auto s = sorted_abs(absolute_residuals);
  const double n = static_cast<double>(s.size());
  std::vector<ProbPoint> out(s.size());
  for (std::size_t i = 0; i < s.size(); ++i) {
    const double position = (static_cast<double>(i) + 0.5) / n;
    out[i] = {-mu * std::log1p(-position), s[i]};
  }
  return out;
}

std::vector<ProbPoint> probplot_points(const ResidualSeries& residuals, double mu) {
  return probplot_points(residuals.observed_absolute(), mu);
}

void write_probplot_csv(std::ostream& out, const std::vector<ProbPoint>& points) {
  out << "theoretical_quantile,ordered_residual\n";
  for (const auto& p : points) out << fmt::format("{},{}\n", p.theoretical, p.observed);
}

}  // namespace spotvol
