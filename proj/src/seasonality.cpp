#include "spotvol/seasonality.hpp"

#include <algorithm>
#include <cmath>
#include <fmt/format.h>
#include <numeric>

#include "spotvol/error.hpp"
#include "spotvol/rng.hpp"

namespace spotvol {

namespace {

std::vector<double> slot_weights(std::size_t n) {
  const double mid = static_cast<double>(n) / 2.0;
  std::vector<double> w(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double x = (static_cast<double>(i + 1) - mid) / mid;
    w[i] = x * x / 1000.0;
  }
  return w;
}

double weighted_sum(std::span<const double> values, std::span<const double> weights) {
  double acc = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i) acc += values[i] * weights[i];
  return acc;
}

double permuted_statistic(std::span<const double> values, std::span<const double> weights, std::uint64_t seed,
                          std::uint64_t index, std::vector<double>& scratch) {
  scratch.assign(values.begin(), values.end());
  auto gen = rng::stream(seed, index);
  for (std::size_t i = scratch.size() - 1; i > 0; --i) {
    const auto j = static_cast<std::size_t>(rng::uniform_below(gen, i + 1));
    std::swap(scratch[i], scratch[j]);
  }
  return weighted_sum(scratch, weights);
}

std::vector<double> absolute(std::span<const double> v) {
  std::vector<double> out(v.size());
  std::transform(v.begin(), v.end(), out.begin(), [](double x) { return std::abs(x); });
  return out;
}

}  // namespace

double angular_momentum(std::span<const double> absolute_residuals) {
  if (absolute_residuals.size() < 2)
    throw Error(ErrorKind::EmptySeries, fmt::format("{} residuals; at least 2 required", absolute_residuals.size()));
  const auto r = absolute(absolute_residuals);
  return weighted_sum(r, slot_weights(r.size()));
}

double angular_momentum(const ResidualSeries& residuals) { return angular_momentum(residuals.residuals); }

SeasonalityTest permutation_test(std::span<const double> absolute_residuals, int n_permutations, std::uint64_t seed,
                                 Execution exec) {
  if (n_permutations < kMinPermutations)
    throw Error(ErrorKind::TooFewPermutations,
                fmt::format("{} permutations; at least {} required", n_permutations, kMinPermutations));
  if (absolute_residuals.size() < 2)
    throw Error(ErrorKind::EmptySeries, fmt::format("{} residuals; at least 2 required", absolute_residuals.size()));

  const auto values = absolute(absolute_residuals);
  const auto weights = slot_weights(values.size());

  SeasonalityTest out;
  out.n_permutations = n_permutations;
  out.seed = seed;
  out.l_observed = weighted_sum(values, weights);
  out.permutation_values.resize(static_cast<std::size_t>(n_permutations));

  if (exec == Execution::serial) {
    std::vector<double> scratch;
    for (int i = 0; i < n_permutations; ++i)
      out.permutation_values[static_cast<std::size_t>(i)] =
          permuted_statistic(values, weights, seed, static_cast<std::uint64_t>(i), scratch);
  } else {
#pragma omp parallel
    {
      std::vector<double> scratch;
#pragma omp for schedule(dynamic, 8)
      for (int i = 0; i < n_permutations; ++i)
        out.permutation_values[static_cast<std::size_t>(i)] =
            permuted_statistic(values, weights, seed, static_cast<std::uint64_t>(i), scratch);
    }
  }

  const auto exceed = std::count_if(out.permutation_values.begin(), out.permutation_values.end(),
                                    [&](double l) { return l >= out.l_observed; });
  out.p_value = static_cast<double>(exceed + 1) / static_cast<double>(n_permutations + 1);
  out.summary = summarize(out.permutation_values);
  return out;
}

SeasonalityTest permutation_test(const ResidualSeries& residuals, int n_permutations, std::uint64_t seed,
                                 Execution exec) {
  auto out = permutation_test(residuals.residuals, n_permutations, seed, exec);
  out.imputed_cells = residuals.imputed_count();
  return out;
}

PermutationSummary summarize(std::span<const double> values, std::size_t bins) {
  PermutationSummary s;
  if (values.empty()) return s;
  const auto [lo, hi] = std::minmax_element(values.begin(), values.end());
  s.min = *lo;
  s.max = *hi;
  s.mean = std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(values.size());
  if (s.max == s.min || bins == 0) {
    s.bins.push_back({s.min, s.max, values.size()});
    return s;
  }
  const double width = (s.max - s.min) / static_cast<double>(bins);
  s.bins.resize(bins);
  for (std::size_t b = 0; b < bins; ++b) {
    s.bins[b].left = s.min + width * static_cast<double>(b);
    s.bins[b].right = b + 1 == bins ? s.max : s.min + width * static_cast<double>(b + 1);
  }
  for (double v : values) {
    auto b = static_cast<std::size_t>((v - s.min) / width);
    ++s.bins[std::min(b, bins - 1)].count;
  }
  return s;
}

void write_histogram_csv(std::ostream& out, const PermutationSummary& summary) {
  out << "bin_left,bin_right,count\n";
  for (const auto& b : summary.bins) out << fmt::format("{},{},{}\n", b.left, b.right, b.count);
}

}  // namespace spotvol
