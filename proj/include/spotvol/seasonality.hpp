#pragma once

#include <cstdint>
#include <ostream>
#include <span>
#include <vector>

#include "spotvol/execution.hpp"
#include "spotvol/lowrank.hpp"

namespace spotvol {

inline constexpr int kDefaultPermutations = 1000;
inline constexpr int kMinPermutations = 100;
inline constexpr std::size_t kHistogramBins = 40;

struct HistogramBin {
  double left = 0.0;
  double right = 0.0;
  std::size_t count = 0;
};

struct PermutationSummary {
  std::vector<HistogramBin> bins;
  double min = 0.0;
  double max = 0.0;
  double mean = 0.0;
};

struct SeasonalityTest {
  double l_observed = 0.0;
  int n_permutations = 0;
  std::uint64_t seed = 0;
  double p_value = 1.0;  // (#{L_perm >= L_obs} + 1) / (n_permutations + 1)
  std::vector<double> permutation_values;  // indexed by permutation number
  PermutationSummary summary;
  std::size_t imputed_cells = 0;
};

/// Concentration of residual mass toward both ends of the series:
/// L = (1/1000) * sum_h R(h) * x(h)^2 with x(h) = (h - n/2) / (n/2), h = 1..n.
double angular_momentum(std::span<const double> absolute_residuals);
double angular_momentum(const ResidualSeries& residuals);

/// Monte Carlo permutation test of L. Permutation i shuffles with a generator
/// derived from (seed, i), so the result does not depend on scheduling.
SeasonalityTest permutation_test(std::span<const double> absolute_residuals, int n_permutations,
                                 std::uint64_t seed, Execution exec = Execution::parallel);
SeasonalityTest permutation_test(const ResidualSeries& residuals, int n_permutations, std::uint64_t seed,
                                 Execution exec = Execution::parallel);

PermutationSummary summarize(std::span<const double> values, std::size_t bins = kHistogramBins);

void write_histogram_csv(std::ostream& out, const PermutationSummary& summary);

}  // namespace spotvol
