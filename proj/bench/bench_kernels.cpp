// Serial reference vs OpenMP kernels. Run with OMP_NUM_THREADS set to taste.

#include <benchmark/benchmark.h>

#include <random>

#include "spotvol/jacobi_svd.hpp"
#include "spotvol/seasonality.hpp"

using namespace spotvol;

namespace {

Eigen::MatrixXd day_matrix(Eigen::Index days) {
  std::mt19937_64 gen(1);
  std::uniform_real_distribution<double> dist(0.0, 100.0);
  Eigen::MatrixXd m(24, days);
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = dist(gen);
  return m;
}

std::vector<double> residuals(std::size_t n) {
  std::mt19937_64 gen(2);
  std::exponential_distribution<double> dist(1.0 / 3.0);
  std::vector<double> r(n);
  for (auto& x : r) x = dist(gen);
  return r;
}

void BM_JacobiSvd(benchmark::State& state, Execution exec) {
  const auto a = day_matrix(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(kernels::jacobi_svd(a, exec));
}

void BM_PermutationTest(benchmark::State& state, Execution exec) {
  const auto r = residuals(8784);
  for (auto _ : state) benchmark::DoNotOptimize(permutation_test(r, static_cast<int>(state.range(0)), 0, exec));
}

}  // namespace

BENCHMARK_CAPTURE(BM_JacobiSvd, serial, Execution::serial)->Arg(365)->Arg(366 * 4)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_JacobiSvd, parallel, Execution::parallel)->Arg(365)->Arg(366 * 4)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_PermutationTest, serial, Execution::serial)->Arg(1000)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_PermutationTest, parallel, Execution::parallel)->Arg(1000)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
