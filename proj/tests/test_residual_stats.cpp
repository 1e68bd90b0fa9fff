#include <doctest.h>

#include <numeric>
#include <random>

#include "oracles.hpp"
#include "spotvol/error.hpp"
#include "spotvol/residual_stats.hpp"

using namespace spotvol;

namespace {

std::vector<double> exp_sample(std::size_t n, double mu, std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  std::exponential_distribution<double> dist(1.0 / mu);
  std::vector<double> out(n);
  for (auto& x : out) x = dist(gen);
  return out;
}

}  // namespace

TEST_CASE("closed-form truncated mean matches quadrature") {
  const double closed = oracle::truncated_exponential_mean(3.0, 0.99);
  CHECK(closed == doctest::Approx(oracle::truncated_exponential_mean_quadrature(3.0, 0.99)).epsilon(1e-9));
  CHECK(closed == doctest::Approx(2.861).epsilon(1e-3));
}

TEST_CASE("quantile index is ceil(q n) - 1, zero-based") {
  CHECK(quantile_index(100, 0.9) == 89);
  CHECK(quantile_index(100, 0.99) == 98);
  CHECK(quantile_index(8784, 0.99) == 8696);  // ceil(8696.16) - 1
  CHECK(quantile_index(10, 1.0) == 9);
}

TEST_CASE("fit_bulk_exponential") {
  SUBCASE("constant residuals") {
    const std::vector<double> r(500, 4.25);
    const auto a = fit_bulk_exponential(r, 0.99);
    CHECK(a.mu_hat == 4.25);
    CHECK(a.cutoff == 4.25);
    CHECK(a.mu_hat_untrimmed == 4.25);
  }
  SUBCASE("absolute values are used") {
    std::vector<double> r(200);
    for (std::size_t i = 0; i < r.size(); ++i) r[i] = (i % 2 ? -1.0 : 1.0) * static_cast<double>(i % 10);
    std::vector<double> flipped(r);
    for (auto& x : flipped) x = -x;
    CHECK(fit_bulk_exponential(r).mu_hat == fit_bulk_exponential(flipped).mu_hat);
  }
  SUBCASE("exponential sample of one leap year") {
    const double expected = oracle::truncated_exponential_mean(3.0, 0.99);
    double acc = 0.0;
    for (std::uint64_t s = 0; s < 20; ++s) {
      const double mu = fit_bulk_exponential(exp_sample(8784, 3.0, s), 0.99).mu_hat;
      CHECK(mu == doctest::Approx(expected).epsilon(0.03));
      acc += mu;
    }
    CHECK(acc / 20.0 == doctest::Approx(expected).epsilon(0.01));
  }
  SUBCASE("truncated-mean law over 100 trials") {
    const double expected = oracle::truncated_exponential_mean(3.0, 0.99);
    double acc = 0.0;
    for (std::uint64_t s = 100; s < 200; ++s) acc += fit_bulk_exponential(exp_sample(8784, 3.0, s), 0.99).mu_hat;
    CHECK(acc / 100.0 == doctest::Approx(expected).epsilon(0.02));
  }
  SUBCASE("censored estimator is close to the true mean") {
    double acc = 0.0;
    for (std::uint64_t s = 0; s < 20; ++s) acc += fit_bulk_exponential(exp_sample(8784, 3.0, s), 0.99).mu_hat_censored;
    CHECK(acc / 20.0 == doctest::Approx(3.0).epsilon(0.02));
  }
  SUBCASE("errors") {
    try {
      fit_bulk_exponential(std::vector<double>(99, 1.0));
      FAIL("expected TooFewResiduals");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::TooFewResiduals);
    }
    CHECK_THROWS_AS(fit_bulk_exponential(std::vector<double>(200, 1.0), 0.5), Error);
    CHECK_THROWS_AS(fit_bulk_exponential(std::vector<double>(200, 1.0), 1.01), Error);
  }
}

TEST_CASE("scale equivariance and trimming monotonicity") {
  const auto r = exp_sample(3000, 2.0, 8);
  const auto base = fit_bulk_exponential(r, 0.95);
  const double base_tail = tail_median(r, 0.95);
  for (double s : {0.5, 3.0, 1024.0}) {
    std::vector<double> scaled(r);
    for (auto& x : scaled) x *= s;
    const auto a = fit_bulk_exponential(scaled, 0.95);
    CHECK(a.mu_hat == doctest::Approx(s * base.mu_hat).epsilon(1e-12));
    CHECK(a.cutoff == doctest::Approx(s * base.cutoff).epsilon(1e-12));
    CHECK(tail_median(scaled, 0.95) == doctest::Approx(s * base_tail).epsilon(1e-12));
  }
  double previous = 0.0;
  for (double q = 0.55; q <= 1.0; q += 0.01) {
    const double mu = fit_bulk_exponential(r, q).mu_hat;
    CHECK(mu >= previous);
    previous = mu;
  }
}

TEST_CASE("tail_median") {
  std::vector<double> r(100);
  std::iota(r.begin(), r.end(), 1.0);
  CHECK(tail_median(r, 0.9) == 95.5);

  std::vector<double> negated(r);
  for (auto& x : negated) x = -x;
  CHECK(tail_median(negated, 0.9) == 95.5);

  const auto a = fit_bulk_exponential(r, 0.9);
  CHECK(tail_median(r, 0.9) >= a.cutoff);

  try {
    tail_median(r, 0.95);  // only 5 values above the cutoff
    FAIL("expected TooFewTailPoints");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::TooFewTailPoints);
  }
}

TEST_CASE("imputed cells do not influence the statistics") {
  ResidualSeries s;
  const auto values = exp_sample(1000, 3.0, 4);
  s.residuals = values;
  s.mask.assign(values.size(), SlotFlag::observed);
  for (std::size_t i = 0; i < values.size(); i += 37) s.mask[i] = SlotFlag::imputed;
  const auto a = fit_bulk_exponential(s, 0.95);
  const double t = tail_median(s, 0.95);

  auto altered = s;
  for (std::size_t i = 0; i < values.size(); i += 37) altered.residuals[i] = 1e6;
  const auto b = fit_bulk_exponential(altered, 0.95);
  CHECK(a.mu_hat == b.mu_hat);
  CHECK(a.cutoff == b.cutoff);
  CHECK(a.n == b.n);
  CHECK(t == tail_median(altered, 0.95));
  CHECK(probplot_points(s, 3.0).size() == probplot_points(altered, 3.0).size());
}

TEST_CASE("probplot_points") {
  SUBCASE("single residual") {
    const auto p = probplot_points(std::vector<double>{-2.5}, 3.0);
    REQUIRE(p.size() == 1);
    CHECK(p[0].theoretical == doctest::Approx(-3.0 * std::log(0.5)));
    CHECK(p[0].observed == 2.5);
  }
  SUBCASE("exponential sample lies near the diagonal") {
    const auto p = probplot_points(exp_sample(10000, 3.0, 21), 3.0);
    double sxy = 0.0, sxx = 0.0;
    for (std::size_t i = 1; i < p.size(); ++i) {
      CHECK(p[i].theoretical >= p[i - 1].theoretical);
      CHECK(p[i].observed >= p[i - 1].observed);
    }
    for (const auto& pt : p) {
      sxy += pt.theoretical * pt.observed;
      sxx += pt.theoretical * pt.theoretical;
    }
    const double slope = sxy / sxx;
    CHECK(slope >= 0.95);
    CHECK(slope <= 1.05);
  }
  SUBCASE("non-positive mean") {
    try {
      probplot_points(std::vector<double>{1.0}, 0.0);
      FAIL("expected NonPositiveMu");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::NonPositiveMu);
    }
  }
}
