#include <doctest.h>

#include <algorithm>
#include <numeric>
#include <random>

#include "oracles.hpp"
#include "spotvol/error.hpp"
#include "spotvol/lowrank.hpp"
#include "spotvol/synth.hpp"

using namespace spotvol;
using Eigen::MatrixXd;
using Eigen::VectorXd;

namespace {

DayMatrix as_day_matrix(const MatrixXd& values) {
  DayMatrix m;
  m.values = values;
  m.mask.assign(static_cast<std::size_t>(values.size()), SlotFlag::observed);
  m.year = 2016;
  return m;
}

void check_invariants(const MatrixXd& a, const SpectralDecomposition& d) {
  CHECK(d.rank() == std::min(a.rows(), a.cols()));
  CHECK(oracle::max_abs_deviation_from_identity(d.u) <= 1e-10);
  CHECK(oracle::max_abs_deviation_from_identity(d.v) <= 1e-10);
  const double scale = std::max(a.norm(), 1e-300);
  CHECK((a - d.reconstruct()).norm() / scale <= 1e-10);
  for (Eigen::Index k = 0; k < d.rank(); ++k) {
    CHECK(d.singular_values(k) >= 0.0);
    if (k > 0) CHECK(d.singular_values(k) <= d.singular_values(k - 1));
    CHECK(d.u.col(k).sum() >= 0.0);
  }
}

}  // namespace

TEST_CASE("rank-1 input") {
  VectorXd u(24), v(366);
  for (int i = 0; i < 24; ++i) u(i) = 1.0 + 0.1 * i;
  for (int j = 0; j < 366; ++j) v(j) = 2.0 + std::sin(0.05 * j);
  const MatrixXd a = u * v.transpose();
  const auto d = decompose(a);
  check_invariants(a, d);
  CHECK(d.singular_values(0) == doctest::Approx(u.norm() * v.norm()).epsilon(1e-12));
  for (Eigen::Index k = 1; k < d.rank(); ++k) CHECK(d.singular_values(k) <= 1e-12 * d.singular_values(0));
  // Positive generators give a positive leading profile.
  CHECK((d.u.col(0) - u.normalized()).cwiseAbs().maxCoeff() <= 1e-12);
}

TEST_CASE("identity has unit singular values") {
  const MatrixXd a = MatrixXd::Identity(3, 3);
  const auto d = decompose(a);
  check_invariants(a, d);
  for (int k = 0; k < 3; ++k) CHECK(d.singular_values(k) == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("zero matrix still yields orthonormal factors") {
  const MatrixXd a = MatrixXd::Zero(4, 6);
  const auto d = decompose(a);
  CHECK(d.singular_values.cwiseAbs().maxCoeff() == 0.0);
  CHECK(oracle::max_abs_deviation_from_identity(d.u) <= 1e-12);
  CHECK(oracle::max_abs_deviation_from_identity(d.v) <= 1e-12);
}

TEST_CASE("singular values agree with the eigenvalues of A^T A") {
  std::mt19937_64 gen(2024);
  for (int trial = 0; trial < 5; ++trial) {
    const MatrixXd a = oracle::random_matrix(24, 366, gen, 0.0, 100.0);
    const auto d = decompose(a);
    check_invariants(a, d);
    const auto expected = oracle::singular_values_via_gram(a);
    double worst = 0.0;
    for (std::size_t k = 0; k < expected.size(); ++k)
      worst = std::max(worst, std::abs(d.singular_values(static_cast<Eigen::Index>(k)) - expected[k]) / expected[k]);
    CHECK(worst <= 1e-8);
  }
}

TEST_CASE("shapes: tall, wide, square") {
  std::mt19937_64 gen(5);
  for (auto [r, c] : {std::pair{7, 5}, std::pair{5, 7}, std::pair{6, 6}, std::pair{1, 9}, std::pair{9, 1}}) {
    const MatrixXd a = oracle::random_matrix(r, c, gen);
    check_invariants(a, decompose(a));
  }
}

TEST_CASE("truncate") {
  std::mt19937_64 gen(11);
  const MatrixXd a = oracle::random_matrix(24, 60, gen);
  const auto d = decompose(a);

  SUBCASE("full rank reproduces the matrix") {
    const auto m = truncate(d, static_cast<int>(d.rank()));
    CHECK(m.frobenius_error == 0.0);
    CHECK(m.spectrum_tail.empty());
    CHECK((m.approximation - a).norm() / a.norm() <= 1e-10);
  }
  SUBCASE("Frobenius error matches the discarded spectrum") {
    for (int p : {1, 2, 5, 23}) {
      const auto m = truncate(d, p);
      const double direct = (a - m.approximation).squaredNorm();
      double tail = 0.0;
      for (double s : m.spectrum_tail) tail += s * s;
      CHECK(direct == doctest::Approx(tail).epsilon(1e-9));
      CHECK(m.spectrum_tail.size() == static_cast<std::size_t>(d.rank() - p));
    }
  }
  SUBCASE("rank out of range") {
    CHECK_THROWS_AS(truncate(d, 0), Error);
    try {
      truncate(d, 25);
      FAIL("expected RankOutOfRange");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::RankOutOfRange);
    }
  }
  SUBCASE("sign flips do not change A_p") {
    auto flipped = d;
    flipped.u.col(1) *= -1.0;
    flipped.v.col(1) *= -1.0;
    flipped.u.col(0) *= -1.0;
    flipped.v.col(0) *= -1.0;
    CHECK(truncate(flipped, 2).approximation == truncate(d, 2).approximation);
  }
}

TEST_CASE("rank-1 truncation beats random rank-1 competitors") {
  std::mt19937_64 gen(77);
  std::normal_distribution<double> normal;
  for (int trial = 0; trial < 10; ++trial) {
    const MatrixXd a = oracle::random_matrix(5, 7, gen);
    const double best = (a - truncate(decompose(a), 1).approximation).norm();
    for (int c = 0; c < 200; ++c) {
      VectorXd u(5), v(7);
      for (auto& x : u) x = normal(gen);
      for (auto& x : v) x = normal(gen);
      const MatrixXd r = u * v.transpose();
      const double alpha = (a.array() * r.array()).sum() / r.squaredNorm();  // best scaling of this direction
      CHECK(best <= (a - alpha * r).norm() + 1e-12);
    }
  }
}

TEST_CASE("column permutation equivariance") {
  std::mt19937_64 gen(3);
  const MatrixXd a = oracle::random_matrix(24, 40, gen);
  std::vector<int> perm(40);
  std::iota(perm.begin(), perm.end(), 0);
  std::shuffle(perm.begin(), perm.end(), gen);
  MatrixXd b(24, 40);
  for (int j = 0; j < 40; ++j) b.col(j) = a.col(perm[static_cast<std::size_t>(j)]);
  const auto pa = truncate(decompose(a), 2).approximation;
  const auto pb = truncate(decompose(b), 2).approximation;
  for (int j = 0; j < 40; ++j)
    CHECK((pb.col(j) - pa.col(perm[static_cast<std::size_t>(j)])).cwiseAbs().maxCoeff() <= 1e-10);
}

TEST_CASE("residual series") {
  std::mt19937_64 gen(9);
  VectorXd u1(24), u2(24), v1(30), v2(30);
  for (auto* vec : {&u1, &u2, &v1, &v2})
    for (auto& x : *vec) x = std::uniform_real_distribution<double>(-1.0, 1.0)(gen);
  const MatrixXd rank2 = 10.0 * u1 * v1.transpose() + 3.0 * u2 * v2.transpose();

  SUBCASE("full rank gives zero residuals") {
    const auto m = as_day_matrix(oracle::random_matrix(24, 30, gen));
    const auto r = residual_series(m, truncate(decompose(m.values), 24));
    for (double x : r.residuals) CHECK(x == 0.0);
  }
  SUBCASE("single perturbed cell") {
    MatrixXd a = rank2;
    a(5, 7) += 10.0;
    const auto m = as_day_matrix(a);
    const auto r = residual_series(m, truncate(decompose(a), 2));
    const auto abs = r.absolute();
    CHECK(*std::max_element(abs.begin(), abs.end()) <= 10.0 + 1e-9);
    double ss = 0.0;
    for (double x : r.residuals) ss += x * x;
    CHECK(ss <= 100.0 + 1e-9);
    // Hour order: cell (5, 7) sits at index 7 * 24 + 5.
    CHECK(abs[7 * 24 + 5] == *std::max_element(abs.begin(), abs.end()));
  }
  SUBCASE("shape mismatch") {
    const auto m = as_day_matrix(rank2);
    const auto other = truncate(decompose(oracle::random_matrix(24, 31, gen)), 2);
    try {
      residual_series(m, other);
      FAIL("expected ShapeMismatch");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::ShapeMismatch);
    }
  }
  SUBCASE("imputed cells stay flagged") {
    auto m = as_day_matrix(rank2);
    m.mask[3] = SlotFlag::imputed;
    const auto r = residual_series(m, truncate(decompose(m.values), 2));
    CHECK(r.imputed_count() == 1);
    CHECK(r.observed_absolute().size() == r.size() - 1);
  }
}

TEST_CASE("decompose rejects bad input") {
  MatrixXd a = MatrixXd::Ones(4, 5);
  a(2, 3) = std::numeric_limits<double>::quiet_NaN();
  try {
    decompose(a);
    FAIL("expected NonFiniteInput");
  } catch (const NonFiniteInputError& e) {
    CHECK(e.row() == 2);
    CHECK(e.col() == 3);
  }
  auto m = as_day_matrix(MatrixXd::Ones(24, 5));
  m.mask[0] = SlotFlag::missing;
  CHECK_THROWS_AS(decompose(m), Error);
}

TEST_CASE("spectrum report") {
  VectorXd u = VectorXd::LinSpaced(24, 1.0, 2.0);
  VectorXd v = VectorXd::LinSpaced(50, 1.0, 3.0);
  const auto d = decompose(MatrixXd(u * v.transpose()));
  const auto table = spectrum_report({{2016, d}});
  REQUIRE(table.rows.size() == 24);
  CHECK(table.rows[0].sigma_normalized == 1.0);
  for (std::size_t k = 1; k < 24; ++k) CHECK(table.rows[k].sigma_normalized <= 1e-12);

  std::mt19937_64 gen(1);
  const auto r = decompose(oracle::random_matrix(24, 50, gen));
  const auto twice = spectrum_report({{2015, r}, {2016, r}});
  for (std::size_t k = 0; k < 24; ++k) {
    CHECK(twice.rows[k].sigma == twice.rows[k + 24].sigma);
    CHECK(twice.rows[k].sigma_normalized == twice.rows[k + 24].sigma_normalized);
  }
}

TEST_CASE("leading profile of a double-peaked day has morning and evening maxima") {
  const auto spec = default_synth_spec(2016, 3.0, 42);
  const auto parts = generate_components(spec);
  const auto d = decompose(MatrixXd(parts.signal + parts.noise));
  const VectorXd u1 = d.u.col(0);
  Eigen::Index morning = 0, evening = 0;
  u1.segment(5, 7).maxCoeff(&morning);   // hours 5..11
  u1.segment(16, 7).maxCoeff(&evening);  // hours 16..22
  morning += 5;
  evening += 16;
  CHECK(u1(morning) > u1(13));
  CHECK(u1(evening) > u1(13));
  CHECK(u1(morning) > u1(3));
  CHECK((u1.array() > 0.0).all());
}
