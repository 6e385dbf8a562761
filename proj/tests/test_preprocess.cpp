#include "cpdp/error.hpp"
#include "cpdp/preprocess.hpp"
#include "doctest.h"

#include <cmath>
#include <random>

using namespace cpdp;

TEST_CASE("log_filter") {
  const double e = std::exp(1.0);
  Matrix m(2, 2);
  m << 0.0, e - 1.0, e * e - 1.0, 0.0;
  const Matrix out = log_filter(m);
  CHECK(out(0, 0) == 0.0);
  CHECK(out(0, 1) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(out(1, 0) == doctest::Approx(2.0).epsilon(1e-14));
  CHECK(out(1, 1) == 0.0);

  Matrix neg(1, 2);
  neg << 1.0, -0.5;
  CHECK_THROWS_WITH_AS(log_filter(neg), "log filter undefined for negative values", DataError);
}

TEST_CASE("log_filter is monotone per cell") {
  std::mt19937 rng(3);
  std::uniform_real_distribution<double> u(0.0, 1000.0);
  for (int i = 0; i < 500; ++i) {
    Matrix m(1, 2);
    m << u(rng), u(rng);
    const Matrix out = log_filter(m);
    CHECK((m(0, 0) < m(0, 1)) == (out(0, 0) < out(0, 1)));
  }
}

TEST_CASE("zscore") {
  SUBCASE("column 1,2,3") {
    Matrix m(3, 1);
    m << 1, 2, 3;
    const auto z = zscore(m);
    CHECK(z.matrix(0, 0) == doctest::Approx(-1.0));
    CHECK(z.matrix(1, 0) == doctest::Approx(0.0));
    CHECK(z.matrix(2, 0) == doctest::Approx(1.0));
    CHECK(z.stats.mean(0) == doctest::Approx(2.0));
    CHECK(z.stats.sd(0) == doctest::Approx(1.0));
  }
  SUBCASE("constant column") {
    Matrix m = Matrix::Constant(4, 1, 5.0);
    const auto z = zscore(m);
    CHECK(z.matrix.isZero(0.0));
    CHECK(z.stats.sd(0) == 0.0);
  }
  SUBCASE("already standardized") {
    Matrix m(3, 1);
    m << -1, 0, 1;
    CHECK(zscore(m).matrix.isApprox(m, 1e-12));
  }
  SUBCASE("too few rows") {
    CHECK_THROWS_WITH_AS(zscore(Matrix::Ones(1, 3)), "insufficient rows for normalization", DataError);
  }
}

TEST_CASE("property: zscore idempotence and affine invariance") {
  std::mt19937_64 rng(2024);
  std::normal_distribution<double> g(3.0, 7.0);
  std::uniform_real_distribution<double> ua(0.01, 50.0);
  std::uniform_real_distribution<double> ub(-100.0, 100.0);
  for (int trial = 0; trial < 200; ++trial) {
    const Eigen::Index rows = 2 + static_cast<Eigen::Index>(rng() % 40);
    Matrix m(rows, 3);
    for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = g(rng);
    const Matrix z = zscore(m).matrix;
    CHECK((zscore(z).matrix - z).cwiseAbs().maxCoeff() < 1e-9);
    for (Eigen::Index j = 0; j < 3; ++j) {
      CHECK(std::abs(z.col(j).mean()) < 1e-9);
    }
    const double a = ua(rng);
    const double b = ub(rng);
    const Matrix shifted = (a * m.array() + b).matrix();
    CHECK((zscore(shifted).matrix - z).cwiseAbs().maxCoeff() < 1e-9);
  }
}

TEST_CASE("preprocess applies log filter before z-score") {
  Matrix m(3, 1);
  m << 0, std::exp(1.0) - 1.0, std::exp(2.0) - 1.0;
  const Matrix out = preprocess(m, {.log_filter = true, .zscore = true});
  CHECK(out(0, 0) == doctest::Approx(-1.0));
  CHECK(out(2, 0) == doctest::Approx(1.0));
  CHECK(preprocess(m, {.log_filter = false, .zscore = false}) == m);
}
