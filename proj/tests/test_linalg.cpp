#include "secrecy/linalg.hpp"
#include "secrecy/rng.hpp"

#include <doctest.h>

#include <cmath>

using namespace secrecy;

namespace {

Matrix mat2(double a, double b, double c, double d) {
  Matrix m(2, 2);
  m << a, b, c, d;
  return m;
}

}  // namespace

TEST_CASE("symmetrization and construction") {
  SymMatrix m(mat2(1.0, 2.0, 0.0, 3.0));
  CHECK(m(0, 1) == doctest::Approx(1.0));
  CHECK(m(1, 0) == doctest::Approx(1.0));
  CHECK_THROWS_AS(SymMatrix(Matrix::Zero(2, 3)), DimensionMismatch);
}

TEST_CASE("is_psd basics") {
  CHECK(is_psd(SymMatrix::identity(2), 1e-9));
  Vector d(2);
  d << 1.0, -0.5;
  CHECK_FALSE(is_psd(SymMatrix::diagonal(d), 1e-9));
  CHECK(is_psd(SymMatrix(mat2(5.0, 1.25, 1.25, 10.0)), 1e-9));
}

TEST_CASE("psd_leq order") {
  CHECK(psd_leq(SymMatrix::zero(2), SymMatrix::identity(2)));
  CHECK(psd_leq(SymMatrix::identity(2), SymMatrix::identity(2)));
  // b - a has eigenvalues {-1, 3}.
  CHECK_FALSE(psd_leq(SymMatrix(mat2(2, 0, 0, 0)), SymMatrix(mat2(1, 0, 0, 3))));
  CHECK_THROWS_AS(psd_leq(SymMatrix::zero(2), SymMatrix::zero(3)), DimensionMismatch);
}

TEST_CASE("logdet values and error") {
  CHECK(logdet(SymMatrix::identity(3)) == doctest::Approx(0.0).epsilon(1e-12));
  const double e = std::exp(1.0);
  Vector d(2);
  d << e, e;
  CHECK(logdet(SymMatrix::diagonal(d)) == doctest::Approx(2.0).epsilon(1e-12));
  // Hand-computed 2x2 determinant: 66.2 * 103.5 - 78.25^2 = 728.6375.
  CHECK(logdet(SymMatrix(mat2(66.2, 78.25, 78.25, 103.5))) ==
        doctest::Approx(std::log(728.6375)).epsilon(1e-12));
  try {
    logdet(SymMatrix(mat2(1, 0, 0, -2)));
    FAIL("expected throw");
  } catch (const NotPositiveDefinite& err) {
    CHECK(err.min_eigenvalue() == doctest::Approx(-2.0));
  }
}

TEST_CASE("sqrt_psd basics") {
  CHECK((sqrt_psd(SymMatrix::identity(2)).mat() - Matrix::Identity(2, 2)).norm() < 1e-12);
  Vector d(2);
  d << 4.0, 9.0;
  Vector expect(2);
  expect << 2.0, 3.0;
  CHECK((sqrt_psd(SymMatrix::diagonal(d)).mat() - Matrix(expect.asDiagonal())).norm() < 1e-12);
  CHECK(sqrt_psd(SymMatrix::zero(2)).mat().norm() == doctest::Approx(0.0));
  CHECK_THROWS(sqrt_psd(SymMatrix(mat2(1, 0, 0, -1))));
}

TEST_CASE("gen_eig examples") {
  auto pairs = gen_eig(SymMatrix::identity(2), SymMatrix::identity(2));
  CHECK(pairs[0].value == doctest::Approx(1.0));
  CHECK(pairs[1].value == doctest::Approx(1.0));

  Vector a(2), b(2);
  a << 2.0, 8.0;
  b << 1.0, 4.0;
  pairs = gen_eig(SymMatrix::diagonal(a), SymMatrix::diagonal(b));
  CHECK(pairs[0].value == doctest::Approx(2.0));
  CHECK(pairs[1].value == doctest::Approx(2.0));

  // Characteristic polynomial of [[3,1],[1,3]]: eigenvalues 4 and 2.
  pairs = gen_eig(SymMatrix(mat2(3, 1, 1, 3)), SymMatrix::identity(2));
  CHECK(pairs[0].value == doctest::Approx(4.0));
  CHECK(pairs[1].value == doctest::Approx(2.0));

  CHECK_THROWS_AS(gen_eig(SymMatrix::identity(2), SymMatrix::zero(2)), NotPositiveDefinite);
}

TEST_CASE("property: exp(logdet) matches eigenvalue product") {
  for (int trial = 0; trial < 25; ++trial) {
    auto rng = rng_stream(42, static_cast<std::uint64_t>(trial));
    Eigen::Index dim = 1 + static_cast<Eigen::Index>(trial % 6);
    SymMatrix m = random_spectrum(dim, 0.2, 4.0, rng);
    Eigen::SelfAdjointEigenSolver<Matrix> es(m.mat());
    double prod = es.eigenvalues().prod();
    CHECK(std::exp(logdet(m)) == doctest::Approx(prod).epsilon(1e-9));
  }
}

TEST_CASE("property: sqrt_psd squares back") {
  for (int trial = 0; trial < 25; ++trial) {
    auto rng = rng_stream(7, static_cast<std::uint64_t>(trial));
    Eigen::Index dim = 1 + static_cast<Eigen::Index>(trial % 8);
    SymMatrix m = random_spectrum(dim, 0.0, 3.0, rng);
    SymMatrix r = sqrt_psd(m);
    double rel = (r.mat() * r.mat() - m.mat()).norm() / std::max(1.0, m.mat().norm());
    CHECK(rel < 1e-10);
  }
}

TEST_CASE("property: psd_leq is a partial order") {
  for (int trial = 0; trial < 20; ++trial) {
    auto rng = rng_stream(11, static_cast<std::uint64_t>(trial));
    Eigen::Index dim = 2 + static_cast<Eigen::Index>(trial % 3);
    SymMatrix a = random_spectrum(dim, 0.0, 2.0, rng);
    SymMatrix gap = random_spectrum(dim, 0.0, 1.0, rng);
    SymMatrix b(a.mat() + gap.mat());
    CHECK(psd_leq(a, a));  // reflexive
    CHECK(psd_leq(a, b));
    if (psd_leq(b, a)) {
      CHECK((a.mat() - b.mat()).norm() <= kPsdTol * static_cast<double>(dim));
    }
  }
}

TEST_CASE("property: gen_eig residuals") {
  for (int trial = 0; trial < 20; ++trial) {
    auto rng = rng_stream(13, static_cast<std::uint64_t>(trial));
    Eigen::Index dim = 2 + static_cast<Eigen::Index>(trial % 4);
    SymMatrix a = random_spectrum(dim, -2.0, 2.0, rng);
    SymMatrix b = random_spectrum(dim, 0.3, 3.0, rng);
    auto pairs = gen_eig(a, b);
    for (const auto& p : pairs) {
      double resid = (a.mat() * p.vector - p.value * b.mat() * p.vector).norm();
      CHECK(resid <= 1e-8 * std::max(1.0, a.mat().norm()));
    }
    for (std::size_t i = 0; i + 1 < pairs.size(); ++i) {
      CHECK(pairs[i].value >= pairs[i + 1].value);  // descending
    }
  }
}
