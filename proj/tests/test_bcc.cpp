#include "secrecy/bcc.hpp"

#include "secrecy/oracle.hpp"
#include "secrecy/rng.hpp"
#include "test_support.hpp"

#include <doctest.h>

#include <cmath>

using namespace secrecy;
using namespace secrecy::bcc;

namespace {

SolveOptions fast_opts() {
  SolveOptions o;
  o.opt.n_starts = 3;
  o.opt.max_iters = 2000;
  return o;
}

CanonicalChannel paper_cc() { return canonicalize(instance_hr(), instance_he(), instance_s()); }

Matrix random_invertible(std::mt19937_64& rng) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  while (true) {
    Matrix h(2, 2);
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) h(i, j) = gauss(rng);
    if (std::abs(h.determinant()) > 0.2) return h;
  }
}

CovarianceSplit random_feasible_split(const SymMatrix& s, std::mt19937_64& rng) {
  Matrix s12 = sqrt_psd(s).mat();
  while (true) {
    SymMatrix m0 = random_spectrum(s.dim(), 0.0, 1.0, rng);
    SymMatrix m1 = random_spectrum(s.dim(), 0.0, 1.0, rng);
    if (min_eigenvalue(SymMatrix(Matrix::Identity(s.dim(), s.dim()) - m0.mat() - m1.mat())) >=
        0.0) {
      return CovarianceSplit{SymMatrix(s12 * m0.mat() * s12), SymMatrix(s12 * m1.mat() * s12)};
    }
  }
}

}  // namespace

TEST_CASE("canonicalize basics") {
  SymMatrix s = SymMatrix::identity(2);
  auto cc = canonicalize(Matrix::Identity(2, 2), Matrix::Identity(2, 2), s);
  CHECK((cc.n1.mat() - Matrix::Identity(2, 2)).norm() < 1e-12);
  CHECK((cc.n2.mat() - Matrix::Identity(2, 2)).norm() < 1e-12);
  CHECK_FALSE(cc.perturbed_h1);

  Vector diag(2);
  diag << 2.0, 1.0;
  auto cc2 = canonicalize(Matrix(diag.asDiagonal()), Matrix::Identity(2, 2), s);
  CHECK(cc2.n1(0, 0) == doctest::Approx(0.25));
  CHECK(cc2.n1(1, 1) == doctest::Approx(1.0));

  Matrix singular = Matrix::Zero(2, 2);
  singular(0, 0) = 1.0;
  auto cc3 = canonicalize(singular, Matrix::Identity(2, 2), s, 1e-6);
  CHECK(cc3.perturbed_h1);
  CHECK(cc3.eps_applied == doctest::Approx(1e-6));

  CHECK_THROWS_AS(canonicalize(Matrix::Zero(3, 2), Matrix::Identity(2, 2), s),
                  DimensionMismatch);
}

TEST_CASE("direct and canonical rate bounds agree for invertible channels") {
  for (int trial = 0; trial < 10; ++trial) {
    auto rng = rng_stream(101, static_cast<std::uint64_t>(trial));
    Matrix h1 = random_invertible(rng);
    Matrix h2 = random_invertible(rng);
    SymMatrix s = random_spectrum(2, 0.3, 3.0, rng);
    auto cc = canonicalize(h1, h2, s);
    for (int k = 0; k < 10; ++k) {
      auto split = random_feasible_split(s, rng);
      auto direct = rate_bounds(h1, h2, s, split);
      auto canon = canonical_rate_bounds(cc, split);
      CHECK(std::abs(direct.r0 - canon.r0) < 1e-9);
      CHECK(std::abs(direct.r1 - canon.r1) < 1e-9);
      CHECK(std::abs(direct.r2 - canon.r2) < 1e-9);
    }
  }
}

TEST_CASE("rate bounds at the covariance extremes") {
  SymMatrix s = instance_s();
  Matrix h1 = instance_hr(), h2 = instance_he();

  SUBCASE("all power on the common message") {
    CovarianceSplit split{s, SymMatrix::zero(2)};
    auto t = rate_bounds(h1, h2, s, split);
    CHECK(t.r1 == 0.0);
    CHECK(t.r2 == 0.0);
    CHECK(t.r0 == doctest::Approx(std::min(capacity(h1, s), capacity(h2, s))).epsilon(1e-12));
  }
  SUBCASE("no common power, no first confidential power") {
    CovarianceSplit split{SymMatrix::zero(2), SymMatrix::zero(2)};
    auto t = rate_bounds(h1, h2, s, split);
    CHECK(t.r0 == 0.0);
    CHECK(t.r1 == 0.0);
    double raw2 = capacity(h2, s) - capacity(h1, s);
    CHECK(t.r2 == doctest::Approx(std::max(0.0, raw2)).epsilon(1e-12));
  }
  SUBCASE("infeasible split is rejected") {
    CovarianceSplit split{s, s};
    CHECK_THROWS(rate_bounds(h1, h2, s, split));
  }
}

TEST_CASE("canonical bounds degenerate cases") {
  SymMatrix s = instance_s();
  auto cc = paper_cc();

  SUBCASE("identical noises kill both confidential rates") {
    CanonicalChannel same = cc;
    same.n2 = same.n1;
    auto rng = rng_stream(7, 0);
    for (int k = 0; k < 5; ++k) {
      auto split = random_feasible_split(s, rng);
      auto t = canonical_rate_bounds(same, split);
      CHECK(t.r1 == 0.0);
      CHECK(t.r2 == 0.0);
    }
  }
  SUBCASE("b1 takes everything: second confidential rate dies") {
    CovarianceSplit split{SymMatrix::zero(2), s};
    auto t = canonical_rate_bounds(cc, split);
    CHECK(t.r2 == 0.0);
  }
}

TEST_CASE("objective values at zero covariances") {
  auto cc = paper_cc();
  auto rng = rng_stream(17, 3);
  auto split = random_feasible_split(cc.s, rng);
  CHECK(common_rate(cc, SymMatrix::zero(2)) == 0.0);
  CHECK(confidential_rate_1(cc, SymMatrix::zero(2)) == doctest::Approx(0.0));
  // At b0 = 0 the second objective equals the r2 bound when nonnegative.
  double f2 = confidential_rate_2(cc, SymMatrix::zero(2), split.b1);
  auto t = canonical_rate_bounds(cc, CovarianceSplit{SymMatrix::zero(2), split.b1});
  CHECK(t.r2 == doctest::Approx(std::max(0.0, f2)).epsilon(1e-12));
}

TEST_CASE("objective gradients match finite differences") {
  auto cc = paper_cc();
  auto rng = rng_stream(23, 1);
  for (int trial = 0; trial < 8; ++trial) {
    SymMatrix b0 = random_spectrum(2, 0.05, 1.0, rng);
    SymMatrix b1 = random_spectrum(2, 0.05, 1.0, rng);
    SymMatrix dir = random_spectrum(2, -1.0, 1.0, rng);
    const double h = 1e-5;

    double fd1 = (confidential_rate_1(cc, SymMatrix(b1.mat() + h * dir.mat())) -
                  confidential_rate_1(cc, SymMatrix(b1.mat() - h * dir.mat()))) /
                 (2 * h);
    double an1 = (confidential_rate_1_gradient(cc, b1).array() * dir.mat().array()).sum();
    CHECK(std::abs(fd1 - an1) <= 1e-4 * std::max(1.0, std::abs(an1)));

    double fd2 = (confidential_rate_2(cc, SymMatrix(b0.mat() + h * dir.mat()), b1) -
                  confidential_rate_2(cc, SymMatrix(b0.mat() - h * dir.mat()), b1)) /
                 (2 * h);
    double an2 = (confidential_rate_2_gradient_b0(cc, b0).array() * dir.mat().array()).sum();
    CHECK(std::abs(fd2 - an2) <= 1e-4 * std::max(1.0, std::abs(an2)));
  }
}

TEST_CASE("split projection lands in the feasible set") {
  auto rng = rng_stream(29, 0);
  SymMatrix s = instance_s();
  for (int trial = 0; trial < 10; ++trial) {
    SymMatrix a = random_spectrum(2, -2.0, 5.0, rng);
    SymMatrix b = random_spectrum(2, -2.0, 5.0, rng);
    auto proj = project_split(CovarianceSplit{a, b}, s);
    CHECK(min_eigenvalue(proj.b0) >= -1e-8);
    CHECK(min_eigenvalue(proj.b1) >= -1e-8);
    CHECK(min_eigenvalue(SymMatrix(s.mat() - proj.b0.mat() - proj.b1.mat())) >= -1e-8);
  }
}

TEST_CASE("weighted sum solve: reductions and extremes") {
  auto cc = paper_cc();
  const double r0max = common_rate_max(cc);

  SUBCASE("pure first-confidential weight reduces to a wiretap solve") {
    auto sol = weighted_sum_solve(cc, 1.0, 0.0, 0.0, fast_opts());
    // Whitened channel pair equivalent to the additive-noise wiretap channel.
    Matrix w1 = sqrt_psd(cc.n1).mat().inverse();
    Matrix w2 = sqrt_psd(cc.n2).mat().inverse();
    auto ref = secrecy_capacity(ChannelPair(w1, w2), cc.s);
    CHECK(std::abs(sol.value - ref.value) < 2e-3);
  }
  SUBCASE("zero weights give a feasible split with value zero") {
    double target = 0.4 * r0max;
    auto sol = weighted_sum_solve(cc, 0.0, 0.0, target, fast_opts());
    CHECK(sol.value == doctest::Approx(0.0));
    CHECK(common_rate(cc, sol.split.b0) >= target - 1e-6);
  }
  SUBCASE("saturating common rate forces full power on b0") {
    auto sol = weighted_sum_solve(cc, 1.0, 1.0, r0max, fast_opts());
    CHECK((sol.split.b0.mat() - cc.s.mat()).norm() < 1e-3);
    CHECK(std::abs(sol.value) < 1e-5);
  }
  SUBCASE("infeasible target throws") {
    CHECK_THROWS_AS(weighted_sum_solve(cc, 1.0, 0.0, r0max + 0.1, fast_opts()), InfeasibleError);
  }
}

TEST_CASE("both confidential bounds peak at a common covariance") {
  // At b0 = 0 the two objectives differ by a constant in b1, so one argmax
  // must serve both; verified through the solver outputs.
  auto cc = paper_cc();
  SolveOptions opts = fast_opts();
  opts.fix_b0 = true;
  opts.b0_fixed = SymMatrix::zero(2);
  auto max1 = weighted_sum_solve(cc, 1.0, 0.0, 0.0, opts);
  auto max2 = weighted_sum_solve(cc, 0.0, 1.0, 0.0, opts);
  double f2_at_b1dagger = confidential_rate_2(cc, SymMatrix::zero(2), max1.split.b1);
  CHECK(f2_at_b1dagger >= max2.value - 2e-3);
}

TEST_CASE("swapping the receivers mirrors the zero-common-rate region") {
  auto cc = paper_cc();
  CanonicalChannel swapped = cc;
  std::swap(swapped.n1, swapped.n2);
  SolveOptions opts = fast_opts();
  opts.fix_b0 = true;
  opts.b0_fixed = SymMatrix::zero(2);
  double max_f2 = weighted_sum_solve(cc, 0.0, 1.0, 0.0, opts).value;
  double max_f1_swapped = weighted_sum_solve(swapped, 1.0, 0.0, 0.0, opts).value;
  CHECK(std::abs(max_f2 - max_f1_swapped) < 2e-3);
}

TEST_CASE("full-remainder common power kills the second confidential rate") {
  auto cc = paper_cc();
  auto rng = rng_stream(31, 0);
  for (int trial = 0; trial < 8; ++trial) {
    SymMatrix m = random_spectrum(2, 0.0, 1.0, rng);
    Matrix s12 = sqrt_psd(cc.s).mat();
    SymMatrix b1(s12 * m.mat() * s12);
    SymMatrix b0(cc.s.mat() - b1.mat());
    CHECK(std::abs(confidential_rate_2(cc, b0, b1)) < 1e-12);
  }
}

TEST_CASE("optimal value is monotone in the common-rate target") {
  auto cc = paper_cc();
  const double r0max = common_rate_max(cc);
  double prev = std::numeric_limits<double>::infinity();
  for (double frac : {0.0, 0.35, 0.7, 1.0}) {
    auto sol = weighted_sum_solve(cc, 1.0, 0.7, frac * r0max, fast_opts());
    CHECK(sol.value <= prev + 1e-6);
    prev = sol.value;
  }
}

TEST_CASE("kkt certificate and enhancement on solver output") {
  auto cc = paper_cc();
  const double r0max = common_rate_max(cc);
  for (int trial = 0; trial < 3; ++trial) {
    auto rng = rng_stream(211, static_cast<std::uint64_t>(trial));
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    double l1 = 0.25 + unif(rng);
    double l2 = 0.25 + unif(rng);
    double r0 = (0.15 + 0.6 * unif(rng)) * r0max;
    SolveOptions opts = fast_opts();
    opts.opt.seed = 77 + static_cast<std::uint64_t>(trial);
    auto sol = weighted_sum_solve(cc, l1, l2, r0, opts);
    REQUIRE(sol.feasibility_violation <= 1e-6);
    auto cert = kkt_check(cc, sol.split, l1, l2, sol.beta1, sol.beta2, r0, 1e-4);
    INFO("trial ", trial, " l1=", l1, " l2=", l2, " r0=", r0);
    for (const auto& [name, value] : cert.residuals) {
      INFO(name, " = ", value);
      CHECK(value <= 1e-4);
    }
    CHECK(cert.pass);

    auto enh = enhance_noise(cc, cert, sol.split);
    CHECK(psd_leq(enh.n_tilde, cc.n1, 1e-7));
    CHECK(psd_leq(enh.n_tilde, cc.n2, 1e-7));
    for (const auto& [name, value] : enh.residuals) {
      INFO(name, " = ", value);
      CHECK(value <= 1e-6);
    }
  }
}

TEST_CASE("kkt structural cases") {
  auto cc = paper_cc();

  SUBCASE("interior split forces zero multipliers; mismatch becomes residual") {
    CovarianceSplit split{SymMatrix(0.2 * cc.s.mat()), SymMatrix(0.2 * cc.s.mat())};
    auto cert = kkt_check(cc, split, 1.0, 0.5, 0.0, 0.0, 0.0, 1e-4);
    CHECK(cert.m0.mat().norm() == doctest::Approx(0.0));
    CHECK(cert.m1.mat().norm() == doctest::Approx(0.0));
    CHECK(cert.m2.mat().norm() == doctest::Approx(0.0));
    CHECK_FALSE(cert.pass);  // a random interior point is not stationary
    CHECK(cert.residuals.at("stationarity_b1") > 1e-4);
  }
  SUBCASE("identical noises satisfy the b1 equation with matching multipliers") {
    CanonicalChannel same = cc;
    same.n2 = same.n1;
    auto rng = rng_stream(9, 9);
    auto split = random_feasible_split(cc.s, rng);
    auto cert = kkt_check(same, split, 0.7, 0.7, 0.0, 0.0, 0.0, 1e-4);
    CHECK(cert.residuals.at("stationarity_b1") < 1e-10);
  }
}

TEST_CASE("enhancement with zero multiplier returns the original noise") {
  auto cc = paper_cc();
  KktCertificate cert;
  cert.lambda1 = 1.0;
  cert.lambda2 = 0.5;
  cert.beta1 = cert.beta2 = 0.0;
  cert.m0 = cert.m1 = cert.m2 = SymMatrix::zero(2);
  cert.pass = true;
  CovarianceSplit split{SymMatrix::zero(2), SymMatrix(0.3 * cc.s.mat())};
  auto enh = enhance_noise(cc, cert, split);
  CHECK((enh.n_tilde.mat() - cc.n1.mat()).norm() < 1e-12);
  CHECK(enh.residuals.at("det_identity") < 1e-12);
}

TEST_CASE("region trace samples are reproduced by their stored splits") {
  TraceConfig grid;
  grid.r0_levels = 3;
  grid.lambda_dirs = 3;
  grid.opt.n_starts = 2;
  grid.opt.max_iters = 1500;
  auto surface = region_trace(instance_hr(), instance_he(), instance_s(), grid);
  REQUIRE(surface.samples.size() == 9);
  for (const auto& sample : surface.samples) {
    auto again = rate_bounds(instance_hr(), instance_he(), instance_s(), sample.split);
    CHECK(again.r0 == sample.rates.r0);
    CHECK(again.r1 == sample.rates.r1);
    CHECK(again.r2 == sample.rates.r2);
  }
  // Saturated common rate: the last level collapses to (R0max, 0, 0).
  auto cc = paper_cc();
  for (std::size_t i = surface.samples.size() - 3; i < surface.samples.size(); ++i) {
    CHECK(surface.samples[i].rates.r0 ==
          doctest::Approx(common_rate_max(cc)).epsilon(1e-4));
    CHECK(surface.samples[i].rates.r1 < 1e-4);
    CHECK(surface.samples[i].rates.r2 < 1e-4);
  }
}

TEST_CASE("precoder formula") {
  CHECK(precoding_matrix(SymMatrix::zero(2), instance_hr()).norm() == doctest::Approx(0.0));
  CHECK(precoding_matrix(instance_s(), Matrix::Zero(2, 2)).norm() == doctest::Approx(0.0));
  Matrix f = precoding_matrix(SymMatrix::identity(2), Matrix::Identity(2, 2));
  CHECK((f - 0.5 * Matrix::Identity(2, 2)).norm() < 1e-12);
}
