#include "secrecy/wiretap.hpp"

#include "secrecy/rng.hpp"
#include "test_support.hpp"

#include <doctest.h>

#include <cmath>

using namespace secrecy;

namespace {

OptimizerConfig fast_cfg() {
  OptimizerConfig cfg;
  cfg.n_starts = 4;
  cfg.max_iters = 3000;
  return cfg;
}

bool vertices_close(const RegionPolygon& a, const RegionPolygon& b, double tol) {
  if (a.vertices.size() != b.vertices.size()) return false;
  for (std::size_t i = 0; i < a.vertices.size(); ++i) {
    if (std::abs(a.vertices[i][0] - b.vertices[i][0]) > tol) return false;
    if (std::abs(a.vertices[i][1] - b.vertices[i][1]) > tol) return false;
  }
  return true;
}

}  // namespace

TEST_CASE("capacity examples") {
  CHECK(capacity(Matrix::Zero(2, 2), instance_s()) == doctest::Approx(0.0));
  CHECK(capacity(instance_hr(), instance_s()) ==
        doctest::Approx(0.5 * std::log(728.6375)).epsilon(1e-12));
  CHECK(capacity(instance_hr(), SymMatrix::zero(2)) == doctest::Approx(0.0));
  CHECK_THROWS_AS(capacity(Matrix::Zero(2, 3), instance_s()), DimensionMismatch);
}

TEST_CASE("secrecy capacity degenerate channels") {
  SymMatrix s = instance_s();
  SUBCASE("no eavesdropper: full power is optimal") {
    ChannelPair ch(instance_hr(), Matrix::Zero(2, 2));
    auto r = secrecy_capacity(ch, s, fast_cfg());
    CHECK(r.value == doctest::Approx(capacity(instance_hr(), s)).epsilon(1e-9));
    CHECK((r.b_star.mat() - s.mat()).norm() < 1e-6);
  }
  SUBCASE("identical channels: zero secrecy") {
    ChannelPair ch(instance_hr(), instance_hr());
    auto r = secrecy_capacity(ch, s, fast_cfg());
    CHECK(r.value == doctest::Approx(0.0));
    CHECK(r.b_star.mat().norm() == doctest::Approx(0.0));
  }
  SUBCASE("zero power") {
    ChannelPair ch(instance_hr(), instance_he());
    auto r = secrecy_capacity(ch, SymMatrix::zero(2), fast_cfg());
    CHECK(r.value == 0.0);
  }
}

TEST_CASE("secrecy capacity self-consistency at b_star") {
  ChannelPair ch(instance_hr(), instance_he());
  auto r = secrecy_capacity(ch, instance_s(), fast_cfg());
  CHECK(r.value > 0.0);
  CHECK(r.value == doctest::Approx(secrecy_objective(ch, r.b_star)).epsilon(1e-6));
  CHECK(is_psd(r.b_star, 1e-8));
  CHECK(psd_leq(r.b_star, instance_s(), 1e-8));
}

TEST_CASE("objective gradient matches finite differences") {
  ChannelPair ch(instance_hr(), instance_he());
  for (int trial = 0; trial < 10; ++trial) {
    auto rng = rng_stream(3, static_cast<std::uint64_t>(trial));
    SymMatrix b = random_spectrum(2, 0.1, 2.0, rng);
    Matrix g = secrecy_objective_gradient(ch, b);
    SymMatrix dir = random_spectrum(2, -1.0, 1.0, rng);
    const double h = 1e-5;
    double fp = secrecy_objective(ch, SymMatrix(b.mat() + h * dir.mat()));
    double fm = secrecy_objective(ch, SymMatrix(b.mat() - h * dir.mat()));
    double fd = (fp - fm) / (2.0 * h);
    double an = (g.array() * dir.mat().array()).sum();
    CHECK(std::abs(fd - an) <= 1e-4 * std::max(1.0, std::abs(an)));
  }
}

TEST_CASE("monotonicity in the power constraint") {
  ChannelPair ch(instance_hr(), instance_he());
  for (int trial = 0; trial < 6; ++trial) {
    auto rng = rng_stream(21, static_cast<std::uint64_t>(trial));
    SymMatrix s1 = random_spectrum(2, 0.1, 2.0, rng);
    SymMatrix extra = random_spectrum(2, 0.0, 1.5, rng);
    SymMatrix s2(s1.mat() + extra.mat());
    CHECK(capacity(ch.h_r, s1) <= capacity(ch.h_r, s2) + 1e-12);
    double cs1 = secrecy_capacity(ch, s1, fast_cfg()).value;
    double cs2 = secrecy_capacity(ch, s2, fast_cfg()).value;
    CHECK(cs1 <= cs2 + 1e-6);
    CHECK(cs1 <= capacity(ch.h_r, s1) + 1e-9);
  }
}

TEST_CASE("rotation invariance of the receiver channel") {
  auto rng = rng_stream(33, 0);
  Matrix q = haar_orthogonal(2, rng);
  SymMatrix s = instance_s();
  CHECK(capacity(q * instance_hr(), s) == doctest::Approx(capacity(instance_hr(), s)).epsilon(1e-10));
  ChannelPair ch(instance_hr(), instance_he());
  ChannelPair chq(q * instance_hr(), instance_he());
  double a = secrecy_capacity(ch, s, fast_cfg()).value;
  double b = secrecy_capacity(chq, s, fast_cfg()).value;
  CHECK(std::abs(a - b) < 1e-8);
}

TEST_CASE("region shapes for degenerate channels") {
  SymMatrix s = instance_s();
  auto pc_matrix = PowerConstraint::matrix_s(s);

  SUBCASE("no eavesdropper") {
    ChannelPair ch(instance_hr(), Matrix::Zero(2, 2));
    double c = capacity(instance_hr(), s);
    auto ce = ce_region(ch, pc_matrix, fast_cfg());
    REQUIRE(ce.vertices.size() == 3);  // (0,0), (C,0), (C,C)
    CHECK(ce.vertices[1][0] == doctest::Approx(c));
    CHECK(ce.vertices[2][1] == doctest::Approx(c));
    auto pc = pc_region(ch, pc_matrix, fast_cfg());
    REQUIRE(pc.vertices.size() == 3);  // triangle (0,0), (C,0), (0,C)
    CHECK(pc.vertices[2][1] == doctest::Approx(c));
  }
  SUBCASE("identical channels collapse to a segment") {
    ChannelPair ch(instance_hr(), instance_hr());
    auto ce = ce_region(ch, pc_matrix, fast_cfg());
    REQUIRE(ce.vertices.size() == 2);
    CHECK(ce.vertices[1][0] == doctest::Approx(capacity(instance_hr(), s)));
    auto pc = pc_region(ch, pc_matrix, fast_cfg());
    CHECK(pc.vertices.size() == 2);
  }
}

TEST_CASE("shear map between the two region forms") {
  SymMatrix s = instance_s();
  auto pcm = PowerConstraint::matrix_s(s);

  SUBCASE("paper instance, vertex for vertex") {
    ChannelPair ch(instance_hr(), instance_he());
    auto pc = pc_region(ch, pcm, fast_cfg());
    auto ce = ce_region(ch, pcm, fast_cfg());
    CHECK(vertices_close(to_rate_equivocation(pc), ce, 1e-9));
  }
  SUBCASE("degenerate: triangle shears to the full-secrecy region") {
    ChannelPair ch(instance_hr(), Matrix::Zero(2, 2));
    auto pc = pc_region(ch, pcm, fast_cfg());
    auto ce = ce_region(ch, pcm, fast_cfg());
    CHECK(vertices_close(to_rate_equivocation(pc), ce, 1e-9));
  }
  SUBCASE("degenerate: segment is a fixed point") {
    RegionPolygon seg;
    seg.vertices = {{0.0, 0.0}, {1.5, 0.0}};
    auto mapped = to_rate_equivocation(seg);
    CHECK(vertices_close(mapped, seg, 1e-12));
  }
  SUBCASE("random instances") {
    for (int trial = 0; trial < 5; ++trial) {
      auto rng = rng_stream(55, static_cast<std::uint64_t>(trial));
      std::normal_distribution<double> gauss(0.0, 1.0);
      Matrix hr(2, 2), he(2, 2);
      for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) {
          hr(i, j) = gauss(rng);
          he(i, j) = gauss(rng);
        }
      SymMatrix sr = random_spectrum(2, 0.2, 3.0, rng);
      ChannelPair ch(hr, he);
      auto pcs = PowerConstraint::matrix_s(sr);
      auto pc = pc_region(ch, pcs, fast_cfg());
      auto ce = ce_region(ch, pcs, fast_cfg());
      CHECK(vertices_close(to_rate_equivocation(pc), ce, 1e-9));
    }
  }
}

TEST_CASE("corner point carries both maximum rates") {
  ChannelPair ch(instance_hr(), instance_he());
  SymMatrix s = instance_s();
  double c = capacity(instance_hr(), s);
  double cs = secrecy_capacity(ch, s, fast_cfg()).value;
  auto pc = pc_region(ch, PowerConstraint::matrix_s(s), fast_cfg());
  bool found = false;
  for (const auto& v : pc.vertices) {
    if (std::abs(v[1] - cs) < 1e-9 && std::abs(v[0] + v[1] - c) < 1e-9) found = true;
  }
  CHECK(found);
}

TEST_CASE("trace sweep basics") {
  SUBCASE("zero budget") {
    ChannelPair ch(instance_hr(), instance_he());
    auto entries = trace_sweep(ch, 0.0, default_sweep_weights(5), fast_cfg());
    for (const auto& e : entries) {
      CHECK(e.c == 0.0);
      CHECK(e.cs == 0.0);
      CHECK(e.s.mat().norm() == 0.0);
    }
  }
  SUBCASE("scalar channel closed form") {
    Matrix hr(1, 1), he(1, 1);
    hr << 2.0;
    he << 1.0;
    ChannelPair ch(hr, he);
    const double p = 1.7;
    auto entries = trace_sweep(ch, p, {{0.0, 1.0}}, fast_cfg());
    double expect = 0.5 * std::log((1.0 + 4.0 * p) / (1.0 + 1.0 * p));
    CHECK(entries[0].cs == doctest::Approx(expect).epsilon(1e-5));
  }
}

TEST_CASE("default sweep weights cover the simplex") {
  auto w = default_sweep_weights();
  CHECK(w.size() == 33);
  CHECK(w.front()[0] == doctest::Approx(1.0));
  CHECK(w.back()[1] == doctest::Approx(1.0));
}
