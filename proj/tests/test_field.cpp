#include "support.hpp"
#include "yamabe/elliptic.hpp"
#include "yamabe/errors.hpp"
#include "yamabe/field.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace yamabe;
using testing::kPi;

TEST_SUITE("field") {

TEST_CASE("derived exponents and coercivity constants") {
  EpsParams c(0.1, 1, 3);
  CHECK(c.p() == doctest::Approx(4.0));
  CHECK(c.a() == doctest::Approx(6.0));
  CHECK(c.coefficient() == 1.0);
  CHECK(c.c_lo() == 1.0);
  CHECK(c.c_hi() == 1.0);
  CHECK(c.scale() == doctest::Approx(10.0));
  EpsParams t(0.1, 2, 2);
  CHECK(t.p() == doctest::Approx(4.0));
  EpsParams s(0.1, 3, 1);
  CHECK(s.p() == doctest::Approx(4.0));
  EpsParams curved(0.5, 1, 3, 6.0);
  CHECK(curved.coefficient() == doctest::Approx(1.25));
  CHECK(curved.c_lo() == 1.0);
  CHECK(curved.c_hi() == doctest::Approx(std::sqrt(1.25)));
  CHECK_THROWS_AS(EpsParams(0.5, 1, 3, -30.0), CoercivityViolated);
  CHECK_THROWS_AS(EpsParams(0.5, 1, 1), InvalidParameter);  // n + m = 2 has no exponent
  CHECK_THROWS_AS(EpsParams(-0.1, 1, 3), InvalidParameter);
  CHECK_THROWS_AS(c.check_manifold(*testing::torus2(16)), DimensionMismatch);
}

TEST_CASE("bilinear form on a Fourier mode and a constant") {
  auto m = testing::circle(2048);
  EpsParams one(1.0, 1, 3);
  Field c = testing::from_function(m, [](const Point& x) { return std::cos(x[0]); });
  const double h = m->spacing(0);
  const double symbol = 4 * std::sin(h / 2) * std::sin(h / 2) / (h * h);
  // exact discrete value pi * (symbol + 1); the continuum value is 2 pi
  CHECK(bilinear(c, c, one) == doctest::Approx(kPi * (symbol + 1)).epsilon(1e-13));
  CHECK(bilinear(c, c, one) == doctest::Approx(2 * kPi).epsilon(1e-6));
  Field ones = Field::constant(m, 1.0);
  CHECK(bilinear(ones, ones, one, FormMode::plain) == doctest::Approx(2 * kPi).epsilon(1e-14));
}

TEST_CASE("bilinear form is symmetric bit for bit and matches the operator pairing") {
  std::mt19937_64 rng(3);
  for (auto m : {testing::circle(64), testing::torus2(24), testing::torus3(10)}) {
    EpsParams prm(0.3, m->dim(), 4 - m->dim() + 1);
    for (int i = 0; i < 10; ++i) {
      Field u = testing::random_field(m, rng), v = testing::random_field(m, rng);
      CHECK(bilinear(u, v, prm) == bilinear(v, u, prm));
      const double pair = l2_pairing(apply_operator(u, prm), v, prm);
      CHECK(bilinear(u, v, prm) == doctest::Approx(pair).epsilon(1e-12));
    }
  }
}

TEST_CASE("bilinear form is linear in each slot") {
  std::mt19937_64 rng(4);
  auto m = testing::torus2(20);
  EpsParams prm(0.25, 2, 2);
  for (int i = 0; i < 10; ++i) {
    Field u = testing::random_field(m, rng), v = testing::random_field(m, rng),
          w = testing::random_field(m, rng);
    const double a = 0.7, b = -1.9;
    const double lhs = bilinear(a * u + b * v, w, prm);
    const double rhs = a * bilinear(u, w, prm) + b * bilinear(v, w, prm);
    CHECK(lhs == doctest::Approx(rhs).epsilon(1e-12));
    CHECK(bilinear(w, a * u + b * v, prm) == doctest::Approx(rhs).epsilon(1e-12));
  }
}

TEST_CASE("coercivity sandwich between the plain and curved forms") {
  std::mt19937_64 rng(5);
  auto m = testing::circle(128);
  for (double sg : {0.0, 3.0}) {
    EpsParams prm(0.4, 1, 3, sg);
    for (int i = 0; i < 20; ++i) {
      Field u = testing::random_field(m, rng);
      const double L = std::sqrt(quadratic_form(u, prm));
      const double e = eps_norm(u, prm);
      CHECK(prm.c_lo() * e <= L * (1 + 1e-14));
      CHECK(L <= prm.c_hi() * e * (1 + 1e-14));
      if (sg == 0.0) CHECK(L == e);
    }
  }
}

TEST_CASE("L^q norms") {
  auto m = testing::circle(256);
  EpsParams one(1.0, 1, 3);
  CHECK(lp_norm(Field::constant(m, 1.0), 4.0, one) == doctest::Approx(std::pow(2 * kPi, 0.25)));
  CHECK(lp_norm(Field(m), 4.0, one) == 0.0);
  std::mt19937_64 rng(6);
  EpsParams prm(0.2, 1, 3);
  for (double lam : {-3.0, 0.5, 2.0}) {
    Field u = testing::random_field(m, rng);
    CHECK(lp_norm(lam * u, 4.0, prm) == doctest::Approx(std::abs(lam) * lp_norm(u, 4.0, prm)));
  }
  CHECK(lp_power(Field::constant(m, 2.0), 3.0, one) == doctest::Approx(8 * 2 * kPi));
  CHECK_THROWS_AS(lp_norm(Field::constant(m, 1.0), 0.5, one), InvalidParameter);
}

TEST_CASE("sign split and cone gaps") {
  auto m = testing::circle(128);
  EpsParams prm(0.5, 1, 3);
  std::mt19937_64 rng(7);
  Field pos = testing::from_function(m, [](const Point& x) { return 1.5 + std::sin(x[0]); });
  SignSplit s = sign_split(pos, prm);
  CHECK(testing::max_abs(s.minus) == 0.0);
  CHECK(s.gap_plus == 0.0);

  Field odd = testing::from_function(m, [](const Point& x) { return std::sin(x[0]); });
  SignSplit so = sign_split(odd, prm);
  CHECK(so.gap_plus == doctest::Approx(so.gap_minus).epsilon(1e-13));
  CHECK(testing::max_abs(so.plus - so.minus - odd) == 0.0);

  Field c = testing::from_function(m, [](const Point& x) { return std::cos(x[0]); });
  SignSplit sc = sign_split(c, prm);
  const double direct = bilinear(sc.minus, sc.minus, prm);
  const double via_operator = l2_pairing(apply_operator(sc.minus, prm), sc.minus, prm);
  CHECK(sc.gap_plus * sc.gap_plus == doctest::Approx(direct).epsilon(1e-13));
  CHECK(direct == doctest::Approx(via_operator).epsilon(1e-12));

  for (int i = 0; i < 50; ++i) {
    Field u = testing::random_field(m, rng);
    if (i % 2 == 0) u.values() = u.values().cwiseAbs();
    const bool nonneg = u.values().minCoeff() >= 0.0;
    CHECK((sign_split(u, prm).gap_plus == 0.0) == nonneg);
  }
}

TEST_CASE("fields on different manifolds do not mix") {
  EpsParams prm(0.5, 1, 3);
  Field a(testing::circle(16)), b(testing::circle(32));
  CHECK_THROWS_AS(bilinear(a, b, prm), ManifoldMismatch);
  CHECK_THROWS_AS(a + b, ManifoldMismatch);
}

TEST_CASE("lattice translation moves values") {
  auto m = testing::torus2(16);
  std::mt19937_64 rng(8);
  Field u = testing::random_field(m, rng);
  Field t = u.translated({3, -2, 0});
  for (std::size_t i = 0; i < u.size(); ++i) CHECK(t[m->shift_node(i, {3, -2, 0})] == u[i]);
}

}  // TEST_SUITE
