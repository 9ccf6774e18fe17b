#include "oracles.hpp"
#include "support.hpp"
#include "yamabe/bubble.hpp"
#include "yamabe/energy.hpp"
#include "yamabe/errors.hpp"

#include <doctest.h>

#include <cmath>

using namespace yamabe;
using testing::kPi;

namespace {

const RadialProfile& line_profile() {
  static const RadialProfile p = shoot(1, 4.0);
  return p;
}

Point at(double x) { return Point::Constant(1, x); }

}  // namespace

TEST_SUITE("bubble") {

TEST_CASE("default cut-off radius") {
  CHECK(default_cutoff_radius(*testing::circle(64)) == doctest::Approx(kPi / 2));
  TorusManifold t({2 * kPi, 1.0}, {64, 16});
  CHECK(default_cutoff_radius(t) == doctest::Approx(0.25));
}

TEST_CASE("antipodal seed has disjoint signed parts and additive energy") {
  auto m = testing::circle(2048);
  EpsParams prm(0.1, 1, 3);
  const double r = default_cutoff_radius(*m);
  SeedPair s = seed_pair(at(kPi / 2), at(3 * kPi / 2), line_profile(), m, prm, r);
  CHECK(s.admissible_r0);
  CHECK(s.admissible);

  const Field bx = projected_bubble(at(kPi / 2), line_profile(), m, prm, r);
  const Field by = projected_bubble(at(3 * kPi / 2), line_profile(), m, prm, r);
  for (std::size_t i = 0; i < bx.size(); ++i) CHECK(bx[i] * by[i] == 0.0);
  CHECK(testing::max_abs(s.field - (bx - by)) == 0.0);

  const double J = energy_terms(s.field, prm).total;
  const double Jx = energy_terms(bx, prm).total, Jy = energy_terms(by, prm).total;
  CHECK(J == doctest::Approx(Jx + Jy).epsilon(1e-12));
  CHECK(J <= 2 * oracle::kCircleGroundEnergy * 1.03);
  CHECK(s.part_residuals[0] <= 1e-8);
  CHECK(s.part_residuals[1] <= 1e-8);
  CHECK(is_sign_changing(s.field));
}

TEST_CASE("swapping the centres negates the seed") {
  auto m = testing::torus2(48);
  EpsParams prm(0.2, 2, 2);
  const double r = 1.0;
  Point x(2), y(2);
  x << 1.0, 1.2;
  y << 4.0, 4.5;
  SeedPair a = seed_pair(x, y, shoot(2, 4.0), m, prm, r);
  SeedPair b = seed_pair(y, x, shoot(2, 4.0), m, prm, r);
  CHECK(testing::max_abs(a.field + b.field) == 0.0);
}

TEST_CASE("seed depends Lipschitz-continuously on its centres") {
  auto m = testing::circle(4096);
  EpsParams prm(0.1, 1, 3);
  const double r = 1.0;
  const Field base = seed_pair(at(1.0), at(4.0), line_profile(), m, prm, r).field;
  double prev_ratio = 0.0;
  for (double d : {1e-2, 5e-3, 2.5e-3}) {
    const Field moved = seed_pair(at(1.0 + d), at(4.0), line_profile(), m, prm, r).field;
    const double ratio = eps_norm(moved - base, prm) / d;
    CHECK(std::isfinite(ratio));
    CHECK(ratio <= 100.0 / prm.eps());
    if (prev_ratio > 0.0) CHECK(ratio <= 1.5 * prev_ratio);
    prev_ratio = ratio;
  }
}

TEST_CASE("overlapping supports and oversized cut-offs are rejected") {
  auto m = testing::circle(256);
  EpsParams prm(0.1, 1, 3);
  CHECK_THROWS_AS(seed_pair(at(1.0), at(2.0), line_profile(), m, prm, 1.0), OverlappingSupports);
  CHECK_THROWS_AS(seed_pair(at(0.0), at(kPi), line_profile(), m, prm, 3.5),
                  CutoffExceedsInjectivityRadius);
  // exactly 2 r_cut apart is allowed
  CHECK_NOTHROW(seed_pair(at(0.5), at(2.5), line_profile(), m, prm, 1.0));
}

TEST_CASE("admissibility flags follow both forms of the admissible set") {
  auto m = testing::torus2(64);
  EpsParams prm(0.1, 2, 2);
  Point x(2), y(2);
  x << 1.0, 1.0;
  y << 1.0, 1.0 + 0.5;  // 0.5 < 2 eps r_0 = 0.2 pi
  SeedPair s = seed_pair(x, y, shoot(2, 4.0), m, prm, 0.25);
  CHECK_FALSE(s.admissible_r0);
  CHECK_FALSE(s.admissible);
  y << 1.0, 1.0 + 0.7;  // 2 eps r_0 <= 0.7 < 2 eps R_0 = 0.2 pi sqrt 2
  s = seed_pair(x, y, shoot(2, 4.0), m, prm, 0.25);
  CHECK(s.admissible_r0);
  CHECK_FALSE(s.admissible);
  y << 1.0, 2.0;
  s = seed_pair(x, y, shoot(2, 4.0), m, prm, 0.25);
  CHECK(s.admissible);
}

}  // TEST_SUITE
