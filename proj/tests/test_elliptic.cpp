#include "support.hpp"
#include "yamabe/elliptic.hpp"
#include "yamabe/errors.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace yamabe;
using testing::kPi;

namespace {

// Symbol of -eps^2 Lap_h + c on the mode cos(k x) along one axis.
double symbol(double eps, double c, int k, double h) {
  const double s = std::sin(0.5 * k * h);
  return eps * eps * 4.0 * s * s / (h * h) + c;
}

}  // namespace

TEST_SUITE("elliptic") {

TEST_CASE("operator acts diagonally on lattice Fourier modes") {
  auto m = testing::circle(256);
  EpsParams prm(0.2, 1, 3, 2.0);
  const double h = m->spacing(0);
  for (int k : {1, 3, 17}) {
    Field c = testing::from_function(m, [k](const Point& x) { return std::cos(k * x[0]); });
    Field expected = symbol(0.2, prm.coefficient(), k, h) * c;
    CHECK(testing::max_abs(apply_operator(c, prm) - expected) <= 1e-10);
  }
  Field ones = Field::constant(m, 1.0);
  CHECK(testing::max_abs(laplacian(ones)) == 0.0);
}

TEST_CASE("operator is self-adjoint and positive definite in the L^2 pairing") {
  std::mt19937_64 rng(21);
  for (auto m : {testing::circle(96), testing::torus2(20), testing::torus3(8)}) {
    EpsParams prm(0.15, m->dim(), 5 - m->dim());
    for (int i = 0; i < 10; ++i) {
      Field u = testing::random_field(m, rng), v = testing::random_field(m, rng);
      const double uv = l2_pairing(apply_operator(u, prm), v, prm);
      const double vu = l2_pairing(u, apply_operator(v, prm), prm);
      CHECK(uv == doctest::Approx(vu).epsilon(1e-12));
      CHECK(l2_pairing(apply_operator(u, prm), u, prm) > 0.0);
    }
  }
}

TEST_CASE("solve recovers eigenfunctions and constants") {
  auto m = testing::circle(512);
  EpsParams prm(0.1, 1, 3);
  const double h = m->spacing(0);
  for (int k : {1, 5, 40}) {
    Field c = testing::from_function(m, [k](const Point& x) { return std::sin(k * x[0]); });
    auto [u, rep] = solve_K(c, prm, 1e-13);
    CHECK(rep.converged);
    CHECK(testing::max_abs(u - (1.0 / symbol(0.1, 1.0, k, h)) * c) <= 1e-10);
  }
  EpsParams curved(0.5, 1, 3, 6.0);
  auto [one, rep] = solve_K(Field::constant(m, 1.0), curved, 1e-13);
  CHECK(testing::max_abs(one - Field::constant(m, 1.0 / curved.coefficient())) <= 1e-12);
}

TEST_CASE("solve inverts the operator on smooth and rough data") {
  std::mt19937_64 rng(22);
  for (auto m : {testing::circle(300), testing::torus2(32), testing::torus3(12)}) {
    EpsParams prm(0.3, m->dim(), 5 - m->dim());
    for (int i = 0; i < 4; ++i) {
      Field phi = i % 2 ? testing::smooth_field(m, rng) : testing::random_field(m, rng);
      auto [u, rep] = solve_K(phi, prm, 1e-12);
      const Field back = apply_operator(u, prm);
      CHECK((back - phi).values().norm() <= 1e-11 * phi.values().norm());
      CHECK(rep.final_residual <= 1e-12);
    }
  }
}

TEST_CASE("nonnegative data give a nonnegative solution") {
  std::mt19937_64 rng(23);
  auto m = testing::torus2(40);
  EpsParams prm(0.05, 2, 2);
  for (int i = 0; i < 5; ++i) {
    Field phi = testing::random_field(m, rng);
    phi.values() = phi.values().cwiseAbs();
    auto [u, rep] = solve_K(phi, prm, 1e-13);
    CHECK(u.values().minCoeff() >= -1e-12 * u.values().maxCoeff());
  }
}

TEST_CASE("solver report and failure modes") {
  auto m = testing::circle(128);
  EpsParams prm(0.1, 1, 3);
  auto [z, rz] = solve_K(Field(m), prm);
  CHECK(rz.converged);
  CHECK(rz.iterations == 0);
  CHECK(testing::max_abs(z) == 0.0);

  std::mt19937_64 rng(24);
  Field phi = testing::random_field(m, rng);
  auto [u, rep] = solve_K(phi, prm, 1e-10);
  CHECK(rep.converged);
  CHECK(rep.iterations > 0);
  CHECK(rep.final_residual <= 1e-10);

  // a warm start at the solution needs no further iterations
  auto [u2, rep2] = solve_K(phi, prm, 1e-10, &u);
  CHECK(rep2.iterations == 0);

  CHECK_THROWS_AS(solve_K(phi, prm, 0.0), InvalidParameter);
  CHECK_THROWS_AS(solve_K(phi, prm, 1e-14, nullptr, 1), NoConvergence);
  CHECK_THROWS_AS(solve_K(Field(testing::torus2(8)), prm), DimensionMismatch);
}

TEST_CASE("K_eps solves against the pointwise nonlinearity") {
  std::mt19937_64 rng(25);
  auto m = testing::circle(200);
  EpsParams prm(0.2, 1, 3);
  Field u = testing::random_field(m, rng);
  auto [k, rep] = K_eps(u, prm, 1e-12);
  Field f = u;
  for (std::size_t i = 0; i < f.size(); ++i) f[i] = u[i] * u[i] * u[i];
  CHECK(testing::max_abs(apply_operator(k, prm) - f) <= 1e-10);
}

}  // TEST_SUITE
