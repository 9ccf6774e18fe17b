#include "oracles.hpp"
#include "support.hpp"
#include "yamabe/bubble.hpp"
#include "yamabe/elliptic.hpp"
#include "yamabe/energy.hpp"
#include "yamabe/errors.hpp"
#include "yamabe/flow.hpp"

#include <doctest.h>

#include <cfloat>
#include <cmath>
#include <random>

using namespace yamabe;
using testing::kPi;

namespace {

constexpr double kEps = 0.1;
constexpr double kDelta = 1e-12;

struct Solved {
  ManifoldPtr m;
  Field positive;
  Field nodal;
  FlowTrace positive_trace;
  FlowTrace nodal_trace;
  double alpha = 0.0;
  double m_eps = 0.0;
};

// Projected descent followed by a plain polish, as the experiment driver does.
FlowResult descend(const Field& u0, const EpsParams& prm, double alpha) {
  FlowConfig fc;
  fc.mode = FlowMode::nehari_projected;
  fc.alpha = alpha;
  fc.stop_delta = kDelta;
  FlowResult a = flow_run(u0, fc, prm);
  REQUIRE(a.trace.outcome == FlowOutcome::converged);
  fc.mode = FlowMode::plain;
  FlowResult b = flow_run(a.field, fc, prm);
  b.trace.max_gap_plus = std::max(a.trace.max_gap_plus, b.trace.max_gap_plus);
  b.trace.max_gap_minus = std::max(a.trace.max_gap_minus, b.trace.max_gap_minus);
  b.trace.samples.insert(b.trace.samples.begin(), a.trace.samples.begin(), a.trace.samples.end());
  return b;
}

const Solved& solved() {
  static const Solved s = [] {
    Solved out;
    out.m = testing::circle(1024);
    EpsParams prm(kEps, 1, 3);
    const RadialProfile U = shoot(1, 4.0);
    const double r = default_cutoff_radius(*out.m);
    FlowResult pos =
        descend(projected_bubble(out.m->node_point(512), U, out.m, prm, r), prm, 0.0);
    out.positive = pos.field;
    out.positive_trace = pos.trace;
    const GroundConstants g = constants(pos.field, prm);
    out.alpha = g.alpha;
    out.m_eps = g.m_eps;
    Point x = Point::Constant(1, kPi / 2), y = Point::Constant(1, 3 * kPi / 2);
    FlowResult nod = descend(seed_pair(x, y, U, out.m, prm, r).field, prm, out.alpha);
    out.nodal = nod.field;
    out.nodal_trace = nod.trace;
    return out;
  }();
  return s;
}

double roundoff_floor(const EnergyBreakdown& e) {
  return 8.0 * DBL_EPSILON * std::max(std::abs(e.quadratic), std::abs(e.potential));
}

}  // namespace

TEST_SUITE("flow") {

TEST_CASE("one step: zero, full step and fixed point") {
  auto m = testing::circle(128);
  EpsParams prm(0.3, 1, 3);
  CHECK(testing::max_abs(flow_step(Field(m), 0.5, prm)) == 0.0);
  std::mt19937_64 rng(41);
  Field u = testing::random_field(m, rng);
  auto [k, rep] = K_eps(u, prm);
  CHECK(testing::max_abs(flow_step(u, 1.0, prm) - k) == 0.0);
  Field one = Field::constant(m, 1.0);  // solves u = K(u)
  CHECK(testing::max_abs(flow_step(one, 0.5, prm, 1e-13) - one) <= 1e-12);
}

TEST_CASE("flow configuration and enum names") {
  FlowConfig fc;
  CHECK_NOTHROW(fc.validate());
  fc.step = 0.0;
  CHECK_THROWS_AS(fc.validate(), InvalidParameter);
  fc = FlowConfig{};
  fc.backtrack = 1.0;
  CHECK_THROWS_AS(fc.validate(), InvalidParameter);
  fc = FlowConfig{};
  fc.record_every = 0;
  CHECK_THROWS_AS(fc.validate(), InvalidParameter);
  for (FlowOutcome o : {FlowOutcome::converged, FlowOutcome::entered_tube_plus,
                        FlowOutcome::entered_tube_minus, FlowOutcome::energy_nonpositive,
                        FlowOutcome::max_steps})
    CHECK(flow_outcome_from_string(to_string(o)) == o);
  for (RegionTag t : {RegionTag::tube_plus, RegionTag::tube_minus, RegionTag::sublevel_zero,
                      RegionTag::z_candidate})
    CHECK(region_from_string(to_string(t)) == t);
  CHECK(flow_mode_from_string("nehari_projected") == FlowMode::nehari_projected);
  CHECK_THROWS_AS(flow_outcome_from_string("sideways"), ConfigError);
}

TEST_CASE("antipodal seed flows to a nodal solution with twice the circle ground energy") {
  const Solved& s = solved();
  EpsParams prm(kEps, 1, 3);
  CHECK(s.nodal_trace.outcome == FlowOutcome::converged);
  const EnergyBreakdown e = j_eps(s.nodal, prm, 1e-13);
  CHECK(e.total == doctest::Approx(2 * oracle::kCircleGroundEnergy).epsilon(0.03));
  CHECK(e.grad_norm <= std::sqrt(kDelta) * 1.01);
  CHECK(is_sign_changing(s.nodal));
  CHECK(in_nodal_set(s.nodal, prm));
  CHECK(classify_region(s.nodal, s.alpha, prm) == RegionTag::z_candidate);
}

TEST_CASE("positive seed flows to the ground state and stays in the positive tube") {
  const Solved& s = solved();
  EpsParams prm(kEps, 1, 3);
  CHECK(s.positive_trace.outcome == FlowOutcome::converged);
  CHECK(s.m_eps == doctest::Approx(oracle::kCircleGroundEnergy).epsilon(1e-3));
  CHECK(j_eps(s.positive, prm).total == doctest::Approx(s.m_eps).epsilon(1e-8));
  CHECK(s.positive.values().minCoeff() >= 0.0);
  CHECK(s.positive_trace.max_gap_plus <= s.alpha);
  for (const FlowSample& f : s.positive_trace.samples) CHECK(f.gap_plus <= s.alpha);
}

TEST_CASE("a small constant falls into the trivial solution or leaves through a tube") {
  const Solved& s = solved();
  EpsParams prm(kEps, 1, 3);
  FlowConfig fc;
  fc.alpha = s.alpha;
  FlowResult r = flow_run(Field::constant(s.m, 0.01), fc, prm);
  const FlowOutcome o = r.trace.outcome;
  const bool allowed = o == FlowOutcome::entered_tube_plus || o == FlowOutcome::entered_tube_minus ||
                       o == FlowOutcome::energy_nonpositive ||
                       (o == FlowOutcome::converged && !is_sign_changing(r.field));
  CHECK(allowed);
  CHECK(testing::max_abs(r.field) <= 0.01);
}

TEST_CASE("region classification") {
  auto m = testing::circle(256);
  EpsParams prm(0.2, 1, 3);
  Field pos = testing::from_function(m, [](const Point& x) { return 1.0 + 0.5 * std::sin(x[0]); });
  CHECK(classify_region(pos, 0.5, prm) == RegionTag::tube_plus);
  CHECK(classify_region(-pos, 0.5, prm) == RegionTag::tube_minus);
  Field wave = testing::from_function(m, [](const Point& x) { return std::sin(x[0]); });
  CHECK(classify_region(10.0 * wave, 0.1, prm) == RegionTag::sublevel_zero);
  CHECK(classify_region(0.5 * wave, 0.1, prm) == RegionTag::z_candidate);
  CHECK_THROWS_AS(classify_region(wave, 0.0, prm), InvalidParameter);
}

TEST_CASE("plain flow decreases the energy up to round-off") {
  auto m = testing::circle(512);
  EpsParams prm(0.15, 1, 3);
  std::mt19937_64 rng(42);
  for (int i = 0; i < 4; ++i) {
    Field u = 2.0 * testing::smooth_field(m, rng);
    FlowConfig fc;
    fc.max_steps = 300;
    fc.alpha = 0.3;  // stop once the energy turns nonpositive
    FlowResult r = flow_run(u, fc, prm);
    const auto& sm = r.trace.samples;
    int increases = 0;
    for (std::size_t k = 1; k < sm.size(); ++k)
      increases += sm[k].energy.total > sm[k - 1].energy.total + roundoff_floor(sm[k - 1].energy);
    CHECK(increases == 0);
  }
}

TEST_CASE("nonnegative starts never leave the positive cone") {
  const Solved& s = solved();
  EpsParams prm(kEps, 1, 3);
  std::mt19937_64 rng(43);
  for (int i = 0; i < 6; ++i) {
    Field u = testing::smooth_field(s.m, rng);
    u.values() = 3.0 * u.values().cwiseAbs();
    FlowConfig fc;
    fc.alpha = s.alpha;
    fc.max_steps = 200;
    FlowResult r = flow_run(u, fc, prm);
    // decaying towards 0 may enter the negative tube as well; the sign stays
    CHECK(r.trace.max_gap_plus == 0.0);
    CHECK(r.field.values().minCoeff() >= 0.0);
  }
}

TEST_CASE("nodal solutions lie outside both tubes") {
  const Solved& s = solved();
  EpsParams prm(kEps, 1, 3);
  SignSplit sp = sign_split(s.nodal, prm);
  CHECK(sp.gap_plus > s.alpha);
  CHECK(sp.gap_minus > s.alpha);
  int hits = 0, violations = 0;
  for (const FlowSample& f : s.nodal_trace.samples) {
    if (f.sign_changing && f.part_residual_plus <= 1e-8 && f.part_residual_minus <= 1e-8) {
      ++hits;
      violations += f.gap_plus <= s.alpha || f.gap_minus <= s.alpha;
    }
  }
  CHECK(hits > 0);
  CHECK(violations == 0);
}

TEST_CASE("PDE residual in the dual norm matches the gradient norm") {
  const Solved& s = solved();
  EpsParams prm(kEps, 1, 3);
  for (const Field* u : {&s.positive, &s.nodal}) {
    // r = A u - f(u); ||r||_* = <A^{-1} r, r>^{1/2} = ||J'(u)||
    Field r = apply_operator(*u, prm) - nonlinearity(*u, prm.p());
    auto [z, rep] = solve_K(r, prm, 1e-13);
    const double dual = std::sqrt(std::max(0.0, l2_pairing(z, r, prm)));
    const double grad = j_eps(*u, prm, 1e-13).grad_norm;
    CHECK(dual <= 2.0 * std::sqrt(kDelta));
    CHECK(dual == doctest::Approx(grad).epsilon(1e-3));
  }
}

TEST_CASE("record_every thins the trace but keeps both ends") {
  auto m = testing::circle(256);
  EpsParams prm(0.2, 1, 3);
  std::mt19937_64 rng(44);
  Field u = 0.3 * testing::smooth_field(m, rng);
  FlowConfig fc;
  fc.max_steps = 25;
  fc.record_every = 10;
  FlowResult r = flow_run(u, fc, prm);
  REQUIRE(!r.trace.samples.empty());
  CHECK(r.trace.samples.front().step == 0);
  CHECK(r.trace.samples.back().step == r.trace.steps);
  for (std::size_t k = 1; k + 1 < r.trace.samples.size(); ++k)
    CHECK(r.trace.samples[k].step % 10 == 0);
}

}  // TEST_SUITE
