#include "yamabe/flow.hpp"

#include "yamabe/errors.hpp"

#include <cmath>
#include <limits>

namespace yamabe {

std::string to_string(FlowMode m) {
  return m == FlowMode::plain ? "plain" : "nehari_projected";
}

std::string to_string(RegionTag t) {
  switch (t) {
    case RegionTag::tube_plus: return "tube_plus";
    case RegionTag::tube_minus: return "tube_minus";
    case RegionTag::sublevel_zero: return "sublevel_zero";
    case RegionTag::z_candidate: return "z_candidate";
  }
  return "z_candidate";
}

std::string to_string(FlowOutcome o) {
  switch (o) {
    case FlowOutcome::converged: return "converged";
    case FlowOutcome::entered_tube_plus: return "entered_tube_plus";
    case FlowOutcome::entered_tube_minus: return "entered_tube_minus";
    case FlowOutcome::energy_nonpositive: return "energy_nonpositive";
    case FlowOutcome::max_steps: return "max_steps";
  }
  return "max_steps";
}

FlowMode flow_mode_from_string(const std::string& s) {
  if (s == "plain") return FlowMode::plain;
  if (s == "nehari_projected") return FlowMode::nehari_projected;
  throw ConfigError("unknown flow mode '" + s + "'");
}

RegionTag region_from_string(const std::string& s) {
  for (RegionTag t : {RegionTag::tube_plus, RegionTag::tube_minus, RegionTag::sublevel_zero,
                      RegionTag::z_candidate})
    if (to_string(t) == s) return t;
  throw ConfigError("unknown region tag '" + s + "'");
}

FlowOutcome flow_outcome_from_string(const std::string& s) {
  for (FlowOutcome o : {FlowOutcome::converged, FlowOutcome::entered_tube_plus,
                        FlowOutcome::entered_tube_minus, FlowOutcome::energy_nonpositive,
                        FlowOutcome::max_steps})
    if (to_string(o) == s) return o;
  throw ConfigError("unknown flow outcome '" + s + "'");
}

void FlowConfig::validate() const {
  if (!(step > 0.0 && step <= 1.0)) throw InvalidParameter("flow step must lie in (0, 1]");
  if (!(backtrack > 0.0 && backtrack < 1.0))
    throw InvalidParameter("backtracking factor must lie in (0, 1)");
  if (!(stop_delta > 0.0)) throw InvalidParameter("stop_delta must be positive");
  if (max_steps < 0) throw InvalidParameter("max_steps must be nonnegative");
  if (!(alpha >= 0.0)) throw InvalidParameter("alpha must be nonnegative");
  if (!(solver_tol > 0.0)) throw InvalidParameter("solver_tol must be positive");
  if (record_every < 1) throw InvalidParameter("record_every must be >= 1");
}

Field flow_step(const Field& u, double h, const EpsParams& params, double tol) {
  if (!(h > 0.0 && h <= 1.0)) throw InvalidParameter("flow step must lie in (0, 1]");
  Field k = K_eps(u, params, tol).first;
  if (h == 1.0) return k;
  Field out = u;
  out.values() = (1.0 - h) * u.values() + h * k.values();
  return out;
}

bool in_nodal_set(const Field& u, const EpsParams& params, double tol) {
  if (!is_sign_changing(u)) return false;
  SignSplit s = sign_split(u, params);
  return relative_nehari_residual(s.plus, params) <= tol &&
         relative_nehari_residual(s.minus, params) <= tol;
}

namespace {

RegionTag tag_from(double gap_plus, double gap_minus, double energy, double alpha) {
  if (gap_plus <= alpha) return RegionTag::tube_plus;
  if (gap_minus <= alpha) return RegionTag::tube_minus;
  if (energy <= 0.0) return RegionTag::sublevel_zero;
  return RegionTag::z_candidate;
}

struct Iterate {
  Field u;
  GradientEvaluation eval;
  SignSplit split;
};

Iterate make_iterate(Field u, const EpsParams& params, double tol, const Field* k_guess) {
  Iterate it;
  it.eval = evaluate_gradient(u, params, tol, k_guess);
  it.split = sign_split(u, params);
  it.u = std::move(u);
  return it;
}

FlowSample sample_of(const Iterate& it, int step, double h, double alpha,
                     const EpsParams& params) {
  FlowSample s;
  s.step = step;
  s.energy = it.eval.energy;
  s.gap_plus = it.split.gap_plus;
  s.gap_minus = it.split.gap_minus;
  s.part_residual_plus = relative_nehari_residual(it.split.plus, params);
  s.part_residual_minus = relative_nehari_residual(it.split.minus, params);
  s.sign_changing = is_sign_changing(it.u);
  s.region = tag_from(s.gap_plus, s.gap_minus, s.energy.total, alpha);
  s.step_size = h;
  return s;
}

Field project(const Field& u, FlowMode mode, const EpsParams& params) {
  if (mode == FlowMode::plain || u.values().isZero(0.0)) return u;
  return nodal_projection(u, params).projected;
}

// J is evaluated from sums over every node, so two values closer than a few
// ulps of the larger term cannot be ordered.
double roundoff_floor(const EnergyBreakdown& e) {
  return 8.0 * std::numeric_limits<double>::epsilon() *
         std::max(std::abs(e.quadratic), std::abs(e.potential));
}

}  // namespace

RegionTag classify_region(const Field& u, double alpha, const EpsParams& params) {
  if (!(alpha > 0.0)) throw InvalidParameter("alpha must be positive");
  SignSplit s = sign_split(u, params);
  return tag_from(s.gap_plus, s.gap_minus, energy_terms(u, params).total, alpha);
}

FlowResult flow_run(const Field& u0, const FlowConfig& config, const EpsParams& params) {
  config.validate();
  params.check_manifold(u0.manifold());
  const double tol = config.solver_tol;
  const double stop = std::sqrt(config.stop_delta);
  const bool regions = config.alpha > 0.0;

  Iterate cur = make_iterate(project(u0, config.mode, params), params, tol, nullptr);
  const bool started_plus = cur.split.gap_plus <= config.alpha;
  const bool started_minus = cur.split.gap_minus <= config.alpha;

  FlowResult res;
  FlowTrace& tr = res.trace;
  double h = config.step;
  double last_h = 0.0;
  int step = 0;
  bool recorded_last = false;

  auto note = [&](bool force) {
    tr.max_gap_plus = std::max(tr.max_gap_plus, cur.split.gap_plus);
    tr.max_gap_minus = std::max(tr.max_gap_minus, cur.split.gap_minus);
    recorded_last = force || step % config.record_every == 0;
    if (recorded_last) tr.samples.push_back(sample_of(cur, step, last_h, config.alpha, params));
  };

  for (;;) {
    note(step == 0);
    const EnergyBreakdown& e = cur.eval.energy;
    if (e.grad_norm <= stop) {
      tr.outcome = FlowOutcome::converged;
      break;
    }
    if (regions && config.stop_on_tube_entry && step > 0) {
      if (!started_plus && cur.split.gap_plus <= config.alpha) {
        tr.outcome = FlowOutcome::entered_tube_plus;
        break;
      }
      if (!started_minus && cur.split.gap_minus <= config.alpha) {
        tr.outcome = FlowOutcome::entered_tube_minus;
        break;
      }
    }
    if (regions && config.mode == FlowMode::plain && e.total <= 0.0) {
      tr.outcome = FlowOutcome::energy_nonpositive;
      break;
    }
    if (step >= config.max_steps) {
      tr.outcome = FlowOutcome::max_steps;
      break;
    }

    // Backtracking on the step size; the trial reuses K_eps(u) from the
    // current evaluation so each trial costs one solve.
    double trial_h = h;
    for (;;) {
      Field trial = cur.u;
      trial.values() = (1.0 - trial_h) * cur.u.values() + trial_h * cur.eval.k.values();
      bool finite = trial.all_finite();
      if (finite) {
        trial = project(trial, config.mode, params);
        finite = trial.all_finite() && nonlinearity(trial, params.p()).all_finite();
      }
      if (!finite) {  // overflow past the mountain pass counts as a rejected step
        trial_h *= config.backtrack;
        if (trial_h < 1e-12)
          throw StepCollapse("flow iterate overflowed at every step size down to 1e-12");
        continue;
      }
      Iterate next = make_iterate(std::move(trial), params, tol, &cur.eval.k);
      const double floor = roundoff_floor(e);
      if (next.eval.energy.total < e.total ||
          (next.eval.energy.total <= e.total + floor && e.grad_norm * e.grad_norm * trial_h <= floor)) {
        cur = std::move(next);
        last_h = trial_h;
        break;
      }
      trial_h *= config.backtrack;
      if (trial_h < 1e-12)
        throw StepCollapse("backtracking reduced the flow step below 1e-12 at step " +
                           std::to_string(step));
    }
    ++step;
  }
  if (!recorded_last) tr.samples.push_back(sample_of(cur, step, last_h, config.alpha, params));
  tr.steps = step;
  tr.final_energy = cur.eval.energy;
  res.field = std::move(cur.u);
  return res;
}

}  // namespace yamabe
