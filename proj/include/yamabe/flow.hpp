#pragma once

#include "yamabe/elliptic.hpp"
#include "yamabe/energy.hpp"
#include "yamabe/field.hpp"

#include <string>
#include <vector>

namespace yamabe {

enum class FlowMode { plain, nehari_projected };

enum class RegionTag { tube_plus, tube_minus, sublevel_zero, z_candidate };

enum class FlowOutcome { converged, entered_tube_plus, entered_tube_minus, energy_nonpositive,
                         max_steps };

std::string to_string(FlowMode m);
std::string to_string(RegionTag t);
std::string to_string(FlowOutcome o);
FlowMode flow_mode_from_string(const std::string& s);
RegionTag region_from_string(const std::string& s);
FlowOutcome flow_outcome_from_string(const std::string& s);

struct FlowConfig {
  double step = 0.5;
  double backtrack = 0.5;
  int max_steps = 20000;
  /// Stop when grad_norm <= sqrt(stop_delta).
  double stop_delta = 1e-12;
  FlowMode mode = FlowMode::plain;
  /// Tube radius; tube and sublevel exits are only checked when alpha > 0.
  double alpha = 0.0;
  double solver_tol = kDefaultSolverTol;
  /// Record every k-th iterate (the first and last are always recorded).
  int record_every = 1;
  /// Stop with EnteredTube when the trajectory moves into a tube it did not
  /// start in.
  bool stop_on_tube_entry = true;

  void validate() const;
};

struct FlowSample {
  int step = 0;
  EnergyBreakdown energy;
  double gap_plus = 0.0;
  double gap_minus = 0.0;
  /// Relative Nehari residuals of u+ and u- (0 for a vanishing part).
  double part_residual_plus = 0.0;
  double part_residual_minus = 0.0;
  bool sign_changing = false;
  RegionTag region = RegionTag::z_candidate;
  double step_size = 0.0;
};

struct FlowTrace {
  std::vector<FlowSample> samples;
  FlowOutcome outcome = FlowOutcome::max_steps;
  int steps = 0;
  EnergyBreakdown final_energy;
  /// Largest gap towards the cone the run started in (tube-invariance audit).
  double max_gap_plus = 0.0;
  double max_gap_minus = 0.0;
};

/// One explicit step of the negative gradient flow, (1-h) u + h K_eps(u).
Field flow_step(const Field& u, double h, const EpsParams& params,
                double tol = kDefaultSolverTol);

/// Both signed parts nonzero with relative Nehari residuals <= tol.
bool in_nodal_set(const Field& u, const EpsParams& params, double tol = 1e-8);

RegionTag classify_region(const Field& u, double alpha, const EpsParams& params);

struct FlowResult {
  Field field;
  FlowTrace trace;
};

/// Iterates flow_step with backtracking until grad_norm <= sqrt(delta), a
/// region exit, or max_steps. In nehari_projected mode every accepted iterate
/// (and the start) is replaced by its nodal_projection.
FlowResult flow_run(const Field& u0, const FlowConfig& config, const EpsParams& params);

}  // namespace yamabe
