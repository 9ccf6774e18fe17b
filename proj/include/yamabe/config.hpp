#pragma once

#include "yamabe/flow.hpp"
#include "yamabe/groundstate.hpp"

#include <nlohmann/json.hpp>

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace yamabe {

inline constexpr int kSchemaVersion = 1;

enum class SeedStrategy { explicit_list, random, net };

std::string to_string(SeedStrategy s);

struct SeedConfig {
  SeedStrategy strategy = SeedStrategy::explicit_list;
  /// Explicit bubble-centre pairs (sweep_d, multiplicity).
  std::vector<std::pair<std::vector<double>, std::vector<double>>> pairs;
  /// Centre of the positive bubble; empty means the middle of the torus.
  std::vector<double> positive_center;
  int count = 1;
  std::uint64_t random_seed = 1;
  /// Cut-off radius of each seed bubble; <= 0 selects default_cutoff_radius.
  double cutoff = 0.0;
  /// Net radius as a multiple of eps * R_0.
  double net_scale = 1.0;
};

struct Tolerances {
  /// Resolution rule: every spacing must satisfy h <= max_h_over_eps * eps.
  double max_h_over_eps = 0.25;
  double cluster_energy = 1e-6;
  double cluster_shape = 1e-2;
  /// Radius (in units of eps) and threshold of the concentration checks.
  double concentration_radius = 10.0;
  double eta = 0.9;
  /// Converged records must satisfy ||A u - f(u)||_* <= factor * sqrt(delta).
  double pde_residual_factor = 2.0;
  /// Both part residuals <= this makes a field a member of the discrete E set.
  double nodal_set = 1e-8;
  double inequality_slack = 1e-6;
};

struct ExperimentConfig {
  int schema_version = kSchemaVersion;
  int dimension = 1;
  std::vector<double> lengths;
  std::vector<long> grid;
  int fiber_dim = 3;
  double scalar_curvature = 0.0;
  std::vector<double> eps;
  FlowConfig flow;
  /// Plain flow run after the projected stage of every seed.
  bool polish = true;
  SeedConfig seeds;
  Tolerances tol;
  ShootOptions shoot;
  double shoot_tol = 1e-15;
  std::string output_dir = "out";
  bool write_snapshots = true;
  bool write_traces = false;
  int jobs = 1;

  /// Throws ConfigError (or the matching precondition error) when the grid
  /// is too coarse for an eps, a parameter is out of range, or the
  /// coefficient is not coercive.
  void validate() const;
};

ExperimentConfig load_config(const std::string& path);
ExperimentConfig parse_config(const std::string& yaml_text);

nlohmann::json to_json(const ExperimentConfig& c);
ExperimentConfig config_from_json(const nlohmann::json& j);

}  // namespace yamabe
