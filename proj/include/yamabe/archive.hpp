#pragma once

#include "yamabe/config.hpp"
#include "yamabe/energy.hpp"
#include "yamabe/flow.hpp"

#include <nlohmann/json.hpp>

#include <optional>
#include <string>
#include <vector>

namespace yamabe {

enum class RecordKind { positive, nodal };

struct CenterPairRecord {
  std::vector<double> c_plus;
  std::vector<double> c_minus;
  double separation = 0.0;
  double radius = 0.0;
};

struct SolutionRecord {
  int id = 0;
  double eps = 0.0;
  RecordKind kind = RecordKind::nodal;
  // Seed provenance.
  std::string seed_strategy;
  int seed_index = 0;
  std::vector<double> seed_x;
  std::vector<double> seed_y;
  bool seed_admissible = false;

  /// Flow outcome tag, or "error:<Tag>" when the run threw.
  std::string outcome;
  std::string error;
  bool converged = false;
  int steps = 0;
  EnergyBreakdown energy;
  double gap_plus = 0.0;
  double gap_minus = 0.0;
  RegionTag region = RegionTag::z_candidate;
  bool sign_changing = false;
  double part_residual_plus = 0.0;
  double part_residual_minus = 0.0;
  /// ||A u - f(u)|| in the dual norm of H_eps and in the eps-weighted L^2.
  double pde_residual = 0.0;
  double pde_residual_l2 = 0.0;
  bool pde_ok = false;
  /// Share of int |u^+-|^p in the best ball of radius concentration_radius*eps.
  double captured_plus = 0.0;
  double captured_minus = 0.0;
  std::optional<CenterPairRecord> cm;
  std::string cm_error;
  /// Iterates of the run that passed the E-set test, and how many of those
  /// sat inside a tube.
  int nodal_set_hits = 0;
  int nodal_set_violations = 0;
  /// Largest gap_plus seen along the run (tube audit for positive runs).
  double max_gap_plus = 0.0;
  int cluster_id = -1;
  /// Snapshot file relative to the archive directory; empty when not stored.
  std::string snapshot;
};

struct SummaryRow {
  double eps = 0.0;
  double alpha = 0.0;
  double m_hat = 0.0;  // NaN when no positive record converged
  double d_hat = 0.0;  // NaN when no nodal record converged
  double mE = 0.0;
  double m_ratio = 0.0;
  double d_ratio = 0.0;
  bool inequality = false;
  int records = 0;
  int converged_nodal = 0;
  int clusters = -1;  // -1 when clustering was not run
};

struct SolutionArchive {
  int schema_version = kSchemaVersion;
  std::string kind;
  nlohmann::json config;
  /// Ground-state data: n, q, u0, mE, decay_rate.
  nlohmann::json ground;
  /// Tube radius per eps (same order as config eps).
  std::vector<std::pair<double, double>> alpha;
  std::vector<SolutionRecord> records;
};

std::string to_string(RecordKind k);

nlohmann::json to_json(const SolutionRecord& r);
SolutionRecord record_from_json(const nlohmann::json& j);

/// One row per eps that has records, sorted by decreasing eps.
std::vector<SummaryRow> summarize(const SolutionArchive& archive);
std::string summary_csv(const std::vector<SummaryRow>& rows);

/// Writes archive.json, records.jsonl and summary.csv into dir.
void save_archive(const SolutionArchive& archive, const std::string& dir);
/// Throws CorruptArchive or VersionMismatch.
SolutionArchive load_archive(const std::string& dir);

struct SnapshotMeta {
  std::vector<long> shape;
  std::vector<double> lengths;
  double eps = 0.0;
  int schema_version = kSchemaVersion;
};

/// Raw little-endian float64 values plus a JSON sidecar (<path>.json).
void write_snapshot(const std::string& path, const Eigen::VectorXd& values,
                    const SnapshotMeta& meta);
Eigen::VectorXd read_snapshot(const std::string& path, SnapshotMeta* meta = nullptr);

}  // namespace yamabe
