#pragma once

#include "yamabe/archive.hpp"
#include "yamabe/config.hpp"
#include "yamabe/field.hpp"

#include <functional>
#include <string>
#include <vector>

namespace yamabe {

enum class ExperimentKind { ground, sweep_m, sweep_d, multiplicity, diagnose };

std::string to_string(ExperimentKind k);
ExperimentKind experiment_kind_from_string(const std::string& s);

struct RunOptions {
  /// Progress sink; null means silent.
  std::function<void(const std::string&)> log;
};

/// Positive runs (every kind but ground) give m_hat and the tube radius per
/// eps; sweep_d and multiplicity add nodal runs from the configured seeds.
/// Per-seed failures are recorded with an "error:<Tag>" outcome. Results do
/// not depend on config.jobs. Writes the archive to config.output_dir.
SolutionArchive run_experiment(const ExperimentConfig& config, ExperimentKind kind,
                               const RunOptions& options = {});

/// Reloads the archive in dir, recomputes every record's diagnostics from its
/// snapshot, reclusters multiplicity archives and saves the result.
SolutionArchive diagnose(const std::string& dir, const RunOptions& options = {});

/// Bubble-centre pairs for one eps, in a deterministic order.
struct SeedSpec {
  int index = 0;
  Point x;
  Point y;
};
std::vector<SeedSpec> make_seeds(const ExperimentConfig& config, const TorusManifold& m,
                                 double eps, std::size_t eps_index, double r_cut);

double seed_cutoff(const ExperimentConfig& config, const TorusManifold& m);

/// Recomputes the derived fields of a record (energy, gaps, region, part
/// residuals, PDE residual, concentration, centre pair) from u.
void fill_diagnostics(SolutionRecord& r, const Field& u, const EpsParams& params,
                      double alpha, const ExperimentConfig& config);

/// Dual-norm residual ||A u - |u|^{p-2} u||_* = sup <r, v> / ||v||_eps.
double pde_residual(const Field& u, const EpsParams& params, double tol = 1e-12);
/// The same residual in the eps-weighted L^2 norm.
double pde_residual_l2(const Field& u, const EpsParams& params);

/// Groups the converged nodal records into classes modulo lattice
/// translations and u -> -u; assigns cluster ids and returns the count.
/// fields[i] belongs to archive.records[i]. Throws MixedEps.
int cluster_solutions(SolutionArchive& archive, const std::vector<Field>& fields,
                      double energy_tol, double shape_tol);

/// Relative eps-norm distance between u and v after aligning v's positive
/// centre to u's (and, for the swapped test, -v's); the smaller of the two.
double aligned_distance(const Field& u, const Point& u_c_plus, const Field& v,
                        const Point& v_c_plus, const Point& v_c_minus,
                        const EpsParams& params);

}  // namespace yamabe
