#pragma once

#include "yamabe/field.hpp"

#include <optional>
#include <utility>

namespace yamabe {

struct LinearSolveReport {
  int iterations = 0;
  /// ||A u - phi|| / ||phi|| in the eps-weighted 2-norm.
  double final_residual = 0.0;
  bool converged = false;
};

constexpr double kDefaultSolverTol = 1e-10;

/// Periodic second-order Laplacian, sum over axes of
/// (u[i+1] - 2 u[i] + u[i-1]) / h^2.
Field laplacian(const Field& u);

/// A_eps u = -eps^2 Lap_h u + c u.
Field apply_operator(const Field& u, const EpsParams& params);

/// Solves A_eps u = phi by conjugate gradients. The operator is a symmetric
/// M-matrix, so no preconditioner beyond its constant diagonal is needed.
/// Throws NoConvergence after `max_iterations` (0 picks a size-based limit).
std::pair<Field, LinearSolveReport> solve_K(const Field& phi, const EpsParams& params,
                                            double tol = kDefaultSolverTol,
                                            const Field* initial_guess = nullptr,
                                            int max_iterations = 0);

/// K_eps(u) = A_eps^{-1}(|u|^(p-2) u).
std::pair<Field, LinearSolveReport> K_eps(const Field& u, const EpsParams& params,
                                          double tol = kDefaultSolverTol,
                                          const Field* initial_guess = nullptr);

}  // namespace yamabe
