#include "yamabe/elliptic.hpp"

#include "yamabe/errors.hpp"

#include <cmath>
#include <string>

namespace yamabe {

Field laplacian(const Field& u) {
  const TorusManifold& m = u.manifold();
  Field out(u.manifold_ptr());
  const std::size_t n = u.size();
  for (int k = 0; k < m.dim(); ++k) {
    const double inv_h2 = 1.0 / (m.spacing(k) * m.spacing(k));
    for (std::size_t i = 0; i < n; ++i) {
      out[i] += (u[m.neighbor(i, k, +1)] - 2.0 * u[i] + u[m.neighbor(i, k, -1)]) * inv_h2;
    }
  }
  return out;
}

Field apply_operator(const Field& u, const EpsParams& params) {
  params.check_manifold(u.manifold());
  Field out = laplacian(u);
  out.values() = -params.eps() * params.eps() * out.values() + params.coefficient() * u.values();
  return out;
}

std::pair<Field, LinearSolveReport> solve_K(const Field& phi, const EpsParams& params, double tol,
                                            const Field* initial_guess, int max_iterations) {
  if (!(tol > 0.0)) throw InvalidParameter("solver tolerance must be positive");
  params.check_manifold(phi.manifold());
  if (!phi.all_finite()) throw InvalidParameter("right-hand side is not finite");
  if (max_iterations <= 0) max_iterations = 2000 + 4 * static_cast<int>(phi.size());

  LinearSolveReport report;
  const double phi_norm = phi.values().norm();
  Field x(phi.manifold_ptr());
  if (phi_norm == 0.0) {
    report.converged = true;
    return {std::move(x), report};
  }
  if (initial_guess) {
    phi.check_same_manifold(*initial_guess);
    x = *initial_guess;
  }

  // Plain CG on the symmetric positive definite stencil. The recurrence
  // residual drifts from the true one, so the true residual is recomputed
  // before reporting convergence and the iteration restarted if needed.
  const double target = tol * phi_norm;
  Eigen::VectorXd r = phi.values() - apply_operator(x, params).values();
  int it = 0;
  while (it < max_iterations) {
    double rr = r.squaredNorm();
    if (std::sqrt(rr) <= target) break;
    Eigen::VectorXd d = r;
    while (it < max_iterations) {
      Field dir(phi.manifold_ptr(), d);
      const Eigen::VectorXd ad = apply_operator(dir, params).values();
      const double alpha = rr / d.dot(ad);
      x.values() += alpha * d;
      r -= alpha * ad;
      ++it;
      const double rr_new = r.squaredNorm();
      if (std::sqrt(rr_new) <= 0.5 * target) break;
      d = r + (rr_new / rr) * d;
      rr = rr_new;
    }
    r = phi.values() - apply_operator(x, params).values();
  }
  report.iterations = it;
  report.final_residual = r.norm() / phi_norm;
  report.converged = report.final_residual <= tol;
  if (!report.converged)
    throw NoConvergence("conjugate gradients stopped after " + std::to_string(it) +
                        " iterations with relative residual " +
                        std::to_string(report.final_residual));
  return {std::move(x), report};
}

std::pair<Field, LinearSolveReport> K_eps(const Field& u, const EpsParams& params, double tol,
                                          const Field* initial_guess) {
  return solve_K(nonlinearity(u, params.p()), params, tol, initial_guess);
}

}  // namespace yamabe
