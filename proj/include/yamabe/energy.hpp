#pragma once

#include "yamabe/elliptic.hpp"
#include "yamabe/field.hpp"

namespace yamabe {

struct EnergyBreakdown {
  double quadratic = 0.0;        // L_eps(u, u) / 2
  double potential = 0.0;        // |u|_{p,eps}^p / p
  double total = 0.0;            // J_eps(u) = quadratic - potential
  double nehari_residual = 0.0;  // L_eps(u, u) - |u|_{p,eps}^p
  double grad_norm = 0.0;        // L_eps(J' u, J' u)^{1/2}; 0 when not evaluated
};

/// Energy terms that need no linear solve (grad_norm left at 0).
EnergyBreakdown energy_terms(const Field& u, const EpsParams& params);

/// Everything the flow needs from one evaluation: the breakdown, K_eps(u)
/// and J'(u) = u - K_eps(u).
struct GradientEvaluation {
  EnergyBreakdown energy;
  Field k;
  Field gradient;
  LinearSolveReport solve;
};

GradientEvaluation evaluate_gradient(const Field& u, const EpsParams& params,
                                     double tol = kDefaultSolverTol,
                                     const Field* k_guess = nullptr);

/// Full breakdown including grad_norm (one solve).
EnergyBreakdown j_eps(const Field& u, const EpsParams& params, double tol = kDefaultSolverTol);

/// J'_eps(u) = u - K_eps(u), the gradient with respect to L_eps.
Field grad_residual(const Field& u, const EpsParams& params, double tol = kDefaultSolverTol);

struct NehariProjection {
  double t = 0.0;
  Field projected;
  double residual = 0.0;  // Nehari residual of t*u
};

/// t(u)^(p-2) = L_eps(u) / |u|_p^p; projected = t u.
NehariProjection nehari(const Field& u, const EpsParams& params);

/// |L_eps(u) - |u|_p^p| / L_eps(u), 0 for the zero field.
double relative_nehari_residual(const Field& u, const EpsParams& params);

struct NodalProjection {
  double t_plus = 0.0;
  double t_minus = 0.0;
  Field projected;
  /// Relative residuals of dJ(v)(v+) and dJ(v)(v-) at the projected v.
  double residual_plus = 0.0;
  double residual_minus = 0.0;
  bool sign_changing = false;
};

/// A signed part whose sup is below this fraction of the other part's sup is
/// treated as solver noise: rescaling it onto its own Nehari manifold would
/// blow it up into a spurious second bubble.
inline constexpr double kNegligiblePart = 1e-6;

/// Both signed parts present, neither negligible against the other.
bool is_sign_changing(const Field& u);

/// Rescales the signed parts, v = s u+ - t u-, so that dJ(v)(v+) = 0 and
/// dJ(v)(v-) = 0. On the lattice the parts of a sign-changing field interact
/// through the stencil edges that cross the nodal set, so (s, t) solve a
/// coupled 2x2 system; without such edges it reduces to the two independent
/// Nehari scalings. Fields that are not sign changing (up to
/// kNegligiblePart) get the plain Nehari projection.
NodalProjection nodal_projection(const Field& u, const EpsParams& params);

struct GroundConstants {
  double S_eps = 0.0;
  double m_eps = 0.0;
  double alpha = 0.0;
};

GroundConstants constants_from_S(double S, double p);

/// S_eps as the Rayleigh quotient L_eps(u)/|u|_p^2 at u, then
/// m_eps = (p-2)/(2p) S^{p/(p-2)} and alpha = S^{p/(2(p-2))} / 2.
GroundConstants constants(const Field& u_ground, const EpsParams& params);

}  // namespace yamabe
