#pragma once

#include "yamabe/field.hpp"

#include <limits>
#include <vector>

namespace yamabe {

/// Sampled positive radial solution U of -Lap U + U = U^(q-1) on R^n.
struct RadialProfile {
  int n = 1;
  double q = 4.0;
  double r_max = 0.0;
  double dr = 0.0;
  std::vector<double> samples;     // U(j dr)
  std::vector<double> derivative;  // U'(j dr)
  double u0 = 0.0;
  /// Fitted envelope U(r) <= decay_amplitude * exp(-decay_rate r) for r >= 2.
  double decay_rate = 0.0;
  double decay_amplitude = 0.0;
  /// Beyond match_radius the profile is the decaying solution of the
  /// linearised equation, tail_amplitude * r^{-nu} K_nu(r), nu = (n-2)/2.
  double match_radius = 0.0;
  double tail_amplitude = 0.0;
  double mE = std::numeric_limits<double>::quiet_NaN();

  /// U(r) for any r >= 0: linear interpolation on the samples, the analytic
  /// tail past r_max.
  double value(double r) const;
  double radius(std::size_t j) const { return static_cast<double>(j) * dr; }
};

struct ShootOptions {
  double r_max = 24.0;
  std::size_t samples = 8193;
  double bracket_lo = 1.0;
  double bracket_hi = 10.0;
  int max_widenings = 8;
  /// Integration horizon used to classify a trial U(0).
  double r_horizon = 40.0;
  double ode_rtol = 1e-12;
  double ode_atol = 1e-15;
};

enum class ShotOutcome { overshoot, undershoot };

/// Integrates the radial ODE from U(0) = u0, U'(0) = 0 and reports whether the
/// trajectory crosses zero (overshoot) or turns back up (undershoot).
ShotOutcome classify_shot(int n, double q, double u0, const ShootOptions& opts = {});

/// Bisection on U(0) between an undershoot and an overshoot until the bracket
/// width is <= tol (or no longer representable), then samples the profile and
/// fits its exponential decay.
RadialProfile shoot(int n, double q, double tol = 1e-15, const ShootOptions& opts = {});

/// m(E) = (q-2)/(2q) ||U||_q^q; also stored in profile.mE.
double m_E(RadialProfile& profile);

/// E(U) = int (|grad U|^2/2 + U^2/2 - U^q/q) by radial quadrature.
double limit_energy(const RadialProfile& profile);

/// Surface measure factor of the radial quadrature: 2, 2 pi r, 4 pi r^2.
double sphere_factor(int n, double r);

/// C^2 quintic cut-off: 1 on [0, r/2], 0 for d >= r.
double cutoff(double d, double r);

/// y -> U(dist(center, y)/eps) cutoff(dist(center, y), r_cut).
Field sample_bubble(const RadialProfile& profile, double eps, const ManifoldPtr& manifold,
                    const Point& center, double r_cut);

}  // namespace yamabe
