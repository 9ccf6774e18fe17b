#pragma once

#include "yamabe/field.hpp"

#include <Eigen/Core>

namespace yamabe {

struct ConcentrationReport {
  double r = 0.0;
  /// C_{u,r}(x): share of the L^1 mass of u in the closed ball B(x, r).
  Eigen::VectorXd values;
  /// C_r(u) = max_x C_{u,r}(x).
  double coefficient = 0.0;
  std::size_t argmax = 0;  // lowest node index attaining the max
  double eta = 0.9;
};

/// Throws ZeroField when u vanishes. Values are clamped to [0, 1]; for
/// r >= diam(M) every value is exactly 1.
ConcentrationReport conc(const Field& u, double r);

/// phi_eta: 0 below 1 - eta, 1 above eta, linear in between.
double phi_eta(double c, double eta);

/// Phi_{r,eta}(u)(x) = phi_eta(C_{u,r}(x)) u(x). Requires C_r(u) > eta
/// (NotConcentrated otherwise); the result is supported in B(x*, 2r) for every
/// node x* with C_{u,r}(x*) > eta.
Field localize(const Field& u, double r, double eta);

/// Whether the support of u fits in a closed ball of radius r around a node.
bool support_within(const Field& u, double r);

/// Centre of mass: argmin of P_u(x) = sum d(x, y)^2 u(y) w over the nodes,
/// refined by a three-point parabola along each axis. Requires u >= 0
/// (NegativeValues), u != 0 (ZeroField) and a support inside a ball of radius
/// r_0 / 2 (NotConcentrated).
Point center_mass(const Field& u);

struct CenterPair {
  Point c_plus;
  Point c_minus;
  double separation = 0.0;
  /// Radius actually used: min(eps r, r_0 / 4).
  double radius = 0.0;
  std::size_t argmax_plus = 0;
  std::size_t argmax_minus = 0;
};

/// Centres of mass of the localized (u+)^p and (u-)^p at radius eps*r
/// (capped at r_0/4 so the localized support passes the centre-of-mass
/// check). Throws NotSignChanging or NotConcentrated.
CenterPair cm_pair(const Field& u, double r, double eta, const EpsParams& params);

}  // namespace yamabe
