#pragma once

#include "yamabe/field.hpp"
#include "yamabe/groundstate.hpp"

namespace yamabe {

/// Two-bubble seed i_eps(x, y) = t(u_x) u_x - t(u_y) u_y.
struct SeedPair {
  Point x;
  Point y;
  double eps = 0.0;
  Field field;
  /// Relative Nehari residuals of the positive and negative parts.
  std::array<double, 2> part_residuals{0.0, 0.0};
  /// dist(x, y) >= 2 eps R_0 (diameter form of the admissible set).
  bool admissible = false;
  /// dist(x, y) >= 2 eps r_0 (injectivity-radius form of the same set).
  bool admissible_r0 = false;
};

/// Default cut-off radius: min(r_0, min_i L_i / 4).
double default_cutoff_radius(const TorusManifold& m);

/// Single Nehari-projected bubble t(u_x) u_x.
Field projected_bubble(const Point& x, const RadialProfile& profile, const ManifoldPtr& manifold,
                       const EpsParams& params, double r_cut);

/// Requires dist(x, y) >= 2 r_cut so the cut-off supports are disjoint
/// (OverlappingSupports otherwise).
SeedPair seed_pair(const Point& x, const Point& y, const RadialProfile& profile,
                   const ManifoldPtr& manifold, const EpsParams& params, double r_cut);

}  // namespace yamabe
