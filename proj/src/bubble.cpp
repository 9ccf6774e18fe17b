#include "yamabe/bubble.hpp"

#include "yamabe/energy.hpp"
#include "yamabe/errors.hpp"

#include <algorithm>
#include <string>

namespace yamabe {

double default_cutoff_radius(const TorusManifold& m) {
  return std::min(m.injectivity_radius(), 0.25 * *std::min_element(m.lengths().begin(),
                                                                   m.lengths().end()));
}

Field projected_bubble(const Point& x, const RadialProfile& profile, const ManifoldPtr& manifold,
                       const EpsParams& params, double r_cut) {
  params.check_manifold(*manifold);
  Field bump = sample_bubble(profile, params.eps(), manifold, x, r_cut);
  return nehari(bump, params).projected;
}

SeedPair seed_pair(const Point& x, const Point& y, const RadialProfile& profile,
                   const ManifoldPtr& manifold, const EpsParams& params, double r_cut) {
  params.check_manifold(*manifold);
  if (r_cut > manifold->injectivity_radius() * (1.0 + 1e-12))
    throw CutoffExceedsInjectivityRadius("seed cut-off exceeds the injectivity radius");
  const double d = manifold->dist(x, y);
  if (d < 2.0 * r_cut * (1.0 - 1e-12))
    throw OverlappingSupports("bubble centres " + std::to_string(d) +
                              " apart, cut-off supports need " + std::to_string(2.0 * r_cut));
  SeedPair s;
  s.x = manifold->wrap(x);
  s.y = manifold->wrap(y);
  s.eps = params.eps();
  Field px = projected_bubble(x, profile, manifold, params, r_cut);
  Field py = projected_bubble(y, profile, manifold, params, r_cut);
  s.part_residuals = {relative_nehari_residual(px, params), relative_nehari_residual(py, params)};
  s.field = px - py;
  s.admissible = d >= 2.0 * params.eps() * manifold->diameter();
  s.admissible_r0 = d >= 2.0 * params.eps() * manifold->injectivity_radius();
  return s;
}

}  // namespace yamabe
