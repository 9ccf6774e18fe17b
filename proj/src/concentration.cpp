#include "yamabe/concentration.hpp"

#include "yamabe/energy.hpp"
#include "yamabe/errors.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

namespace yamabe {

namespace {

std::vector<std::size_t> support_nodes(const Field& u) {
  std::vector<std::size_t> s;
  for (std::size_t i = 0; i < u.size(); ++i)
    if (u[i] != 0.0) s.push_back(i);
  return s;
}

}  // namespace

ConcentrationReport conc(const Field& u, double r) {
  if (!(r > 0.0)) throw InvalidParameter("concentration radius must be positive");
  const TorusManifold& m = u.manifold();
  const Eigen::VectorXd a = u.values().cwiseAbs();
  const double total = a.sum();
  if (total == 0.0) throw ZeroField("concentration of the zero field");

  ConcentrationReport rep;
  rep.r = r;
  const std::size_t n = m.node_count();
  if (r >= m.diameter()) {
    rep.values = Eigen::VectorXd::Ones(static_cast<Eigen::Index>(n));
  } else {
    const std::vector<MultiIndex> ball = m.ball_offsets(r);
    rep.values.resize(static_cast<Eigen::Index>(n));
    for (std::size_t x = 0; x < n; ++x) {
      double s = 0.0;
      for (const MultiIndex& o : ball) s += a[static_cast<Eigen::Index>(m.shift_node(x, o))];
      rep.values[static_cast<Eigen::Index>(x)] = std::clamp(s / total, 0.0, 1.0);
    }
  }
  Eigen::Index arg = 0;
  rep.coefficient = rep.values.maxCoeff(&arg);  // first maximum wins
  rep.argmax = static_cast<std::size_t>(arg);
  return rep;
}

double phi_eta(double c, double eta) {
  if (c <= 1.0 - eta) return 0.0;
  if (c >= eta) return 1.0;
  return (c - (1.0 - eta)) / (2.0 * eta - 1.0);
}

Field localize(const Field& u, double r, double eta) {
  if (!(eta > 0.5 && eta < 1.0)) throw InvalidParameter("eta must lie in (1/2, 1)");
  ConcentrationReport rep = conc(u, r);
  if (rep.coefficient <= eta)
    throw NotConcentrated("C_r(u) = " + std::to_string(rep.coefficient) + " <= eta = " +
                          std::to_string(eta));
  const TorusManifold& m = u.manifold();
  Field out = u;
  for (std::size_t i = 0; i < u.size(); ++i)
    out[i] = phi_eta(rep.values[static_cast<Eigen::Index>(i)], eta) * u[i];

  // Any kept node has C > 1 - eta and so shares mass with the ball around
  // x*; the two r-balls meet.
  for (std::size_t i = 0; i < u.size(); ++i)
    if (out[i] != 0.0 && m.node_dist(i, rep.argmax) > 2.0 * r * (1.0 + 1e-12))
      throw std::logic_error("localized support leaves the 2r ball");
  return out;
}

bool support_within(const Field& u, double r) {
  const TorusManifold& m = u.manifold();
  const std::vector<std::size_t> supp = support_nodes(u);
  if (supp.empty()) return true;
  const double lim = r * (1.0 + 1e-12);
  for (std::size_t x = 0; x < m.node_count(); ++x) {
    bool ok = true;
    for (std::size_t y : supp)
      if (m.node_dist(x, y) > lim) {
        ok = false;
        break;
      }
    if (ok) return true;
  }
  return false;
}

Point center_mass(const Field& u) {
  const TorusManifold& m = u.manifold();
  if (u.values().minCoeff() < 0.0) throw NegativeValues("center of mass needs u >= 0");
  const std::vector<std::size_t> supp = support_nodes(u);
  if (supp.empty()) throw ZeroField("center of mass of the zero field");
  if (!support_within(u, 0.5 * m.injectivity_radius()))
    throw NotConcentrated("support does not fit in a ball of radius r_0/2");

  auto P = [&](std::size_t x) {
    double s = 0.0;
    for (std::size_t y : supp) {
      const double d = m.node_dist(x, y);
      s += d * d * u[y];
    }
    return s;
  };

  std::size_t best = 0;
  double best_val = P(0);
  for (std::size_t x = 1; x < m.node_count(); ++x) {
    const double v = P(x);
    if (v < best_val) {
      best_val = v;
      best = x;
    }
  }

  Tangent offset = Tangent::Zero(m.dim());
  for (int k = 0; k < m.dim(); ++k) {
    const double pm = P(m.neighbor(best, k, -1));
    const double pp = P(m.neighbor(best, k, +1));
    const double curv = pm - 2.0 * best_val + pp;
    if (curv > 0.0) {
      const double h = m.spacing(k);
      offset[k] = std::clamp(0.5 * h * (pm - pp) / curv, -0.5 * h, 0.5 * h);
    }
  }
  return m.exp(m.node_point(best), offset);
}

CenterPair cm_pair(const Field& u, double r, double eta, const EpsParams& params) {
  const TorusManifold& m = u.manifold();
  params.check_manifold(m);
  if (!is_sign_changing(u))
    throw NotSignChanging("cm_pair needs a sign-changing field");
  SignSplit s = sign_split(u, params);

  CenterPair out;
  out.radius = std::min(params.eps() * r, 0.25 * m.injectivity_radius());
  const double p = params.p();

  auto center_of = [&](const Field& part, std::size_t& argmax) {
    Field f = part;
    f.values() = part.values().array().abs().pow(p).matrix();
    ConcentrationReport rep = conc(f, out.radius);
    Field loc = localize(f, out.radius, eta);
    Point c = center_mass(loc);
    argmax = rep.argmax;
    // The centre lies within 2 r of every node where the concentration
    // exceeds eta.
    for (std::size_t x = 0; x < m.node_count(); ++x)
      if (rep.values[static_cast<Eigen::Index>(x)] > eta &&
          m.dist(c, m.node_point(x)) > 2.0 * out.radius * (1.0 + 1e-9))
        throw std::logic_error("centre of mass outside the 2r ball of a concentration point");
    return c;
  };

  out.c_plus = center_of(s.plus, out.argmax_plus);
  out.c_minus = center_of(s.minus, out.argmax_minus);
  out.separation = m.dist(out.c_plus, out.c_minus);
  return out;
}

}  // namespace yamabe
