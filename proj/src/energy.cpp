#include "yamabe/energy.hpp"

#include "yamabe/errors.hpp"

#include <cmath>

namespace yamabe {

EnergyBreakdown energy_terms(const Field& u, const EpsParams& params) {
  EnergyBreakdown e;
  const double l = quadratic_form(u, params);
  const double lp = lp_power(u, params.p(), params);
  e.quadratic = 0.5 * l;
  e.potential = lp / params.p();
  e.total = e.quadratic - e.potential;
  e.nehari_residual = l - lp;
  return e;
}

GradientEvaluation evaluate_gradient(const Field& u, const EpsParams& params, double tol,
                                     const Field* k_guess) {
  GradientEvaluation ev{energy_terms(u, params), Field(u.manifold_ptr()),
                        Field(u.manifold_ptr()), {}};
  auto [k, report] = K_eps(u, params, tol, k_guess);
  ev.k = std::move(k);
  ev.solve = report;
  ev.gradient = u - ev.k;
  ev.energy.grad_norm = std::sqrt(std::max(0.0, quadratic_form(ev.gradient, params)));
  return ev;
}

EnergyBreakdown j_eps(const Field& u, const EpsParams& params, double tol) {
  return evaluate_gradient(u, params, tol).energy;
}

Field grad_residual(const Field& u, const EpsParams& params, double tol) {
  if (!(tol > 0.0)) throw InvalidParameter("tolerance must be positive");
  return evaluate_gradient(u, params, tol).gradient;
}

NehariProjection nehari(const Field& u, const EpsParams& params) {
  const double lp = lp_power(u, params.p(), params);
  if (!(lp > 0.0)) throw ZeroField("Nehari projection of the zero field");
  const double l = quadratic_form(u, params);
  NehariProjection out;
  out.t = std::pow(l / lp, 1.0 / (params.p() - 2.0));
  out.projected = out.t * u;
  out.residual = energy_terms(out.projected, params).nehari_residual;
  return out;
}

double relative_nehari_residual(const Field& u, const EpsParams& params) {
  const double l = quadratic_form(u, params);
  if (l == 0.0) return 0.0;
  return std::abs(l - lp_power(u, params.p(), params)) / l;
}

bool is_sign_changing(const Field& u) {
  const double hi = u.values().maxCoeff();
  const double lo = -u.values().minCoeff();
  return hi > kNegligiblePart * lo && lo > kNegligiblePart * hi && hi > 0.0 && lo > 0.0;
}

NodalProjection nodal_projection(const Field& u, const EpsParams& params) {
  SignSplit parts = sign_split(u, params);
  const double p = params.p();
  const double P = lp_power(parts.plus, p, params);
  const double Q = lp_power(parts.minus, p, params);
  NodalProjection out;
  if (P == 0.0 && Q == 0.0) throw ZeroField("nodal projection of the zero field");
  const double sup_plus = parts.plus.values().maxCoeff();
  const double sup_minus = parts.minus.values().maxCoeff();
  if (P == 0.0 || Q == 0.0 || sup_minus <= kNegligiblePart * sup_plus ||
      sup_plus <= kNegligiblePart * sup_minus) {
    NehariProjection single = nehari(u, params);
    out.t_plus = out.t_minus = single.t;
    out.projected = std::move(single.projected);
    out.residual_plus = out.residual_minus = relative_nehari_residual(out.projected, params);
    return out;
  }
  out.sign_changing = true;
  const double a = quadratic_form(parts.plus, params);
  const double b = quadratic_form(parts.minus, params);
  const double c = bilinear(parts.plus, parts.minus, params);

  // Stationary point of g(s,t) = J(s u+ - t u-):
  //   F1 = s a - t c - s^(p-1) P = 0,  F2 = t b - s c - t^(p-1) Q = 0.
  double s = std::pow(a / P, 1.0 / (p - 2.0));
  double t = std::pow(b / Q, 1.0 / (p - 2.0));
  auto f1 = [&](double s_, double t_) { return s_ * a - t_ * c - std::pow(s_, p - 1.0) * P; };
  auto f2 = [&](double s_, double t_) { return t_ * b - s_ * c - std::pow(t_, p - 1.0) * Q; };
  auto merit = [&](double s_, double t_) {
    const double x = f1(s_, t_) / a, y = f2(s_, t_) / b;
    return x * x + y * y;
  };
  if (c != 0.0) {
    double m0 = merit(s, t);
    for (int it = 0; it < 100 && m0 > 1e-30; ++it) {
      const double j11 = a - (p - 1.0) * std::pow(s, p - 2.0) * P;
      const double j22 = b - (p - 1.0) * std::pow(t, p - 2.0) * Q;
      const double j12 = -c;
      const double det = j11 * j22 - j12 * j12;
      if (det == 0.0) break;
      const double F1 = f1(s, t), F2 = f2(s, t);
      const double ds = -(j22 * F1 - j12 * F2) / det;
      const double dt = -(j11 * F2 - j12 * F1) / det;
      double lambda = 1.0;
      bool moved = false;
      for (int k = 0; k < 40; ++k, lambda *= 0.5) {
        const double s1 = s + lambda * ds, t1 = t + lambda * dt;
        if (s1 <= 0.0 || t1 <= 0.0) continue;
        const double m1 = merit(s1, t1);
        if (m1 < m0) {
          s = s1;
          t = t1;
          m0 = m1;
          moved = true;
          break;
        }
      }
      if (!moved) break;
    }
  }
  out.t_plus = s;
  out.t_minus = t;
  out.projected = s * parts.plus - t * parts.minus;
  out.residual_plus = std::abs(f1(s, t)) / (s * a);
  out.residual_minus = std::abs(f2(s, t)) / (t * b);
  return out;
}

GroundConstants constants_from_S(double S, double p) {
  GroundConstants g;
  g.S_eps = S;
  g.m_eps = (p - 2.0) / (2.0 * p) * std::pow(S, p / (p - 2.0));
  g.alpha = 0.5 * std::pow(S, p / (2.0 * (p - 2.0)));
  return g;
}

GroundConstants constants(const Field& u_ground, const EpsParams& params) {
  const double lp = lp_norm(u_ground, params.p(), params);
  if (!(lp > 0.0)) throw ZeroField("constants need a nonzero field");
  const double S = quadratic_form(u_ground, params) / (lp * lp);
  return constants_from_S(S, params.p());
}

}  // namespace yamabe
