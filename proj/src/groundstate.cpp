#include "yamabe/groundstate.hpp"

#include "yamabe/errors.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <string>

namespace yamabe {

namespace {

using State = std::array<double, 2>;  // (U, U')

struct RadialOde {
  int n;
  double q;
  State operator()(double r, const State& y) const {
    const double u = y[0];
    const double nl = u == 0.0 ? 0.0 : std::pow(std::abs(u), q - 2.0) * u;
    return {y[1], -(n - 1) / r * y[1] + u - nl};
  }
};

// Dormand-Prince 5(4) with embedded error estimate.
class DormandPrince {
 public:
  DormandPrince(RadialOde f, double rtol, double atol) : f_(f), rtol_(rtol), atol_(atol) {}

  // Advances (r, y) by at most `h_max`, adapting `h`. Returns true when a step
  // was accepted.
  bool step(double& r, State& y, double& h, double h_max) {
    static constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
    static constexpr double a21 = 1.0 / 5;
    static constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
    static constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
    static constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                            a54 = -212.0 / 729;
    static constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                            a64 = 49.0 / 176, a65 = -5103.0 / 18656;
    static constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                            b5 = -2187.0 / 6784, b6 = 11.0 / 84;
    static constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                            e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;

    h = std::min(h, h_max);
    auto add = [&](std::initializer_list<std::pair<double, const State*>> terms) {
      State out = y;
      for (auto [w, k] : terms) {
        out[0] += h * w * (*k)[0];
        out[1] += h * w * (*k)[1];
      }
      return out;
    };
    const State k1 = f_(r, y);
    const State k2 = f_(r + c2 * h, add({{a21, &k1}}));
    const State k3 = f_(r + c3 * h, add({{a31, &k1}, {a32, &k2}}));
    const State k4 = f_(r + c4 * h, add({{a41, &k1}, {a42, &k2}, {a43, &k3}}));
    const State k5 = f_(r + c5 * h, add({{a51, &k1}, {a52, &k2}, {a53, &k3}, {a54, &k4}}));
    const State k6 =
        f_(r + h, add({{a61, &k1}, {a62, &k2}, {a63, &k3}, {a64, &k4}, {a65, &k5}}));
    const State y5 = add({{b1, &k1}, {b3, &k3}, {b4, &k4}, {b5, &k5}, {b6, &k6}});
    const State k7 = f_(r + h, y5);
    double err = 0.0;
    for (int i = 0; i < 2; ++i) {
      const double e =
          h * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] + e6 * k6[i] + e7 * k7[i]);
      const double sc = atol_ + rtol_ * std::max(std::abs(y[i]), std::abs(y5[i]));
      err = std::max(err, std::abs(e) / sc);
    }
    const double factor =
        err == 0.0 ? 5.0 : std::clamp(0.9 * std::pow(err, -0.2), 0.2, 5.0);
    if (err <= 1.0) {
      r += h;
      y = y5;
      h *= factor;
      return true;
    }
    h *= factor;
    return false;
  }

 private:
  RadialOde f_;
  double rtol_;
  double atol_;
};

// Series start off the r = 0 singularity: U = u0 + A r^2, A = (u0 - u0^(q-1)) / (2n).
State series_start(int n, double q, double u0, double r) {
  const double a = (u0 - std::pow(u0, q - 1.0)) / (2.0 * n);
  return {u0 + a * r * r, 2.0 * a * r};
}

constexpr double kStartRadius = 1e-5;

double tail_shape(int n, double r) {
  const double nu = 0.5 * (n - 2);
  return std::pow(r, -nu) * std::cyl_bessel_k(std::abs(nu), r);
}

double tail_shape_derivative(int n, double r) {
  const double nu = 0.5 * (n - 2);
  return -std::pow(r, -nu) * std::cyl_bessel_k(std::abs(nu + 1.0), r);
}

void check_exponent(int n, double q) {
  if (n < 1 || n > 3) throw InvalidParameter("radial dimension must be 1, 2 or 3");
  if (!(q > 2.0)) throw SubcriticalityViolated("exponent must exceed 2");
  if (n >= 3 && !(q < 2.0 * n / (n - 2.0)))
    throw SubcriticalityViolated("exponent " + std::to_string(q) +
                                 " is not below the critical exponent " +
                                 std::to_string(2.0 * n / (n - 2.0)));
}

}  // namespace

double RadialProfile::value(double r) const {
  r = std::abs(r);
  if (r >= r_max) return tail_amplitude * tail_shape(n, r);
  const double x = r / dr;
  const auto j = static_cast<std::size_t>(x);
  if (j + 1 >= samples.size()) return samples.back();
  const double f = x - static_cast<double>(j);
  return (1.0 - f) * samples[j] + f * samples[j + 1];
}

ShotOutcome classify_shot(int n, double q, double u0, const ShootOptions& opts) {
  check_exponent(n, q);
  DormandPrince dp(RadialOde{n, q}, opts.ode_rtol, opts.ode_atol);
  double r = kStartRadius;
  State y = series_start(n, q, u0, r);
  double h = 1e-3;
  while (r < opts.r_horizon) {
    if (!dp.step(r, y, h, opts.r_horizon - r)) {
      if (h < 1e-14) throw NoConvergence("radial integrator step underflow");
      continue;
    }
    if (y[0] <= 0.0) return ShotOutcome::overshoot;
    if (y[1] > 0.0) return ShotOutcome::undershoot;
    if (!std::isfinite(y[0])) return ShotOutcome::overshoot;
  }
  return ShotOutcome::undershoot;
}

RadialProfile shoot(int n, double q, double tol, const ShootOptions& opts) {
  check_exponent(n, q);
  if (!(tol > 0.0)) throw InvalidParameter("bisection tolerance must be positive");
  if (opts.samples < 3 || opts.samples % 2 == 0)
    throw InvalidParameter("profile needs an odd sample count >= 3");

  double lo = opts.bracket_lo;
  double hi = opts.bracket_hi;
  if (classify_shot(n, q, lo, opts) != ShotOutcome::undershoot)
    throw BracketNotFound("lower shooting bracket does not undershoot");
  int widen = 0;
  while (classify_shot(n, q, hi, opts) != ShotOutcome::overshoot) {
    if (++widen > opts.max_widenings)
      throw BracketNotFound("no overshooting U(0) found up to " + std::to_string(hi));
    lo = hi;
    hi *= 2.0;
  }
  while (hi - lo > tol) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    (classify_shot(n, q, mid, opts) == ShotOutcome::overshoot ? hi : lo) = mid;
  }

  RadialProfile prof;
  prof.n = n;
  prof.q = q;
  prof.r_max = opts.r_max;
  prof.dr = opts.r_max / static_cast<double>(opts.samples - 1);
  prof.u0 = 0.5 * (lo + hi);
  prof.samples.assign(opts.samples, 0.0);
  prof.derivative.assign(opts.samples, 0.0);
  prof.samples[0] = prof.u0;

  // The shot leaves the decaying branch exponentially fast, so the ODE is only
  // trusted down to U = match_level; the linear tail takes over below that,
  // where the nonlinearity is negligible.
  const double match_level =
      prof.u0 * std::clamp(std::pow(1e-8, 1.0 / (q - 2.0)) / prof.u0, 1e-6, 1e-3);
  DormandPrince dp(RadialOde{n, q}, opts.ode_rtol, opts.ode_atol);
  double r = kStartRadius;
  State y = series_start(n, q, prof.u0, r);
  double h = 1e-3;
  std::size_t j = 1;
  for (; j < opts.samples; ++j) {
    const double target = prof.radius(j);
    while (r < target) {
      if (!dp.step(r, y, h, target - r) && h < 1e-14)
        throw NoConvergence("radial integrator step underflow");
      if (target - r < 1e-13 * target) r = target;
    }
    prof.samples[j] = y[0];
    prof.derivative[j] = y[1];
    if (y[0] <= match_level || y[1] >= 0.0) break;
  }
  if (j >= opts.samples) j = opts.samples - 1;
  prof.match_radius = prof.radius(j);
  prof.tail_amplitude = prof.samples[j] / tail_shape(n, prof.match_radius);
  for (std::size_t k = j + 1; k < opts.samples; ++k) {
    const double rk = prof.radius(k);
    prof.samples[k] = prof.tail_amplitude * tail_shape(n, rk);
    prof.derivative[k] = prof.tail_amplitude * tail_shape_derivative(n, rk);
  }

  // Least-squares slope of log U on the outer half, then the smallest
  // amplitude making the envelope hold at every sample beyond r = 2.
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  std::size_t cnt = 0;
  for (std::size_t k = opts.samples / 2; k < opts.samples; ++k) {
    const double rk = prof.radius(k), ly = std::log(prof.samples[k]);
    sx += rk;
    sy += ly;
    sxx += rk * rk;
    sxy += rk * ly;
    ++cnt;
  }
  const double slope = (cnt * sxy - sx * sy) / (cnt * sxx - sx * sx);
  prof.decay_rate = -slope;
  prof.decay_amplitude = 0.0;
  for (std::size_t k = 0; k < opts.samples; ++k) {
    const double rk = prof.radius(k);
    if (k + 1 < opts.samples && prof.radius(k + 1) <= 2.0) continue;  // keep the sample bracketing 2
    prof.decay_amplitude =
        std::max(prof.decay_amplitude, prof.samples[k] * std::exp(prof.decay_rate * rk));
  }
  return prof;
}

double sphere_factor(int n, double r) {
  switch (n) {
    case 1:
      return 2.0;
    case 2:
      return 2.0 * std::numbers::pi * r;
    default:
      return 4.0 * std::numbers::pi * r * r;
  }
}

namespace {

// Composite Simpson over the profile samples of f(j) * sphere_factor(r_j).
template <class F>
double radial_integral(const RadialProfile& prof, F&& f) {
  const std::size_t n = prof.samples.size();
  double s = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    const double w = (j == 0 || j + 1 == n) ? 1.0 : (j % 2 ? 4.0 : 2.0);
    s += w * f(j) * sphere_factor(prof.n, prof.radius(j));
  }
  return s * prof.dr / 3.0;
}

}  // namespace

double m_E(RadialProfile& profile) {
  const double q = profile.q;
  const double norm_q =
      radial_integral(profile, [&](std::size_t j) { return std::pow(profile.samples[j], q); });
  profile.mE = (q - 2.0) / (2.0 * q) * norm_q;
  return profile.mE;
}

double limit_energy(const RadialProfile& profile) {
  const double q = profile.q;
  return radial_integral(profile, [&](std::size_t j) {
    const double u = profile.samples[j], du = profile.derivative[j];
    return 0.5 * du * du + 0.5 * u * u - std::pow(u, q) / q;
  });
}

double cutoff(double d, double r) {
  if (d <= 0.5 * r) return 1.0;
  if (d >= r) return 0.0;
  const double t = (d - 0.5 * r) / (0.5 * r);
  return 1.0 - t * t * t * (10.0 + t * (-15.0 + 6.0 * t));
}

Field sample_bubble(const RadialProfile& profile, double eps, const ManifoldPtr& manifold,
                    const Point& center, double r_cut) {
  if (!(eps > 0.0)) throw InvalidParameter("eps must be positive");
  if (!(r_cut > 0.0)) throw InvalidParameter("cut-off radius must be positive");
  if (r_cut > manifold->injectivity_radius() * (1.0 + 1e-12))
    throw CutoffExceedsInjectivityRadius("cut-off radius " + std::to_string(r_cut) +
                                         " exceeds injectivity radius " +
                                         std::to_string(manifold->injectivity_radius()));
  Field out(manifold);
  for (std::size_t i = 0; i < out.size(); ++i) {
    const double d = manifold->dist(center, manifold->node_point(i));
    if (d >= r_cut) continue;
    out[i] = profile.value(d / eps) * cutoff(d, r_cut);
  }
  return out;
}

}  // namespace yamabe
