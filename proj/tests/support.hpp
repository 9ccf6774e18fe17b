#pragma once

#include "yamabe/field.hpp"

#include <cmath>
#include <memory>
#include <numbers>
#include <random>
#include <vector>

namespace testing {

using yamabe::Field;
using yamabe::ManifoldPtr;
using yamabe::TorusManifold;

inline constexpr double kPi = std::numbers::pi;

inline ManifoldPtr circle(long n, double length = 2.0 * kPi) {
  return std::make_shared<const TorusManifold>(std::vector<double>{length}, std::vector<long>{n});
}

inline ManifoldPtr torus2(long n, double length = 2.0 * kPi) {
  return std::make_shared<const TorusManifold>(std::vector<double>{length, length},
                                               std::vector<long>{n, n});
}

inline ManifoldPtr torus3(long n, double length = 2.0 * kPi) {
  return std::make_shared<const TorusManifold>(std::vector<double>{length, length, length},
                                               std::vector<long>{n, n, n});
}

inline Field from_function(const ManifoldPtr& m, auto&& f) {
  Field u(m);
  for (std::size_t i = 0; i < m->node_count(); ++i) u[i] = f(m->node_point(i));
  return u;
}

/// i.i.d. uniform values in [-1, 1].
inline Field random_field(const ManifoldPtr& m, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> d(-1.0, 1.0);
  Field u(m);
  for (std::size_t i = 0; i < u.size(); ++i) u[i] = d(rng);
  return u;
}

/// A few random low Fourier modes: smooth and periodic.
inline Field smooth_field(const ManifoldPtr& m, std::mt19937_64& rng, int modes = 4) {
  std::uniform_real_distribution<double> amp(-1.0, 1.0), phase(0.0, 2.0 * kPi);
  std::uniform_int_distribution<int> freq(0, 3);
  Field u(m);
  for (int k = 0; k < modes; ++k) {
    const double a = amp(rng), ph = phase(rng);
    std::vector<int> f(static_cast<std::size_t>(m->dim()));
    for (auto& fi : f) fi = freq(rng);
    for (std::size_t i = 0; i < u.size(); ++i) {
      const auto x = m->node_point(i);
      double arg = ph;
      for (int d = 0; d < m->dim(); ++d) arg += 2.0 * kPi * f[static_cast<std::size_t>(d)] * x[d] / m->length(d);
      u[i] += a * std::cos(arg);
    }
  }
  return u;
}

inline double max_abs(const Field& u) { return u.values().cwiseAbs().maxCoeff(); }

}  // namespace testing
