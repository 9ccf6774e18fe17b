#include "yamabe/field.hpp"

#include "yamabe/errors.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace yamabe {

Field::Field(ManifoldPtr manifold) : manifold_(std::move(manifold)) {
  if (!manifold_) throw InvalidParameter("field needs a manifold");
  values_ = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(manifold_->node_count()));
}

Field::Field(ManifoldPtr manifold, Eigen::VectorXd values)
    : manifold_(std::move(manifold)), values_(std::move(values)) {
  if (!manifold_) throw InvalidParameter("field needs a manifold");
  if (static_cast<std::size_t>(values_.size()) != manifold_->node_count())
    throw DimensionMismatch("field has " + std::to_string(values_.size()) + " values for " +
                            std::to_string(manifold_->node_count()) + " nodes");
}

Field Field::constant(ManifoldPtr manifold, double value) {
  auto n = static_cast<Eigen::Index>(manifold->node_count());
  return Field(std::move(manifold), Eigen::VectorXd::Constant(n, value));
}

void Field::check_same_manifold(const Field& other) const {
  if (!manifold_ || !other.manifold_ || !manifold_->same_as(*other.manifold_))
    throw ManifoldMismatch("fields live on different manifolds");
}

Field Field::translated(const MultiIndex& shift) const {
  Field out(manifold_);
  const std::size_t n = size();
  for (std::size_t i = 0; i < n; ++i) out[manifold_->shift_node(i, shift)] = (*this)[i];
  return out;
}

Field& Field::operator+=(const Field& o) {
  check_same_manifold(o);
  values_ += o.values_;
  return *this;
}

Field& Field::operator-=(const Field& o) {
  check_same_manifold(o);
  values_ -= o.values_;
  return *this;
}

Field& Field::operator*=(double s) {
  values_ *= s;
  return *this;
}

EpsParams::EpsParams(double eps, int base_dim, int fiber_dim, double scalar_curvature)
    : eps_(eps), n_(base_dim), m_(fiber_dim), s_g_(scalar_curvature) {
  if (!(eps > 0.0) || !std::isfinite(eps)) throw InvalidParameter("eps must be positive");
  if (n_ < 1 || n_ > 3) throw InvalidParameter("base dimension must be 1, 2 or 3");
  if (m_ < 1) throw InvalidParameter("fiber dimension must be >= 1");
  const int nm = n_ + m_;
  if (nm <= 2) throw InvalidParameter("n + m must exceed 2 for the exponents to be defined");
  a_ = 4.0 * (nm - 1) / static_cast<double>(nm - 2);
  p_ = 2.0 * nm / static_cast<double>(nm - 2);
  coeff_ = 1.0 + s_g_ * eps_ * eps_ / a_;
  if (!(coeff_ > 0.0))
    throw CoercivityViolated("coefficient 1 + s_g eps^2/a = " + std::to_string(coeff_) +
                             " is not positive");
  c_lo_ = std::sqrt(std::min(1.0, coeff_));
  c_hi_ = std::sqrt(std::max(1.0, coeff_));
  scale_ = std::pow(eps_, -static_cast<double>(n_));
}

void EpsParams::check_manifold(const TorusManifold& m) const {
  if (m.dim() != n_)
    throw DimensionMismatch("params are for base dimension " + std::to_string(n_) +
                            ", manifold has dimension " + std::to_string(m.dim()));
}

double bilinear(const Field& u, const Field& v, const EpsParams& params, FormMode mode) {
  u.check_same_manifold(v);
  const TorusManifold& m = u.manifold();
  params.check_manifold(m);
  const auto& a = u.values();
  const auto& b = v.values();
  const std::size_t n = u.size();

  double grad = 0.0;
  for (int k = 0; k < m.dim(); ++k) {
    const double inv_h2 = 1.0 / (m.spacing(k) * m.spacing(k));
    double axis_sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const std::size_t j = m.neighbor(i, k, +1);
      const double du = a[static_cast<Eigen::Index>(j)] - a[static_cast<Eigen::Index>(i)];
      const double dv = b[static_cast<Eigen::Index>(j)] - b[static_cast<Eigen::Index>(i)];
      axis_sum += du * dv;
    }
    grad += axis_sum * inv_h2;
  }
  const double kappa = mode == FormMode::plain ? 1.0 : params.coefficient();
  const double mass = a.dot(b);
  const double e2 = params.eps() * params.eps();
  return params.scale() * m.quad_weight() * (e2 * grad + kappa * mass);
}

double eps_norm(const Field& u, const EpsParams& params) {
  return std::sqrt(std::max(0.0, bilinear(u, u, params, FormMode::plain)));
}

double l2_pairing(const Field& u, const Field& v, const EpsParams& params) {
  u.check_same_manifold(v);
  return params.scale() * u.manifold().quad_weight() * u.values().dot(v.values());
}

double lp_power(const Field& u, double q, const EpsParams& params) {
  if (!(q >= 1.0)) throw InvalidParameter("lp exponent must be >= 1");
  double s = 0.0;
  for (double x : u.values()) s += std::pow(std::abs(x), q);
  return params.scale() * u.manifold().quad_weight() * s;
}

double lp_norm(const Field& u, double q, const EpsParams& params) {
  return std::pow(lp_power(u, q, params), 1.0 / q);
}

SignSplit sign_split(const Field& u, const EpsParams& params) {
  SignSplit s{Field(u.manifold_ptr()), Field(u.manifold_ptr()), 0.0, 0.0};
  s.plus.values() = u.values().cwiseMax(0.0);
  s.minus.values() = (-u.values()).cwiseMax(0.0);
  s.gap_plus = std::sqrt(std::max(0.0, quadratic_form(s.minus, params)));
  s.gap_minus = std::sqrt(std::max(0.0, quadratic_form(s.plus, params)));
  return s;
}

Field nonlinearity(const Field& u, double p) {
  Field out(u.manifold_ptr());
  const double e = p - 2.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    const double x = u[i];
    out[i] = x == 0.0 ? 0.0 : std::pow(std::abs(x), e) * x;
  }
  return out;
}

}  // namespace yamabe
