#pragma once

#include "yamabe/manifold.hpp"

#include <Eigen/Core>

#include <memory>

namespace yamabe {

using ManifoldPtr = std::shared_ptr<const TorusManifold>;

/// Real grid function on a torus: the discrete stand-in for u in H_eps.
class Field {
 public:
  Field() = default;
  explicit Field(ManifoldPtr manifold);  // zero field
  Field(ManifoldPtr manifold, Eigen::VectorXd values);

  static Field constant(ManifoldPtr manifold, double value);

  const TorusManifold& manifold() const { return *manifold_; }
  const ManifoldPtr& manifold_ptr() const { return manifold_; }
  std::size_t size() const { return static_cast<std::size_t>(values_.size()); }

  const Eigen::VectorXd& values() const { return values_; }
  Eigen::VectorXd& values() { return values_; }
  double operator[](std::size_t i) const { return values_[static_cast<Eigen::Index>(i)]; }
  double& operator[](std::size_t i) { return values_[static_cast<Eigen::Index>(i)]; }

  bool all_finite() const { return values_.allFinite(); }
  void check_same_manifold(const Field& other) const;

  /// Field translated by a lattice vector: result(x) = (*this)(x - shift).
  Field translated(const MultiIndex& shift) const;

  Field& operator+=(const Field& o);
  Field& operator-=(const Field& o);
  Field& operator*=(double s);
  friend Field operator+(Field a, const Field& b) { return a += b; }
  friend Field operator-(Field a, const Field& b) { return a -= b; }
  friend Field operator*(double s, Field a) { return a *= s; }
  friend Field operator-(Field a) { return a *= -1.0; }

 private:
  ManifoldPtr manifold_;
  Eigen::VectorXd values_;
};

/// eps together with the dimensional constants of the equation
///   -eps^2 Lap u + (1 + s_g eps^2 / a) u = |u|^(p-2) u,
/// a = 4(n+m-1)/(n+m-2), p = 2(n+m)/(n+m-2).
///
/// The scalar curvature enters as a constant; on flat tori it is zero and the
/// coefficient is exactly 1.
class EpsParams {
 public:
  EpsParams(double eps, int base_dim, int fiber_dim, double scalar_curvature = 0.0);

  double eps() const { return eps_; }
  int base_dim() const { return n_; }
  int fiber_dim() const { return m_; }
  double a() const { return a_; }
  double p() const { return p_; }
  double scalar_curvature() const { return s_g_; }
  /// c(x) = 1 + s_g eps^2 / a (constant here).
  double coefficient() const { return coeff_; }
  double c_lo() const { return c_lo_; }
  double c_hi() const { return c_hi_; }
  /// eps^{-n}, the measure normalisation shared by every eps-weighted norm.
  double scale() const { return scale_; }

  void check_manifold(const TorusManifold& m) const;

 private:
  double eps_;
  int n_;
  int m_;
  double s_g_;
  double a_;
  double p_;
  double coeff_;
  double c_lo_;
  double c_hi_;
  double scale_;
};

enum class FormMode { plain, curved };

/// eps^{-n} sum [eps^2 <grad_h u, grad_h v> + kappa u v] w with forward
/// differences on every lattice edge. Summation by parts makes this equal to
/// the pairing of v against -eps^2 Lap_h u + kappa u; the edge form keeps
/// bilinear(u, v) == bilinear(v, u) bit for bit.
double bilinear(const Field& u, const Field& v, const EpsParams& params,
                FormMode mode = FormMode::curved);

/// L_eps(u, u).
inline double quadratic_form(const Field& u, const EpsParams& params) {
  return bilinear(u, u, params, FormMode::curved);
}

/// ||u||_eps, the norm of the plain inner product.
double eps_norm(const Field& u, const EpsParams& params);

/// eps^{-n} sum u v w, the L^2 duality pairing.
double l2_pairing(const Field& u, const Field& v, const EpsParams& params);

/// |u|_{q,eps} = (eps^{-n} sum |u|^q w)^{1/q}.
double lp_norm(const Field& u, double q, const EpsParams& params);
/// |u|_{q,eps}^q without the final root.
double lp_power(const Field& u, double q, const EpsParams& params);

struct SignSplit {
  Field plus;
  Field minus;
  /// Upper bound for dist_eps(u, P): L_eps(u_minus)^{1/2}.
  double gap_plus = 0.0;
  /// Upper bound for dist_eps(u, -P): L_eps(u_plus)^{1/2}.
  double gap_minus = 0.0;
};

SignSplit sign_split(const Field& u, const EpsParams& params);

/// Pointwise |u|^(p-2) u.
Field nonlinearity(const Field& u, double p);

}  // namespace yamabe
