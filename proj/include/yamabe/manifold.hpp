#pragma once

#include <Eigen/Core>

#include <array>
#include <cstddef>
#include <vector>

namespace yamabe {

using Point = Eigen::VectorXd;
using Tangent = Eigen::VectorXd;
using MultiIndex = std::array<long, 3>;

struct SeparatedNet {
  std::vector<std::size_t> nodes;
  double radius = 0.0;
  // Largest number of 3*radius balls (around net points) containing one node.
  int overlap_constant = 0;
  bool covers = false;
};

/// Flat n-torus (n = 1, 2, 3) sampled on a cell-centred uniform lattice.
///
/// Node i along axis k sits at (i + 1/2) * h_k with h_k = L_k / N_k. The
/// fundamental domain is [0, L_1) x ... x [0, L_n). Linear node indices run
/// fastest along axis 0. Instances are immutable.
class TorusManifold {
 public:
  TorusManifold(std::vector<double> lengths, std::vector<long> grid_sizes);

  int dim() const { return dim_; }
  double length(int axis) const { return lengths_[axis]; }
  long size(int axis) const { return sizes_[axis]; }
  double spacing(int axis) const { return spacings_[axis]; }
  const std::vector<double>& lengths() const { return lengths_; }
  const std::vector<long>& grid_sizes() const { return sizes_; }

  std::size_t node_count() const { return node_count_; }
  double quad_weight() const { return weight_; }
  double volume() const;
  /// R_0: sqrt(sum (L_i/2)^2).
  double diameter() const;
  /// r_0: min_i L_i / 2.
  double injectivity_radius() const;
  double scalar_curvature() const { return 0.0; }

  bool same_as(const TorusManifold& other) const;

  MultiIndex multi_index(std::size_t node) const;
  std::size_t linear_index(const MultiIndex& idx) const;  // wraps each axis
  Point node_point(std::size_t node) const;
  std::size_t nearest_node(const Point& x) const;
  std::size_t shift_node(std::size_t node, const MultiIndex& shift) const;
  std::size_t stride(int axis) const { return strides_[axis]; }
  /// Neighbouring node one step along `axis` (dir = +1 or -1), periodic.
  std::size_t neighbor(std::size_t node, int axis, int dir) const {
    const std::size_t n = static_cast<std::size_t>(sizes_[axis]);
    const std::size_t i = (node / strides_[axis]) % n;
    if (dir > 0) return i + 1 == n ? node - i * strides_[axis] : node + strides_[axis];
    return i == 0 ? node + (n - 1) * strides_[axis] : node - strides_[axis];
  }

  /// Geodesic distance with per-axis wrap-around.
  double dist(const Point& x, const Point& y) const;
  /// Node-to-node distance computed from wrapped index differences, so that
  /// distances that are exact multiples of the spacing come out exact.
  double node_dist(std::size_t a, std::size_t b) const;
  double offset_length(const MultiIndex& offset) const;

  Point wrap(const Point& x) const;
  /// Exponential chart: x + v reduced into the fundamental domain.
  Point exp(const Point& x, const Tangent& v) const;
  /// Inverse chart: the wrapped signed difference y - x. Throws
  /// InverseOutsideInjectivityRadius when dist(x, y) >= r_0.
  Tangent log(const Point& x, const Point& y) const;

  /// Greedy maximal set of nodes with pairwise distance >= 2*radius.
  SeparatedNet separated_net(double radius) const;

  /// Index offsets whose lattice length is <= radius, each wrapped offset
  /// listed once (clipped to the torus when the ball covers an axis).
  std::vector<MultiIndex> ball_offsets(double radius) const;

 private:
  void check_point(const Point& x) const;

  int dim_;
  std::vector<double> lengths_;
  std::vector<long> sizes_;
  std::vector<double> spacings_;
  std::array<std::size_t, 3> strides_{};
  std::size_t node_count_;
  double weight_;
};

}  // namespace yamabe
