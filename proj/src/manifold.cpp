#include "yamabe/manifold.hpp"

#include "yamabe/errors.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace yamabe {

namespace {

// Relative slack for ">= 2*radius" comparisons on lattice distances.
constexpr double kSeparationSlack = 1e-12;

long wrapped_index_gap(long a, long b, long n) {
  long d = std::abs(a - b) % n;
  return std::min(d, n - d);
}

}  // namespace

TorusManifold::TorusManifold(std::vector<double> lengths, std::vector<long> grid_sizes)
    : dim_(static_cast<int>(lengths.size())),
      lengths_(std::move(lengths)),
      sizes_(std::move(grid_sizes)) {
  if (dim_ < 1 || dim_ > 3)
    throw InvalidManifold("torus dimension must be 1, 2 or 3, got " + std::to_string(dim_));
  if (static_cast<int>(sizes_.size()) != dim_)
    throw DimensionMismatch("lengths and grid sizes differ in dimension");
  node_count_ = 1;
  weight_ = 1.0;
  for (int k = 0; k < dim_; ++k) {
    if (!(lengths_[k] > 0.0) || !std::isfinite(lengths_[k]))
      throw InvalidManifold("torus period must be positive and finite");
    if (sizes_[k] < 8) throw InvalidManifold("grid needs at least 8 nodes per axis");
    spacings_.push_back(lengths_[k] / static_cast<double>(sizes_[k]));
    strides_[k] = node_count_;
    node_count_ *= static_cast<std::size_t>(sizes_[k]);
    weight_ *= spacings_[k];
  }
}

double TorusManifold::volume() const {
  double v = 1.0;
  for (double l : lengths_) v *= l;
  return v;
}

double TorusManifold::diameter() const {
  double s = 0.0;
  for (double l : lengths_) s += 0.25 * l * l;
  return std::sqrt(s);
}

double TorusManifold::injectivity_radius() const {
  return 0.5 * *std::min_element(lengths_.begin(), lengths_.end());
}

bool TorusManifold::same_as(const TorusManifold& other) const {
  return this == &other || (lengths_ == other.lengths_ && sizes_ == other.sizes_);
}

MultiIndex TorusManifold::multi_index(std::size_t node) const {
  MultiIndex idx{0, 0, 0};
  for (int k = 0; k < dim_; ++k) {
    idx[k] = static_cast<long>(node % static_cast<std::size_t>(sizes_[k]));
    node /= static_cast<std::size_t>(sizes_[k]);
  }
  return idx;
}

std::size_t TorusManifold::linear_index(const MultiIndex& idx) const {
  std::size_t lin = 0;
  for (int k = 0; k < dim_; ++k) {
    long i = idx[k] % sizes_[k];
    if (i < 0) i += sizes_[k];
    lin += static_cast<std::size_t>(i) * strides_[k];
  }
  return lin;
}

Point TorusManifold::node_point(std::size_t node) const {
  MultiIndex idx = multi_index(node);
  Point x(dim_);
  for (int k = 0; k < dim_; ++k) x[k] = (static_cast<double>(idx[k]) + 0.5) * spacings_[k];
  return x;
}

std::size_t TorusManifold::nearest_node(const Point& x) const {
  check_point(x);
  Point y = wrap(x);
  MultiIndex idx{0, 0, 0};
  for (int k = 0; k < dim_; ++k) idx[k] = std::lround(std::floor(y[k] / spacings_[k]));
  return linear_index(idx);
}

std::size_t TorusManifold::shift_node(std::size_t node, const MultiIndex& shift) const {
  MultiIndex idx = multi_index(node);
  for (int k = 0; k < dim_; ++k) idx[k] += shift[k];
  return linear_index(idx);
}

void TorusManifold::check_point(const Point& x) const {
  if (x.size() != dim_)
    throw DimensionMismatch("point has dimension " + std::to_string(x.size()) +
                            ", manifold has " + std::to_string(dim_));
}

double TorusManifold::dist(const Point& x, const Point& y) const {
  check_point(x);
  check_point(y);
  double s = 0.0;
  for (int k = 0; k < dim_; ++k) {
    double d = std::fmod(std::abs(x[k] - y[k]), lengths_[k]);
    d = std::min(d, lengths_[k] - d);
    s += d * d;
  }
  return std::sqrt(s);
}

double TorusManifold::node_dist(std::size_t a, std::size_t b) const {
  MultiIndex ia = multi_index(a);
  MultiIndex ib = multi_index(b);
  double s = 0.0;
  for (int k = 0; k < dim_; ++k) {
    double d = static_cast<double>(wrapped_index_gap(ia[k], ib[k], sizes_[k])) * spacings_[k];
    s += d * d;
  }
  return std::sqrt(s);
}

double TorusManifold::offset_length(const MultiIndex& offset) const {
  double s = 0.0;
  for (int k = 0; k < dim_; ++k) {
    double d = static_cast<double>(wrapped_index_gap(offset[k], 0, sizes_[k])) * spacings_[k];
    s += d * d;
  }
  return std::sqrt(s);
}

Point TorusManifold::wrap(const Point& x) const {
  check_point(x);
  Point y(dim_);
  for (int k = 0; k < dim_; ++k) {
    double v = std::fmod(x[k], lengths_[k]);
    if (v < 0.0) v += lengths_[k];
    if (v >= lengths_[k]) v = 0.0;
    y[k] = v;
  }
  return y;
}

Point TorusManifold::exp(const Point& x, const Tangent& v) const {
  check_point(x);
  check_point(v);
  return wrap(x + v);
}

Tangent TorusManifold::log(const Point& x, const Point& y) const {
  check_point(x);
  check_point(y);
  Tangent v(dim_);
  for (int k = 0; k < dim_; ++k) {
    const double len = lengths_[k];
    double d = std::remainder(y[k] - x[k], len);  // in [-L/2, L/2]
    v[k] = d;
  }
  if (v.norm() >= injectivity_radius())
    throw InverseOutsideInjectivityRadius("log: distance " + std::to_string(v.norm()) +
                                          " >= injectivity radius " +
                                          std::to_string(injectivity_radius()));
  return v;
}

SeparatedNet TorusManifold::separated_net(double radius) const {
  if (!(radius > 0.0)) throw InvalidParameter("separated_net radius must be positive");
  SeparatedNet net;
  net.radius = radius;
  const double sep = 2.0 * radius * (1.0 - kSeparationSlack);
  for (std::size_t i = 0; i < node_count_; ++i) {
    bool ok = true;
    for (std::size_t c : net.nodes) {
      if (node_dist(i, c) < sep) {
        ok = false;
        break;
      }
    }
    if (ok) net.nodes.push_back(i);
  }
  net.covers = true;
  const double cover = 2.0 * radius * (1.0 + kSeparationSlack);
  const double triple = 3.0 * radius;
  for (std::size_t i = 0; i < node_count_; ++i) {
    bool covered = false;
    int count = 0;
    for (std::size_t c : net.nodes) {
      double d = node_dist(i, c);
      if (d <= cover) covered = true;
      if (d < triple) ++count;
    }
    net.covers = net.covers && covered;
    net.overlap_constant = std::max(net.overlap_constant, count);
  }
  return net;
}

std::vector<MultiIndex> TorusManifold::ball_offsets(double radius) const {
  std::array<long, 3> lo{0, 0, 0}, hi{0, 0, 0};
  for (int k = 0; k < dim_; ++k) {
    long reach = static_cast<long>(std::floor(radius / spacings_[k])) + 1;
    // each residue class mod N_k once: [-floor((N-1)/2), ceil((N-1)/2)]
    lo[k] = std::max(-reach, -(sizes_[k] - 1) / 2);
    hi[k] = std::min(reach, sizes_[k] / 2);
  }
  std::vector<MultiIndex> out;
  for (long c = lo[2]; c <= hi[2]; ++c)
    for (long b = lo[1]; b <= hi[1]; ++b)
      for (long a = lo[0]; a <= hi[0]; ++a) {
        MultiIndex o{a, b, c};
        if (offset_length(o) <= radius) out.push_back(o);
      }
  return out;
}

}  // namespace yamabe
