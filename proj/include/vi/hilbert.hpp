#pragma once

#include <Eigen/Core>

#include <algorithm>
#include <cmath>
#include <functional>
#include <string>
#include <utility>

#include "vi/errors.hpp"

namespace vi {

enum class SpaceKind { Euclidean, GridL2 };

/// Identifies the Hilbert space a vector lives in: either R^n with the
/// standard dot product, or L2([0,1]) sampled on a uniform grid of
/// `points` nodes with trapezoidal quadrature weights.
class SpaceDescriptor {
 public:
  static SpaceDescriptor euclidean(Eigen::Index dim) {
    if (dim < 1) throw ContractViolation("euclidean space needs dim >= 1");
    return SpaceDescriptor(SpaceKind::Euclidean, dim);
  }

  static SpaceDescriptor grid_l2(Eigen::Index points) {
    if (points < 2) throw ContractViolation("grid L2 space needs points >= 2");
    return SpaceDescriptor(SpaceKind::GridL2, points);
  }

  SpaceKind kind() const noexcept { return kind_; }
  /// Number of coordinates (dimension, or number of grid nodes).
  Eigen::Index size() const noexcept { return size_; }
  bool is_grid() const noexcept { return kind_ == SpaceKind::GridL2; }

  /// Grid spacing h = 1/(points-1). Only meaningful for GridL2.
  double grid_step() const noexcept { return 1.0 / static_cast<double>(size_ - 1); }

  std::string describe() const {
    return (is_grid() ? "L2[0,1] grid(" : "R^(") + std::to_string(size_) + ")";
  }

  friend bool operator==(const SpaceDescriptor&, const SpaceDescriptor&) = default;

 private:
  SpaceDescriptor(SpaceKind kind, Eigen::Index size) : kind_(kind), size_(size) {}

  SpaceKind kind_;
  Eigen::Index size_;
};

inline void require_same_space(const SpaceDescriptor& a, const SpaceDescriptor& b,
                               const char* where) {
  if (!(a == b)) {
    throw ContractViolation(std::string(where) + ": space mismatch (" + a.describe() +
                            " vs " + b.describe() + ")");
  }
}

/// A point of a Hilbert space: coordinates plus the space they belong to.
/// Values are immutable once built; arithmetic produces new vectors.
template <typename Scalar>
class BasicHVector {
 public:
  using Coords = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

  BasicHVector(SpaceDescriptor space, Coords coords)
      : space_(space), coords_(std::move(coords)) {
    if (coords_.size() != space_.size()) {
      throw ContractViolation("coordinate count " + std::to_string(coords_.size()) +
                              " does not match " + space_.describe());
    }
  }

  static BasicHVector zero(SpaceDescriptor space) {
    return BasicHVector(space, Coords::Zero(space.size()));
  }

  static BasicHVector constant(SpaceDescriptor space, Scalar value) {
    return BasicHVector(space, Coords::Constant(space.size(), value));
  }

  const SpaceDescriptor& space() const noexcept { return space_; }
  const Coords& coords() const noexcept { return coords_; }
  Eigen::Index size() const noexcept { return coords_.size(); }
  Scalar operator[](Eigen::Index i) const { return coords_[i]; }

 private:
  SpaceDescriptor space_;
  Coords coords_;
};

using HVector = BasicHVector<double>;

/// Inner product of the space. For GridL2 this is the trapezoidal rule
/// applied to x(t)y(t): h * (sum x_i y_i - (x_0 y_0 + x_N y_N) / 2).
template <typename Scalar>
Scalar inner(const BasicHVector<Scalar>& x, const BasicHVector<Scalar>& y) {
  require_same_space(x.space(), y.space(), "inner");
  const auto& a = x.coords();
  const auto& b = y.coords();
  const Scalar dot = a.dot(b);
  if (!x.space().is_grid()) return dot;
  const Eigen::Index last = a.size() - 1;
  const Scalar h = static_cast<Scalar>(x.space().grid_step());
  return h * (dot - Scalar(0.5) * (a[0] * b[0] + a[last] * b[last]));
}

template <typename Scalar>
Scalar squared_norm(const BasicHVector<Scalar>& x) {
  // Clamp guards against a -0 from cancellation in the trapezoid endpoint term.
  return std::max(Scalar(0), inner(x, x));
}

template <typename Scalar>
Scalar norm(const BasicHVector<Scalar>& x) {
  return std::sqrt(squared_norm(x));
}

/// a*x + b*y.
template <typename Scalar>
BasicHVector<Scalar> lincomb(Scalar a, const BasicHVector<Scalar>& x, Scalar b,
                             const BasicHVector<Scalar>& y) {
  require_same_space(x.space(), y.space(), "lincomb");
  return BasicHVector<Scalar>(x.space(), a * x.coords() + b * y.coords());
}

template <typename Scalar>
BasicHVector<Scalar> operator+(const BasicHVector<Scalar>& x, const BasicHVector<Scalar>& y) {
  return lincomb(Scalar(1), x, Scalar(1), y);
}

template <typename Scalar>
BasicHVector<Scalar> operator-(const BasicHVector<Scalar>& x, const BasicHVector<Scalar>& y) {
  return lincomb(Scalar(1), x, Scalar(-1), y);
}

template <typename Scalar>
BasicHVector<Scalar> operator*(Scalar a, const BasicHVector<Scalar>& x) {
  return BasicHVector<Scalar>(x.space(), a * x.coords());
}

template <typename Scalar>
Scalar distance(const BasicHVector<Scalar>& x, const BasicHVector<Scalar>& y) {
  return norm(x - y);
}

template <typename Scalar>
bool all_finite(const BasicHVector<Scalar>& x) {
  return x.coords().allFinite();
}

/// Grid node t_i = i / (points - 1).
inline double grid_node(const SpaceDescriptor& space, Eigen::Index i) {
  return static_cast<double>(i) * space.grid_step();
}

/// Samples a function of t on the nodes of a GridL2 space.
inline HVector sample_on_grid(const SpaceDescriptor& space,
                              const std::function<double(double)>& fn) {
  if (!space.is_grid()) throw ContractViolation("sample_on_grid needs a GridL2 space");
  HVector::Coords c(space.size());
  for (Eigen::Index i = 0; i < c.size(); ++i) c[i] = fn(grid_node(space, i));
  return HVector(space, std::move(c));
}

}  // namespace vi
