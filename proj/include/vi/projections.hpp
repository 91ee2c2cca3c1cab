#pragma once

#include <optional>
#include <variant>

#include "vi/hilbert.hpp"

namespace vi {

/// Normals shorter than this make a half-space degenerate (whole space).
inline constexpr double kDegenerateNormal = 1e-14;
/// Absolute tolerance on constraint residuals for membership tests.
inline constexpr double kMembershipTol = 1e-12;

/// Componentwise box {x : lower <= x <= upper}.
template <typename Scalar>
class BasicBox {
 public:
  BasicBox(BasicHVector<Scalar> lower, BasicHVector<Scalar> upper)
      : lower_(std::move(lower)), upper_(std::move(upper)) {
    require_same_space(lower_.space(), upper_.space(), "box");
    if ((lower_.coords().array() > upper_.coords().array()).any()) {
      throw ContractViolation("box: lower bound exceeds upper bound");
    }
  }

  /// [lo, hi]^n in the given space.
  static BasicBox uniform(const SpaceDescriptor& space, Scalar lo, Scalar hi) {
    return BasicBox(BasicHVector<Scalar>::constant(space, lo),
                    BasicHVector<Scalar>::constant(space, hi));
  }

  const BasicHVector<Scalar>& lower() const noexcept { return lower_; }
  const BasicHVector<Scalar>& upper() const noexcept { return upper_; }
  const SpaceDescriptor& space() const noexcept { return lower_.space(); }

 private:
  BasicHVector<Scalar> lower_;
  BasicHVector<Scalar> upper_;
};

/// Closed ball {x : ||x - center|| <= radius} in the norm of the space.
template <typename Scalar>
class BasicBall {
 public:
  BasicBall(BasicHVector<Scalar> center, Scalar radius)
      : center_(std::move(center)), radius_(radius) {
    if (!(radius_ > 0)) throw ContractViolation("ball: radius must be positive");
  }

  const BasicHVector<Scalar>& center() const noexcept { return center_; }
  Scalar radius() const noexcept { return radius_; }
  const SpaceDescriptor& space() const noexcept { return center_.space(); }

 private:
  BasicHVector<Scalar> center_;
  Scalar radius_;
};

/// {x : <normal, x> <= offset}. A (numerically) zero normal with a
/// nonnegative offset is the whole space; with a negative offset (beyond the
/// membership tolerance) the set is empty and construction fails.
template <typename Scalar>
class BasicHalfSpace {
 public:
  BasicHalfSpace(BasicHVector<Scalar> normal, Scalar offset)
      : normal_(std::move(normal)), offset_(offset), normal_sq_(squared_norm(normal_)) {
    if (degenerate() && offset_ < -Scalar(kMembershipTol)) {
      throw ContractViolation("half-space: zero normal with negative offset is empty");
    }
  }

  const BasicHVector<Scalar>& normal() const noexcept { return normal_; }
  Scalar offset() const noexcept { return offset_; }
  Scalar normal_squared_norm() const noexcept { return normal_sq_; }
  bool degenerate() const noexcept { return std::sqrt(normal_sq_) < kDegenerateNormal; }
  const SpaceDescriptor& space() const noexcept { return normal_.space(); }

  /// <normal, x> - offset; nonpositive inside.
  Scalar violation(const BasicHVector<Scalar>& x) const { return inner(normal_, x) - offset_; }

 private:
  BasicHVector<Scalar> normal_;
  Scalar offset_;
  Scalar normal_sq_;
};

struct WholeSpace {};

template <typename Scalar>
using BasicFeasibleSet =
    std::variant<BasicBox<Scalar>, BasicBall<Scalar>, BasicHalfSpace<Scalar>, WholeSpace>;

using Box = BasicBox<double>;
using Ball = BasicBall<double>;
using HalfSpace = BasicHalfSpace<double>;
using FeasibleSet = BasicFeasibleSet<double>;

/// Space of the vectors defining the set; empty for WholeSpace.
template <typename Scalar>
std::optional<SpaceDescriptor> space_of(const BasicFeasibleSet<Scalar>& set) {
  return std::visit(
      [](const auto& s) -> std::optional<SpaceDescriptor> {
        if constexpr (std::is_same_v<std::decay_t<decltype(s)>, WholeSpace>) {
          return std::nullopt;
        } else {
          return s.space();
        }
      },
      set);
}

/// Metric projection P_S(x) = argmin_{y in S} ||x - y||.
template <typename Scalar>
BasicHVector<Scalar> project(const BasicFeasibleSet<Scalar>& set, const BasicHVector<Scalar>& x) {
  if (auto sp = space_of(set)) require_same_space(*sp, x.space(), "project");

  struct Visitor {
    const BasicHVector<Scalar>& x;

    BasicHVector<Scalar> operator()(const BasicBox<Scalar>& box) const {
      // Componentwise clipping; the grid weights are diagonal so this is
      // the metric projection in both spaces.
      return BasicHVector<Scalar>(
          x.space(),
          x.coords().cwiseMax(box.lower().coords()).cwiseMin(box.upper().coords()));
    }

    BasicHVector<Scalar> operator()(const BasicBall<Scalar>& ball) const {
      const auto offset = x - ball.center();
      const Scalar dist = norm(offset);
      if (dist <= ball.radius()) return x;
      return lincomb(Scalar(1), ball.center(), ball.radius() / dist, offset);
    }

    BasicHVector<Scalar> operator()(const BasicHalfSpace<Scalar>& h) const {
      if (h.degenerate()) return x;
      const Scalar excess = h.violation(x);
      if (excess <= 0) return x;
      return lincomb(Scalar(1), x, -excess / h.normal_squared_norm(), h.normal());
    }

    BasicHVector<Scalar> operator()(const WholeSpace&) const { return x; }
  };
  return std::visit(Visitor{x}, set);
}

/// Membership up to an absolute tolerance on the constraint residual.
template <typename Scalar>
bool contains(const BasicFeasibleSet<Scalar>& set, const BasicHVector<Scalar>& x,
              Scalar tol = Scalar(kMembershipTol)) {
  if (auto sp = space_of(set)) require_same_space(*sp, x.space(), "contains");

  struct Visitor {
    const BasicHVector<Scalar>& x;
    Scalar tol;

    bool operator()(const BasicBox<Scalar>& box) const {
      return ((x.coords() - box.lower().coords()).array() >= -tol).all() &&
             ((box.upper().coords() - x.coords()).array() >= -tol).all();
    }
    bool operator()(const BasicBall<Scalar>& ball) const {
      return distance(x, ball.center()) <= ball.radius() + tol;
    }
    bool operator()(const BasicHalfSpace<Scalar>& h) const {
      return h.degenerate() || h.violation(x) <= tol;
    }
    bool operator()(const WholeSpace&) const { return true; }
  };
  return std::visit(Visitor{x, tol}, set);
}

/// The half-space H = {x : <u - psi*Au - y, x - y> <= 0} used by the
/// subgradient extragradient correction. It contains C whenever
/// y = P_C(u - psi*Au), and y sits on its boundary.
template <typename Scalar>
BasicHalfSpace<Scalar> halfspace_for_subgradient_step(const BasicHVector<Scalar>& u, Scalar psi,
                                                       const BasicHVector<Scalar>& Au,
                                                       const BasicHVector<Scalar>& y) {
  require_same_space(u.space(), Au.space(), "halfspace_for_subgradient_step");
  require_same_space(u.space(), y.space(), "halfspace_for_subgradient_step");
  auto normal = u - psi * Au - y;
  const Scalar offset = inner(normal, y);
  return BasicHalfSpace<Scalar>(std::move(normal), offset);
}

}  // namespace vi
