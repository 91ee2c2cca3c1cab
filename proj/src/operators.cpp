#include "vi/operators.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <utility>

namespace vi {

namespace {

void require_in_range(const std::optional<double>& v, double lo, double hi, bool hi_open,
                      const char* what) {
  if (!v) return;
  const bool ok = *v >= lo && (hi_open ? *v < hi : *v <= hi) && std::isfinite(*v);
  if (!ok) throw ContractViolation(std::string("mapping meta: ") + what + " out of range");
}

}  // namespace

void MappingMeta::validate() const {
  const double inf = std::numeric_limits<double>::infinity();
  require_in_range(lipschitz, 0.0, inf, true, "lipschitz");
  require_in_range(strong_monotonicity, 0.0, inf, true, "strong_monotonicity");
  require_in_range(lipschitz_of_s, 0.0, inf, true, "lipschitz_of_s");
  require_in_range(demicontractive, 0.0, 1.0, true, "demicontractive");
  require_in_range(contraction, 0.0, 1.0, true, "contraction");
  if (strong_monotonicity && lipschitz_of_s) {
    if (!(*strong_monotonicity > 0 && *strong_monotonicity <= *lipschitz_of_s)) {
      throw ContractViolation("mapping meta: need 0 < eta <= kappa");
    }
  }
}

Mapping::Mapping(std::string name, Fn fn, MappingMeta meta)
    : name_(std::move(name)), fn_(std::move(fn)), meta_(meta) {
  meta_.validate();
}

HVector Mapping::operator()(const HVector& x) const {
  HVector out = fn_(x);
  require_same_space(x.space(), out.space(), name_.c_str());
  return out;
}

Mapping Mapping::scaled_identity(std::string name, double c, MappingMeta meta) {
  return Mapping(std::move(name), [c](const HVector& x) { return c * x; }, meta);
}

void check_problem(const Problem& p) {
  if (auto sp = space_of(p.C)) require_same_space(p.space, *sp, "problem feasible set");
  if (!p.known_solution) return;
  const HVector& xs = *p.known_solution;
  require_same_space(p.space, xs.space(), "problem known solution");
  if (vi_residual(p, xs) > 1e-9) {
    throw ContractViolation(p.name + ": known solution does not solve the VI");
  }
  if (distance(p.T(xs), xs) > 1e-9) {
    throw ContractViolation(p.name + ": known solution is not a fixed point of T");
  }
}

double vi_residual(const Problem& p, const HVector& x) {
  return distance(x, project(p.C, x - p.A(x)));
}

Eigen::VectorXd Rng::uniform_vector(Eigen::Index n, double lo, double hi) {
  Eigen::VectorXd v(n);
  for (Eigen::Index i = 0; i < n; ++i) v[i] = uniform(lo, hi);
  return v;
}

Eigen::MatrixXd Rng::uniform_matrix(Eigen::Index rows, Eigen::Index cols, double lo,
                                    double hi) {
  Eigen::MatrixXd m(rows, cols);
  // Row-major fill order so the stream consumption reads naturally.
  for (Eigen::Index i = 0; i < rows; ++i)
    for (Eigen::Index j = 0; j < cols; ++j) m(i, j) = uniform(lo, hi);
  return m;
}

HVector random_vector(const SpaceDescriptor& space, Rng& rng, double lo, double hi) {
  return HVector(space, rng.uniform_vector(space.size(), lo, hi));
}

double spectral_norm(const Eigen::MatrixXd& G) {
  if (G.rows() != G.cols()) throw ContractViolation("spectral_norm: matrix must be square");
  if (G.size() == 0) return 0.0;
  if (!G.allFinite()) throw ContractViolation("spectral_norm: non-finite entries");

  const Eigen::MatrixXd gram = G.transpose() * G;
  const Eigen::Index n = G.cols();

  auto power = [&](Eigen::VectorXd v) {
    double lambda = 0.0;
    for (int it = 0; it < 10000; ++it) {
      Eigen::VectorXd w = gram * v;
      const double wn = w.norm();
      if (wn == 0.0) return 0.0;
      const double next = v.dot(w);  // Rayleigh quotient, v has unit norm
      v = w / wn;
      if (it > 0 && std::abs(next - lambda) <= 1e-8 * std::abs(next)) return next;
      lambda = next;
    }
    return lambda;
  };

  double lambda = power(Eigen::VectorXd::Ones(n).normalized());
  if (lambda == 0.0 && gram.norm() > 0.0) {
    // The all-ones start was orthogonal to every active singular direction.
    Eigen::VectorXd alt(n);
    for (Eigen::Index i = 0; i < n; ++i) alt[i] = 1.0 + 0.5 * std::sin(1.0 + 3.0 * i);
    lambda = power(alt.normalized());
  }
  return std::sqrt(std::max(0.0, lambda));
}

Problem make_example1() {
  const auto space = SpaceDescriptor::euclidean(2);
  Mapping A(
      "A",
      [](const HVector& v) {
        const double x = v[0];
        const double y = v[1];
        HVector::Coords out(2);
        out << x + y + std::sin(x), -x + y + std::sin(y);
        return HVector(v.space(), std::move(out));
      },
      MappingMeta{.lipschitz = 3.0});

  // T x = D x / ||D|| with D = diag(1, 2) and the spectral norm ||D|| = 2.
  Mapping T(
      "T",
      [](const HVector& v) {
        HVector::Coords out(2);
        out << 0.5 * v[0], v[1];
        return HVector(v.space(), std::move(out));
      },
      MappingMeta{.demicontractive = 0.0});

  return Problem{
      .name = "ex1",
      .space = space,
      .A = std::move(A),
      .C = Box::uniform(space, -1.0, 1.0),
      .T = std::move(T),
      .S = Mapping::scaled_identity("S", 0.5,
                                    {.strong_monotonicity = 0.5, .lipschitz_of_s = 0.5}),
      .f = Mapping::scaled_identity("f", 0.5, {.lipschitz = 0.5, .contraction = 0.5}),
      .known_solution = HVector::zero(space),
  };
}

Eigen::MatrixXd example2_matrix(Eigen::Index n, std::uint64_t seed) {
  if (n < 1) throw ContractViolation("example2: n must be >= 1");
  Rng rng(seed);
  const Eigen::MatrixXd B = rng.uniform_matrix(n, n, 0.0, 2.0);
  const Eigen::MatrixXd M0 = rng.uniform_matrix(n, n, -2.0, 2.0);
  const Eigen::VectorXd e = rng.uniform_vector(n, 0.0, 2.0);
  const Eigen::MatrixXd M = 0.5 * (M0 - M0.transpose());
  Eigen::MatrixXd G = B * B.transpose() + M;
  G.diagonal() += e;
  return G;
}

Problem make_example2(Eigen::Index n, std::uint64_t seed) {
  const auto space = SpaceDescriptor::euclidean(n);
  Eigen::MatrixXd G = example2_matrix(n, seed);
  const double L = spectral_norm(G);

  Mapping A(
      "A",
      [G = std::move(G)](const HVector& x) { return HVector(x.space(), G * x.coords()); },
      MappingMeta{.lipschitz = L});

  return Problem{
      .name = "ex2",
      .space = space,
      .A = std::move(A),
      .C = Box::uniform(space, -2.0, 5.0),
      .T = Mapping::scaled_identity("T", 0.5, {.lipschitz = 0.5, .demicontractive = 0.0}),
      .S = Mapping::scaled_identity("S", 0.5,
                                    {.strong_monotonicity = 0.5, .lipschitz_of_s = 0.5}),
      .f = Mapping::scaled_identity("f", 0.5, {.lipschitz = 0.5, .contraction = 0.5}),
      .known_solution = HVector::zero(space),
  };
}

Problem make_example3(Eigen::Index points) {
  const auto space = SpaceDescriptor::grid_l2(points);

  Mapping A(
      "A",
      [](const HVector& x) { return HVector(x.space(), x.coords().cwiseMax(0.0)); },
      MappingMeta{.lipschitz = 1.0});

  // (Tx)(t) = t * integral_0^1 x(s) ds, integral by the same trapezoid rule
  // as the inner product: <x, 1>.
  Mapping T(
      "T",
      [](const HVector& x) {
        const double integral = inner(x, HVector::constant(x.space(), 1.0));
        return integral * sample_on_grid(x.space(), [](double t) { return t; });
      },
      MappingMeta{.demicontractive = 0.0});

  return Problem{
      .name = "ex3",
      .space = space,
      .A = std::move(A),
      .C = Ball(HVector::zero(space), 1.0),
      .T = std::move(T),
      .S = Mapping::scaled_identity("S", 0.5,
                                    {.strong_monotonicity = 0.5, .lipschitz_of_s = 0.5}),
      .f = Mapping::scaled_identity("f", 0.5, {.lipschitz = 0.5, .contraction = 0.5}),
      .known_solution = HVector::zero(space),
  };
}

}  // namespace vi
