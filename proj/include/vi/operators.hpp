#pragma once

#include <Eigen/Core>

#include <cstdint>
#include <functional>
#include <optional>
#include <random>
#include <string>

#include "vi/hilbert.hpp"
#include "vi/projections.hpp"

namespace vi {

/// Constants known about a mapping. Every field is optional; algorithms
/// that need one check for it before running.
struct MappingMeta {
  std::optional<double> lipschitz{};            // L
  std::optional<double> strong_monotonicity{};  // eta
  std::optional<double> lipschitz_of_s{};       // kappa, for the steering map S
  std::optional<double> demicontractive{};      // vartheta in [0,1)
  std::optional<double> contraction{};          // rho in [0,1)

  /// Throws ContractViolation when the constants are inconsistent
  /// (negative values, vartheta or rho outside [0,1), eta > kappa).
  void validate() const;
};

/// A nonlinear map H -> H with its metadata. Application checks that the
/// result stays in the input's space.
class Mapping {
 public:
  using Fn = std::function<HVector(const HVector&)>;

  Mapping(std::string name, Fn fn, MappingMeta meta = {});

  HVector operator()(const HVector& x) const;

  const std::string& name() const noexcept { return name_; }
  const MappingMeta& meta() const noexcept { return meta_; }

  /// x -> c * x.
  static Mapping scaled_identity(std::string name, double c, MappingMeta meta = {});

 private:
  std::string name_;
  Fn fn_;
  MappingMeta meta_;
};

/// A VI / fixed-point instance: find x in C solving the VI for A with Tx = x.
/// S steers the hybrid steepest-descent step; f is the viscosity contraction.
struct Problem {
  std::string name;
  SpaceDescriptor space;
  Mapping A;
  FeasibleSet C;
  Mapping T;
  Mapping S;
  std::optional<Mapping> f;
  std::optional<HVector> known_solution;
};

/// Checks the structural invariants of a problem: shared space, sane
/// metadata, and (when a solution is known) that it solves both the VI and
/// the fixed-point problem to 1e-9.
void check_problem(const Problem& p);

/// ||x - P_C(x - A x)||, zero exactly at VI solutions.
double vi_residual(const Problem& p, const HVector& x);

/// Deterministic generator for every randomized construction: the standard
/// 64-bit Mersenne Twister, with uniform draws built from its top 53 bits
/// so values do not depend on the standard library's distributions.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  /// Uniform in [0, 1).
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  /// Uniform in [lo, hi).
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  Eigen::VectorXd uniform_vector(Eigen::Index n, double lo, double hi);
  Eigen::MatrixXd uniform_matrix(Eigen::Index rows, Eigen::Index cols, double lo, double hi);

 private:
  std::mt19937_64 engine_;
};

/// Random point of a space with coordinates uniform in [lo, hi).
HVector random_vector(const SpaceDescriptor& space, Rng& rng, double lo = -1.0, double hi = 1.0);

/// Largest singular value of a square matrix by power iteration on G^T G
/// (at most 10000 sweeps, relative tolerance 1e-8, start vector all-ones).
double spectral_norm(const Eigen::MatrixXd& G);

/// Two-dimensional nonlinear test problem on the box [-1,1]^2:
/// A(x, y) = (x + y + sin x, -x + y + sin y), T = diag(1/2, 1), S = f = x/2.
Problem make_example1();

/// The matrix G = B B^T + M + E of the linear test problem; B and E (diagonal)
/// uniform in [0,2], M skew-symmetric from (M0 - M0^T)/2 with M0 uniform in [-2,2].
Eigen::MatrixXd example2_matrix(Eigen::Index n, std::uint64_t seed);

/// Linear monotone problem A(x) = G x on the box [-2,5]^n with T = S = f = x/2.
Problem make_example2(Eigen::Index n, std::uint64_t seed);

/// L2([0,1]) problem on a uniform grid: A = positive part, C = unit ball,
/// (Tx)(t) = t * integral of x, S = f = x/2.
Problem make_example3(Eigen::Index points);

}  // namespace vi
