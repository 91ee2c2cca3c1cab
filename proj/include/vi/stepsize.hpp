#pragma once

#include <functional>

#include "vi/hilbert.hpp"
#include "vi/operators.hpp"
#include "vi/projections.hpp"

namespace vi {

/// Iterates closer than this (relative to 1 + ||x^k||) count as equal when
/// choosing the inertial weight.
inline constexpr double kIterateCoincidence = 1e-14;
/// Operator differences at or below this norm leave the step size unchanged.
inline constexpr double kOperatorDifferenceFloor = 1e-14;
/// Maximum number of backtracking reductions in the Armijo search.
inline constexpr int kArmijoMaxTrials = 100;

/// Scalar sequences indexed by the 1-based iteration counter k.
///
/// theta must be in (0,1), tend to zero and have a divergent sum; zeta must
/// be positive with zeta/theta -> 0; varphi must stay in [a, 1 - vartheta).
/// The divergent-sum condition cannot be checked numerically and is the
/// caller's responsibility.
struct SequenceRules {
  std::function<double(int)> theta;
  std::function<double(int)> zeta;
  std::function<double(int)> varphi;
  double a = 0.0;
};

/// theta_k = 1/(k+1), zeta_k = 1/(k+1)^2, varphi_k = k/(2k+1), a = 1/3.
SequenceRules paper_default_rules();

/// Checks the sequence conditions on k = 1..horizon: theta in (0,1),
/// zeta > 0, zeta/theta strictly decreasing, a <= varphi < 1 - vartheta.
/// Throws ContractViolation naming the first failing condition.
void validate_rules(const SequenceRules& rules, double vartheta, int horizon = 10000);

struct SolverParams {
  double xi = 0.4;     // inertial cap
  double psi1 = 0.9;   // initial adaptive step
  double phi = 0.5;    // step-size safety factor
  double sigma = 0.5;  // hybrid steepest-descent weight
  SequenceRules rules = paper_default_rules();
  double armijo_alpha = 0.5;
  double armijo_ell = 0.5;
  double armijo_phi = 0.4;
  double fixed_step_scale = 0.99;  // fixed-step baseline uses scale / L
  int max_iter = 400;
};

/// The settings used for every algorithm in the benchmark experiments.
SolverParams paper_preset();

/// Inertial weight: min{zeta_k / ||x_k - x_km1||, xi} when the iterates
/// differ, xi otherwise.
double inertial_xi(double xi, double zeta_k, const HVector& x_k, const HVector& x_km1);

/// Next adaptive step: min{phi ||u - y|| / ||Au - Ay||, psi_k}, or psi_k
/// when Au and Ay coincide. Never exceeds psi_k.
double adaptive_psi_next(double psi_k, double phi, const HVector& u, const HVector& y,
                         const HVector& Au, const HVector& Ay);

struct ArmijoResult {
  double psi;
  HVector y;   // P_C(x - psi * A x)
  HVector Ay;  // A evaluated at y
  int trials;  // number of step sizes tried
};

/// Largest psi in {alpha, alpha*ell, alpha*ell^2, ...} with
/// psi ||Ax - Ay(psi)|| <= phi ||x - y(psi)||, y(psi) = P_C(x - psi Ax).
/// Throws LineSearchError after kArmijoMaxTrials reductions.
ArmijoResult armijo_psi(double alpha, double ell, double phi, const HVector& x,
                        const HVector& Ax, const Mapping& A, const FeasibleSet& C);

/// Overload that evaluates A x itself.
ArmijoResult armijo_psi(double alpha, double ell, double phi, const HVector& x,
                        const Mapping& A, const FeasibleSet& C);

}  // namespace vi
