#include "vi/stepsize.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace vi {

SequenceRules paper_default_rules() {
  return SequenceRules{
      .theta = [](int k) { return 1.0 / (k + 1.0); },
      .zeta = [](int k) { return 1.0 / ((k + 1.0) * (k + 1.0)); },
      .varphi = [](int k) { return k / (2.0 * k + 1.0); },
      .a = 1.0 / 3.0,
  };
}

void validate_rules(const SequenceRules& rules, double vartheta, int horizon) {
  if (!rules.theta || !rules.zeta || !rules.varphi) {
    throw ContractViolation("sequence rules: theta, zeta and varphi must all be set");
  }
  if (!(rules.a > 0)) throw ContractViolation("sequence rules: a must be positive");
  double prev_ratio = std::numeric_limits<double>::infinity();
  for (int k = 1; k <= horizon; ++k) {
    const double th = rules.theta(k);
    const double ze = rules.zeta(k);
    const double vp = rules.varphi(k);
    const std::string at = " at k=" + std::to_string(k);
    if (!(th > 0 && th < 1)) throw ContractViolation("theta_k outside (0,1)" + at);
    if (!(ze > 0)) throw ContractViolation("zeta_k not positive" + at);
    if (!(vp >= rules.a && vp < 1.0 - vartheta)) {
      throw ContractViolation("varphi_k outside [a, 1 - vartheta)" + at);
    }
    const double ratio = ze / th;
    if (!(ratio < prev_ratio)) throw ContractViolation("zeta_k/theta_k not decreasing" + at);
    prev_ratio = ratio;
  }
}

SolverParams paper_preset() { return SolverParams{}; }

double inertial_xi(double xi, double zeta_k, const HVector& x_k, const HVector& x_km1) {
  if (!(xi > 0) || !(zeta_k > 0)) throw ContractViolation("inertial_xi: xi, zeta_k must be > 0");
  const double gap = distance(x_k, x_km1);
  if (gap > kIterateCoincidence * (1.0 + norm(x_k))) return std::min(zeta_k / gap, xi);
  return xi;
}

double adaptive_psi_next(double psi_k, double phi, const HVector& u, const HVector& y,
                         const HVector& Au, const HVector& Ay) {
  if (!(psi_k > 0)) throw ContractViolation("adaptive_psi_next: psi_k must be > 0");
  if (!(phi > 0 && phi < 1)) throw ContractViolation("adaptive_psi_next: phi outside (0,1)");
  const double op_gap = distance(Au, Ay);
  if (op_gap > kOperatorDifferenceFloor) return std::min(phi * distance(u, y) / op_gap, psi_k);
  return psi_k;
}

ArmijoResult armijo_psi(double alpha, double ell, double phi, const HVector& x,
                        const HVector& Ax, const Mapping& A, const FeasibleSet& C) {
  if (!(alpha > 0)) throw ContractViolation("armijo: alpha must be > 0");
  if (!(ell > 0 && ell < 1)) throw ContractViolation("armijo: ell outside (0,1)");
  if (!(phi > 0 && phi < 1)) throw ContractViolation("armijo: phi outside (0,1)");

  double psi = alpha;
  for (int m = 0; m <= kArmijoMaxTrials; ++m) {
    HVector y = project(C, x - psi * Ax);
    HVector Ay = A(y);
    if (psi * distance(Ax, Ay) <= phi * distance(x, y)) {
      return ArmijoResult{psi, std::move(y), std::move(Ay), m + 1};
    }
    psi *= ell;
  }
  throw LineSearchError("armijo: no admissible step after " +
                        std::to_string(kArmijoMaxTrials) +
                        " reductions; is A Lipschitz on this problem?");
}

ArmijoResult armijo_psi(double alpha, double ell, double phi, const HVector& x,
                        const Mapping& A, const FeasibleSet& C) {
  return armijo_psi(alpha, ell, phi, x, A(x), A, C);
}

}  // namespace vi
