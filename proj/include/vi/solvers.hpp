#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "vi/hilbert.hpp"
#include "vi/operators.hpp"
#include "vi/stepsize.hpp"

namespace vi {

enum class AlgorithmId {
  ISEGM,           // inertial subgradient extragradient + hybrid steepest descent
  ITEGM,           // inertial Tseng extragradient + hybrid steepest descent
  COR1_HALPERN,    // ISEGM with a Halpern anchor instead of S
  COR2_VISCOSITY,  // ITEGM with a viscosity map f instead of S
  HSEGM,           // Halpern subgradient extragradient, fixed step
  VSEGM,           // viscosity subgradient extragradient
  VTEGM,           // viscosity Tseng extragradient
  STEGM,           // Tseng extragradient with Armijo step + hybrid steepest descent
};

inline constexpr std::array<AlgorithmId, 8> kAllAlgorithms = {
    AlgorithmId::ISEGM, AlgorithmId::ITEGM, AlgorithmId::COR1_HALPERN,
    AlgorithmId::COR2_VISCOSITY, AlgorithmId::HSEGM, AlgorithmId::VSEGM,
    AlgorithmId::VTEGM, AlgorithmId::STEGM};

std::string_view to_string(AlgorithmId id);
std::string_view describe(AlgorithmId id);
/// Case-insensitive; accepts the enum spelling ("COR1_HALPERN") and the
/// short forms "cor1" / "cor2".
std::optional<AlgorithmId> parse_algorithm(std::string_view name);

bool uses_subgradient_step(AlgorithmId id);
bool uses_tseng_step(AlgorithmId id);

/// Iteration state: x^{k-1}, x^k, the current step psi_k and the anchor x^0.
struct SolverState {
  int k = 1;
  HVector x_prev;
  HVector x_cur;
  double psi;
  HVector x0;
};

/// Everything computed during one transition x^k -> x^{k+1}.
struct StepReport {
  HVector u;  // extrapolated point (x^k itself for non-inertial methods)
  HVector y;  // P_C(u - psi_k A u)
  HVector z;  // corrected point
  HVector q;  // Mann point (1 - varphi_k) z + varphi_k T z; T z for HSEGM
  double xi_k = 0.0;
  double psi_k = 0.0;
  double psi_next = 0.0;
  double residual_uy = 0.0;  // ||u - y||
  double residual_Tz = 0.0;  // ||T z - z||
  /// <u - psi Au - y, z - y> for subgradient methods, nonpositive by construction.
  std::optional<double> halfspace_slack{};
  /// Both sides of the per-iteration distance inequality at the known
  /// solution, when the problem has one and the method has such a bound.
  std::optional<std::pair<double, double>> lemma_lhs_rhs{};
  int operator_evaluations = 0;
};

struct StepResult {
  SolverState state;
  StepReport report;
};

/// Rejects parameter / problem combinations the algorithm cannot run
/// (missing metadata, sigma outside (0, 2 eta / kappa^2), bad sequences).
/// Throws ConfigurationError.
void validate_params(const Problem& p, AlgorithmId alg, const SolverParams& params);

/// Initial state at k = 1 with x^0 = x^1 unless a separate anchor is given.
SolverState initial_state(const Problem& p, AlgorithmId alg, const SolverParams& params,
                          const HVector& x1, const std::optional<HVector>& x0 = std::nullopt);

/// Fixed step of the Halpern baseline: scale / L.
double fixed_step(const Problem& p, const SolverParams& params);

StepResult step_isegm(const SolverState& s, const Problem& p, const SolverParams& params);
StepResult step_itegm(const SolverState& s, const Problem& p, const SolverParams& params);
StepResult step_cor1(const SolverState& s, const Problem& p, const SolverParams& params);
StepResult step_cor2(const SolverState& s, const Problem& p, const SolverParams& params);
StepResult step_hsegm(const SolverState& s, const Problem& p, const SolverParams& params);
StepResult step_vsegm(const SolverState& s, const Problem& p, const SolverParams& params);
StepResult step_vtegm(const SolverState& s, const Problem& p, const SolverParams& params);
StepResult step_stegm(const SolverState& s, const Problem& p, const SolverParams& params);

StepResult step(AlgorithmId alg, const SolverState& s, const Problem& p,
                const SolverParams& params);

struct StopRule {
  int max_iter = 400;
  /// Early exit once D_k <= tol; ignored without a known solution.
  std::optional<double> tol;
};

struct TraceRow {
  int k;
  double D_k;  // ||x^k - x*||, NaN without a known solution
  double psi_k;
  double xi_k;
  double residual_uy;
  double residual_Tz;
  double elapsed_s;  // cumulative wall clock through step k
};

struct IterationTrace {
  AlgorithmId algorithm;
  std::vector<TraceRow> rows;
  HVector final_x;
  bool complete = true;
  std::string error{};
};

/// Called after every step with the pre-step state and the step report.
using StepObserver = std::function<void(const SolverState&, const StepReport&)>;

/// Iterates from x^1 (and anchor x^0) until the stop rule fires. Row k
/// holds D_k for x^k and the quantities of the step that produced x^{k+1}.
/// Configuration problems throw; a failure inside a step ends the run with
/// `complete = false` and the partial trace.
IterationTrace run(const Problem& p, AlgorithmId alg, const SolverParams& params,
                   const StopRule& stop, const HVector& x1,
                   const std::optional<HVector>& x0 = std::nullopt,
                   const StepObserver& observer = {});

// ---------------------------------------------------------------------------
// Diagnostics

/// gamma = 1 - sqrt(1 - sigma (2 eta - sigma kappa^2)) and the weight theta;
/// (I - theta sigma S) U contracts with factor 1 - theta gamma.
struct ContractionDiagnostics {
  double gamma;
  double theta;
  double bound() const { return 1.0 - theta * gamma; }
};

/// Requires 0 < eta <= kappa and 0 < sigma < 2 eta / kappa^2.
double contraction_gamma(double sigma, double eta, double kappa);

struct ContractionCheck {
  ContractionDiagnostics diagnostics;
  double max_ratio;
};

/// Samples random pairs x, y of `space` and reports the worst observed
/// ||V x - V y|| / ||x - y|| for V = (I - theta sigma S) U. U must be
/// nonexpansive (identity or a projection).
ContractionCheck verify_contraction(const Mapping& S,
                                    const std::function<HVector(const HVector&)>& U,
                                    double sigma, double theta, const SpaceDescriptor& space,
                                    int samples, std::uint64_t seed);

struct InequalitySides {
  double lhs;
  double rhs;
};

/// ||z - x||^2 versus ||u - x||^2 - c ||y - u||^2 - c ||z - y||^2 with
/// c = 1 - phi psi_k / psi_{k+1}: the distance bound of the subgradient step.
InequalitySides subgradient_inequality_sides(const StepReport& r, const HVector& x_dag,
                                             double phi, double psi_k, double psi_k1);

/// ||z - x||^2 versus ||u - x||^2 - (1 - phi^2 psi_k^2 / psi_{k+1}^2) ||u - y||^2:
/// the distance bound of the Tseng step.
InequalitySides tseng_inequality_sides(const StepReport& r, const HVector& x_dag, double phi,
                                       double psi_k, double psi_k1);

/// True iff the subgradient-step distance bound holds within `slack`.
bool verify_iteration_inequality(const StepReport& r, const HVector& x_dag, double phi,
                                 double psi_k, double psi_k1, double slack = 1e-9);

/// True iff ||z - y|| <= phi (psi_k / psi_{k+1}) ||u - y|| + slack.
bool verify_tseng_residual(const StepReport& r, double phi, double psi_k, double psi_k1,
                           double slack = 1e-9);

}  // namespace vi
