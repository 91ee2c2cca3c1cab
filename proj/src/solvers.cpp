#include "vi/solvers.hpp"

#include <algorithm>
#include <cctype>
#include <chrono>
#include <cmath>
#include <limits>

#include "vi/projections.hpp"

namespace vi {

std::string_view to_string(AlgorithmId id) {
  switch (id) {
    case AlgorithmId::ISEGM: return "ISEGM";
    case AlgorithmId::ITEGM: return "ITEGM";
    case AlgorithmId::COR1_HALPERN: return "COR1_HALPERN";
    case AlgorithmId::COR2_VISCOSITY: return "COR2_VISCOSITY";
    case AlgorithmId::HSEGM: return "HSEGM";
    case AlgorithmId::VSEGM: return "VSEGM";
    case AlgorithmId::VTEGM: return "VTEGM";
    case AlgorithmId::STEGM: return "STEGM";
  }
  return "?";
}

std::string_view describe(AlgorithmId id) {
  switch (id) {
    case AlgorithmId::ISEGM:
      return "self-adaptive inertial subgradient extragradient, hybrid steepest descent";
    case AlgorithmId::ITEGM:
      return "self-adaptive inertial Tseng extragradient, hybrid steepest descent";
    case AlgorithmId::COR1_HALPERN:
      return "inertial Mann-Halpern subgradient extragradient (anchor x0)";
    case AlgorithmId::COR2_VISCOSITY:
      return "inertial viscosity Tseng extragradient (contraction f)";
    case AlgorithmId::HSEGM:
      return "Halpern subgradient extragradient, fixed step 0.99/L";
    case AlgorithmId::VSEGM:
      return "viscosity subgradient extragradient, adaptive step";
    case AlgorithmId::VTEGM:
      return "viscosity Tseng extragradient, adaptive step";
    case AlgorithmId::STEGM:
      return "Tseng extragradient with Armijo step, hybrid steepest descent";
  }
  return "?";
}

std::optional<AlgorithmId> parse_algorithm(std::string_view name) {
  std::string upper(name);
  std::transform(upper.begin(), upper.end(), upper.begin(),
                 [](unsigned char c) { return static_cast<char>(std::toupper(c)); });
  if (upper == "COR1") return AlgorithmId::COR1_HALPERN;
  if (upper == "COR2") return AlgorithmId::COR2_VISCOSITY;
  for (AlgorithmId id : kAllAlgorithms) {
    if (to_string(id) == upper) return id;
  }
  return std::nullopt;
}

bool uses_subgradient_step(AlgorithmId id) {
  return id == AlgorithmId::ISEGM || id == AlgorithmId::COR1_HALPERN ||
         id == AlgorithmId::HSEGM || id == AlgorithmId::VSEGM;
}

bool uses_tseng_step(AlgorithmId id) { return !uses_subgradient_step(id); }

namespace {

bool uses_steering_map(AlgorithmId id) {
  return id == AlgorithmId::ISEGM || id == AlgorithmId::ITEGM || id == AlgorithmId::STEGM;
}

bool uses_viscosity(AlgorithmId id) {
  return id == AlgorithmId::COR2_VISCOSITY || id == AlgorithmId::VSEGM ||
         id == AlgorithmId::VTEGM;
}

bool uses_adaptive_step(AlgorithmId id) {
  return id != AlgorithmId::HSEGM && id != AlgorithmId::STEGM;
}

bool uses_inertia(AlgorithmId id) {
  return id == AlgorithmId::ISEGM || id == AlgorithmId::ITEGM ||
         id == AlgorithmId::COR1_HALPERN || id == AlgorithmId::COR2_VISCOSITY;
}

void check_finite(const HVector& v, const char* step) {
  if (!all_finite(v)) throw NumericalError(step, "iterate has NaN or Inf entries");
}

// u, y and the operator values shared by every method.
struct Predictor {
  double xi;
  HVector u;
  HVector Au;
  HVector y;
  HVector Ay;
};

Predictor inertial_predictor(const SolverState& s, const Problem& p,
                             const SolverParams& params) {
  const double xi = inertial_xi(params.xi, params.rules.zeta(s.k), s.x_cur, s.x_prev);
  HVector u = lincomb(1.0 + xi, s.x_cur, -xi, s.x_prev);
  check_finite(u, "u");
  HVector Au = p.A(u);
  check_finite(Au, "u");
  HVector y = project(p.C, u - s.psi * Au);
  check_finite(y, "y");
  HVector Ay = p.A(y);
  check_finite(Ay, "y");
  return {xi, std::move(u), std::move(Au), std::move(y), std::move(Ay)};
}

Predictor plain_predictor(const SolverState& s, const Problem& p, double psi) {
  HVector Ax = p.A(s.x_cur);
  check_finite(Ax, "u");
  HVector y = project(p.C, s.x_cur - psi * Ax);
  check_finite(y, "y");
  HVector Ay = p.A(y);
  check_finite(Ay, "y");
  return {0.0, s.x_cur, std::move(Ax), std::move(y), std::move(Ay)};
}

// z = P_{H}(u - psi A y) with H the half-space through y.
HVector subgradient_corrector(const Predictor& pr, double psi, double& slack) {
  const HalfSpace h = halfspace_for_subgradient_step(pr.u, psi, pr.Au, pr.y);
  HVector z = project(FeasibleSet(h), pr.u - psi * pr.Ay);
  check_finite(z, "z");
  slack = inner(h.normal(), z - pr.y);
  return z;
}

// z = y - psi (A y - A u).
HVector tseng_corrector(const Predictor& pr, double psi) {
  HVector z = lincomb(1.0, pr.y, -psi, pr.Ay - pr.Au);
  check_finite(z, "z");
  return z;
}

struct MannPoint {
  HVector q;
  double residual_Tz;
};

MannPoint mann_point(const Problem& p, const HVector& z, double varphi) {
  HVector Tz = p.T(z);
  const double residual = distance(Tz, z);
  HVector q = lincomb(1.0 - varphi, z, varphi, Tz);
  check_finite(q, "q");
  return {std::move(q), residual};
}

StepReport make_report(Predictor&& pr, HVector z, MannPoint&& mp, double psi_k,
                       double psi_next, int evaluations) {
  StepReport r{
      .u = std::move(pr.u),
      .y = std::move(pr.y),
      .z = std::move(z),
      .q = std::move(mp.q),
      .xi_k = pr.xi,
      .psi_k = psi_k,
      .psi_next = psi_next,
      .residual_uy = 0.0,
      .residual_Tz = mp.residual_Tz,
      .operator_evaluations = evaluations,
  };
  r.residual_uy = distance(r.u, r.y);
  return r;
}

void attach_subgradient_bound(StepReport& r, const Problem& p, double phi) {
  if (!p.known_solution) return;
  const auto sides = subgradient_inequality_sides(r, *p.known_solution, phi, r.psi_k, r.psi_next);
  r.lemma_lhs_rhs = std::make_pair(sides.lhs, sides.rhs);
}

void attach_tseng_bound(StepReport& r, const Problem& p, double phi) {
  if (!p.known_solution) return;
  const auto sides = tseng_inequality_sides(r, *p.known_solution, phi, r.psi_k, r.psi_next);
  r.lemma_lhs_rhs = std::make_pair(sides.lhs, sides.rhs);
}

SolverState advance(const SolverState& s, HVector x_next, double psi_next) {
  check_finite(x_next, "outer");
  return SolverState{
      .k = s.k + 1, .x_prev = s.x_cur, .x_cur = std::move(x_next), .psi = psi_next, .x0 = s.x0};
}

// x_{k+1} = q - sigma theta_k S(q).
HVector steepest_descent_outer(const Problem& p, const SolverParams& params, int k,
                               const HVector& q) {
  return lincomb(1.0, q, -params.sigma * params.rules.theta(k), p.S(q));
}

const Mapping& viscosity_map(const Problem& p) {
  if (!p.f) throw ConfigurationError(p.name + ": algorithm needs a viscosity map f");
  return *p.f;
}

}  // namespace

double fixed_step(const Problem& p, const SolverParams& params) {
  const auto& L = p.A.meta().lipschitz;
  if (!L || !(*L > 0)) {
    throw ConfigurationError(p.name + ": fixed-step baseline needs the Lipschitz constant of A");
  }
  return params.fixed_step_scale / *L;
}

void validate_params(const Problem& p, AlgorithmId alg, const SolverParams& params) {
  const auto fail = [&](const std::string& msg) {
    throw ConfigurationError(std::string(to_string(alg)) + " on " + p.name + ": " + msg);
  };
  if (params.max_iter < 0) fail("max_iter must be >= 0");
  try {
    validate_rules(params.rules, p.T.meta().demicontractive.value_or(0.0));
  } catch (const ContractViolation& e) {
    fail(e.what());
  }
  if (uses_adaptive_step(alg)) {
    if (!(params.psi1 > 0)) fail("psi1 must be > 0");
    if (!(params.phi > 0 && params.phi < 1)) fail("phi must lie in (0,1)");
  }
  if (uses_inertia(alg) && !(params.xi > 0)) fail("xi must be > 0");
  if (uses_steering_map(alg)) {
    const auto& m = p.S.meta();
    if (!m.strong_monotonicity || !m.lipschitz_of_s) {
      fail("S needs strong monotonicity and Lipschitz constants");
    }
    const double bound = 2.0 * *m.strong_monotonicity / (*m.lipschitz_of_s * *m.lipschitz_of_s);
    if (!(params.sigma > 0 && params.sigma < bound)) {
      fail("sigma must lie in (0, 2 eta / kappa^2) = (0, " + std::to_string(bound) + ")");
    }
  }
  if (uses_viscosity(alg)) viscosity_map(p);
  if (alg == AlgorithmId::HSEGM) {
    fixed_step(p, params);
    if (!(params.fixed_step_scale > 0 && params.fixed_step_scale < 1)) {
      fail("fixed step scale must lie in (0,1)");
    }
  }
  if (alg == AlgorithmId::STEGM) {
    if (!(params.armijo_alpha > 0)) fail("armijo alpha must be > 0");
    if (!(params.armijo_ell > 0 && params.armijo_ell < 1)) fail("armijo ell must lie in (0,1)");
    if (!(params.armijo_phi > 0 && params.armijo_phi < 1)) fail("armijo phi must lie in (0,1)");
  }
}

SolverState initial_state(const Problem& p, AlgorithmId alg, const SolverParams& params,
                          const HVector& x1, const std::optional<HVector>& x0) {
  require_same_space(p.space, x1.space(), "initial_state");
  const HVector anchor = x0.value_or(x1);
  require_same_space(p.space, anchor.space(), "initial_state");
  double psi = params.psi1;
  if (alg == AlgorithmId::HSEGM) psi = fixed_step(p, params);
  if (alg == AlgorithmId::STEGM) psi = params.armijo_alpha;
  return SolverState{.k = 1, .x_prev = anchor, .x_cur = x1, .psi = psi, .x0 = anchor};
}

StepResult step_isegm(const SolverState& s, const Problem& p, const SolverParams& params) {
  Predictor pr = inertial_predictor(s, p, params);
  double slack = 0.0;
  HVector z = subgradient_corrector(pr, s.psi, slack);
  const double psi_next = adaptive_psi_next(s.psi, params.phi, pr.u, pr.y, pr.Au, pr.Ay);
  MannPoint mp = mann_point(p, z, params.rules.varphi(s.k));
  HVector x_next = steepest_descent_outer(p, params, s.k, mp.q);

  StepReport r = make_report(std::move(pr), std::move(z), std::move(mp), s.psi, psi_next, 2);
  r.halfspace_slack = slack;
  attach_subgradient_bound(r, p, params.phi);
  return {advance(s, std::move(x_next), psi_next), std::move(r)};
}

StepResult step_itegm(const SolverState& s, const Problem& p, const SolverParams& params) {
  Predictor pr = inertial_predictor(s, p, params);
  HVector z = tseng_corrector(pr, s.psi);
  const double psi_next = adaptive_psi_next(s.psi, params.phi, pr.u, pr.y, pr.Au, pr.Ay);
  MannPoint mp = mann_point(p, z, params.rules.varphi(s.k));
  HVector x_next = steepest_descent_outer(p, params, s.k, mp.q);

  StepReport r = make_report(std::move(pr), std::move(z), std::move(mp), s.psi, psi_next, 2);
  attach_tseng_bound(r, p, params.phi);
  return {advance(s, std::move(x_next), psi_next), std::move(r)};
}

StepResult step_cor1(const SolverState& s, const Problem& p, const SolverParams& params) {
  Predictor pr = inertial_predictor(s, p, params);
  double slack = 0.0;
  HVector z = subgradient_corrector(pr, s.psi, slack);
  const double psi_next = adaptive_psi_next(s.psi, params.phi, pr.u, pr.y, pr.Au, pr.Ay);
  MannPoint mp = mann_point(p, z, params.rules.varphi(s.k));
  const double theta = params.rules.theta(s.k);
  HVector x_next = lincomb(theta, s.x0, 1.0 - theta, mp.q);

  StepReport r = make_report(std::move(pr), std::move(z), std::move(mp), s.psi, psi_next, 2);
  r.halfspace_slack = slack;
  attach_subgradient_bound(r, p, params.phi);
  return {advance(s, std::move(x_next), psi_next), std::move(r)};
}

StepResult step_cor2(const SolverState& s, const Problem& p, const SolverParams& params) {
  const Mapping& f = viscosity_map(p);
  Predictor pr = inertial_predictor(s, p, params);
  HVector z = tseng_corrector(pr, s.psi);
  const double psi_next = adaptive_psi_next(s.psi, params.phi, pr.u, pr.y, pr.Au, pr.Ay);
  MannPoint mp = mann_point(p, z, params.rules.varphi(s.k));
  const double theta = params.rules.theta(s.k);
  HVector x_next = lincomb(1.0 - theta, mp.q, theta, f(mp.q));

  StepReport r = make_report(std::move(pr), std::move(z), std::move(mp), s.psi, psi_next, 2);
  attach_tseng_bound(r, p, params.phi);
  return {advance(s, std::move(x_next), psi_next), std::move(r)};
}

StepResult step_hsegm(const SolverState& s, const Problem& p, const SolverParams& params) {
  const double psi = fixed_step(p, params);
  Predictor pr = plain_predictor(s, p, psi);
  double slack = 0.0;
  HVector w = subgradient_corrector(pr, psi, slack);
  const double theta = params.rules.theta(s.k);
  HVector z = lincomb(theta, s.x0, 1.0 - theta, w);
  check_finite(z, "z");
  HVector Tz = p.T(z);
  const double varphi = params.rules.varphi(s.k);
  HVector x_next = lincomb(varphi, s.x_cur, 1.0 - varphi, Tz);

  MannPoint mp{Tz, distance(Tz, z)};
  check_finite(mp.q, "q");
  StepReport r = make_report(std::move(pr), std::move(z), std::move(mp), psi, psi, 2);
  r.halfspace_slack = slack;
  return {advance(s, std::move(x_next), psi), std::move(r)};
}

StepResult step_vsegm(const SolverState& s, const Problem& p, const SolverParams& params) {
  const Mapping& f = viscosity_map(p);
  Predictor pr = plain_predictor(s, p, s.psi);
  double slack = 0.0;
  HVector z = subgradient_corrector(pr, s.psi, slack);
  const double psi_next = adaptive_psi_next(s.psi, params.phi, pr.u, pr.y, pr.Au, pr.Ay);
  MannPoint mp = mann_point(p, z, params.rules.varphi(s.k));
  const double theta = params.rules.theta(s.k);
  HVector x_next = lincomb(theta, f(s.x_cur), 1.0 - theta, mp.q);

  StepReport r = make_report(std::move(pr), std::move(z), std::move(mp), s.psi, psi_next, 2);
  r.halfspace_slack = slack;
  attach_subgradient_bound(r, p, params.phi);
  return {advance(s, std::move(x_next), psi_next), std::move(r)};
}

StepResult step_vtegm(const SolverState& s, const Problem& p, const SolverParams& params) {
  const Mapping& f = viscosity_map(p);
  Predictor pr = plain_predictor(s, p, s.psi);
  HVector z = tseng_corrector(pr, s.psi);
  const double psi_next = adaptive_psi_next(s.psi, params.phi, pr.u, pr.y, pr.Au, pr.Ay);
  MannPoint mp = mann_point(p, z, params.rules.varphi(s.k));
  const double theta = params.rules.theta(s.k);
  HVector x_next = lincomb(theta, f(s.x_cur), 1.0 - theta, mp.q);

  StepReport r = make_report(std::move(pr), std::move(z), std::move(mp), s.psi, psi_next, 2);
  attach_tseng_bound(r, p, params.phi);
  return {advance(s, std::move(x_next), psi_next), std::move(r)};
}

StepResult step_stegm(const SolverState& s, const Problem& p, const SolverParams& params) {
  HVector Ax = p.A(s.x_cur);
  check_finite(Ax, "u");
  ArmijoResult ls = armijo_psi(params.armijo_alpha, params.armijo_ell, params.armijo_phi,
                               s.x_cur, Ax, p.A, p.C);
  check_finite(ls.y, "y");
  const double psi = ls.psi;
  Predictor pr{0.0, s.x_cur, std::move(Ax), std::move(ls.y), std::move(ls.Ay)};
  HVector z = tseng_corrector(pr, psi);
  MannPoint mp = mann_point(p, z, params.rules.varphi(s.k));
  HVector x_next = steepest_descent_outer(p, params, s.k, mp.q);

  // The Armijo test bounds psi ||Ax - Ay|| by phi ||x - y|| directly, so
  // the Tseng bounds hold with a unit step ratio.
  StepReport r =
      make_report(std::move(pr), std::move(z), std::move(mp), psi, psi, 1 + ls.trials);
  attach_tseng_bound(r, p, params.armijo_phi);
  return {advance(s, std::move(x_next), psi), std::move(r)};
}

StepResult step(AlgorithmId alg, const SolverState& s, const Problem& p,
                const SolverParams& params) {
  switch (alg) {
    case AlgorithmId::ISEGM: return step_isegm(s, p, params);
    case AlgorithmId::ITEGM: return step_itegm(s, p, params);
    case AlgorithmId::COR1_HALPERN: return step_cor1(s, p, params);
    case AlgorithmId::COR2_VISCOSITY: return step_cor2(s, p, params);
    case AlgorithmId::HSEGM: return step_hsegm(s, p, params);
    case AlgorithmId::VSEGM: return step_vsegm(s, p, params);
    case AlgorithmId::VTEGM: return step_vtegm(s, p, params);
    case AlgorithmId::STEGM: return step_stegm(s, p, params);
  }
  throw ContractViolation("unknown algorithm");
}

IterationTrace run(const Problem& p, AlgorithmId alg, const SolverParams& params,
                   const StopRule& stop, const HVector& x1, const std::optional<HVector>& x0,
                   const StepObserver& observer) {
  validate_params(p, alg, params);
  SolverState state = initial_state(p, alg, params, x1, x0);
  IterationTrace trace{.algorithm = alg, .rows = {}, .final_x = state.x_cur};
  trace.rows.reserve(static_cast<std::size_t>(std::max(0, stop.max_iter)));

  const auto error_of = [&](const HVector& x) {
    return p.known_solution ? distance(x, *p.known_solution)
                            : std::numeric_limits<double>::quiet_NaN();
  };

  using clock = std::chrono::steady_clock;
  clock::duration elapsed{};
  for (int it = 0; it < stop.max_iter; ++it) {
    const double D_k = error_of(state.x_cur);
    const auto t0 = clock::now();
    std::optional<StepResult> next;
    try {
      next.emplace(step(alg, state, p, params));
    } catch (const Error& e) {
      trace.complete = false;
      trace.error = "k=" + std::to_string(state.k) + ": " + e.what();
      break;
    }
    elapsed += clock::now() - t0;

    const StepReport& r = next->report;
    trace.rows.push_back(TraceRow{
        .k = state.k,
        .D_k = D_k,
        .psi_k = r.psi_k,
        .xi_k = r.xi_k,
        .residual_uy = r.residual_uy,
        .residual_Tz = r.residual_Tz,
        .elapsed_s = std::chrono::duration<double>(elapsed).count(),
    });
    if (observer) observer(state, r);
    state = std::move(next->state);
    trace.final_x = state.x_cur;
    if (stop.tol && p.known_solution && error_of(state.x_cur) <= *stop.tol) break;
  }
  return trace;
}

// ---------------------------------------------------------------------------

double contraction_gamma(double sigma, double eta, double kappa) {
  if (!(eta > 0 && eta <= kappa)) throw ContractViolation("contraction: need 0 < eta <= kappa");
  if (!(sigma > 0 && sigma < 2.0 * eta / (kappa * kappa))) {
    throw ContractViolation("contraction: need 0 < sigma < 2 eta / kappa^2");
  }
  return 1.0 - std::sqrt(1.0 - sigma * (2.0 * eta - sigma * kappa * kappa));
}

ContractionCheck verify_contraction(const Mapping& S,
                                    const std::function<HVector(const HVector&)>& U,
                                    double sigma, double theta, const SpaceDescriptor& space,
                                    int samples, std::uint64_t seed) {
  const auto& m = S.meta();
  if (!m.strong_monotonicity || !m.lipschitz_of_s) {
    throw ContractViolation("verify_contraction: S needs eta and kappa metadata");
  }
  if (!(theta >= 0 && theta <= 1)) throw ContractViolation("verify_contraction: theta in [0,1]");
  const double gamma = contraction_gamma(sigma, *m.strong_monotonicity, *m.lipschitz_of_s);

  const auto V = [&](const HVector& x) {
    HVector ux = U(x);
    return lincomb(1.0, ux, -theta * sigma, S(ux));
  };

  Rng rng(seed);
  double worst = 0.0;
  for (int i = 0; i < samples; ++i) {
    const double scale = std::pow(10.0, rng.uniform(-2.0, 2.0));
    const HVector x = scale * random_vector(space, rng);
    const HVector y = scale * random_vector(space, rng);
    const double d = distance(x, y);
    if (d == 0.0) continue;
    worst = std::max(worst, distance(V(x), V(y)) / d);
  }
  return ContractionCheck{{gamma, theta}, worst};
}

InequalitySides subgradient_inequality_sides(const StepReport& r, const HVector& x_dag,
                                             double phi, double psi_k, double psi_k1) {
  const double c = 1.0 - phi * psi_k / psi_k1;
  return {squared_norm(r.z - x_dag),
          squared_norm(r.u - x_dag) - c * squared_norm(r.y - r.u) - c * squared_norm(r.z - r.y)};
}

InequalitySides tseng_inequality_sides(const StepReport& r, const HVector& x_dag, double phi,
                                       double psi_k, double psi_k1) {
  const double ratio = phi * psi_k / psi_k1;
  return {squared_norm(r.z - x_dag),
          squared_norm(r.u - x_dag) - (1.0 - ratio * ratio) * squared_norm(r.u - r.y)};
}

bool verify_iteration_inequality(const StepReport& r, const HVector& x_dag, double phi,
                                 double psi_k, double psi_k1, double slack) {
  const auto s = subgradient_inequality_sides(r, x_dag, phi, psi_k, psi_k1);
  return s.lhs <= s.rhs + slack;
}

bool verify_tseng_residual(const StepReport& r, double phi, double psi_k, double psi_k1,
                           double slack) {
  return distance(r.z, r.y) <= phi * (psi_k / psi_k1) * distance(r.u, r.y) + slack;
}

}  // namespace vi
