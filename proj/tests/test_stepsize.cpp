#include <doctest.h>

#include <cmath>

#include "vi/stepsize.hpp"

using vi::HVector;
using vi::SpaceDescriptor;

namespace {

const SpaceDescriptor kR1 = SpaceDescriptor::euclidean(1);
const SpaceDescriptor kR2 = SpaceDescriptor::euclidean(2);

HVector vec1(double a) { return HVector(kR1, Eigen::VectorXd::Constant(1, a)); }
HVector vec2(double a, double b) { return HVector(kR2, Eigen::Vector2d(a, b)); }

vi::Mapping linear1(double c) {
  return vi::Mapping("A", [c](const HVector& x) { return c * x; }, {.lipschitz = c});
}

}  // namespace

TEST_CASE("inertial weight") {
  CHECK(vi::inertial_xi(0.4, 0.01, vec2(1, 1), vec2(1, 1)) == 0.4);
  CHECK(vi::inertial_xi(0.4, 0.01, vec2(1, 0), vec2(0, 0)) == 0.01);
  CHECK(vi::inertial_xi(0.4, 10.0, vec2(1, 0), vec2(0, 0)) == 0.4);
  // Iterates within the coincidence threshold take the xi branch.
  CHECK(vi::inertial_xi(0.4, 1e-20, vec2(1, 0), vec2(1 + 1e-16, 0)) == 0.4);
}

TEST_CASE("inertial bound xi_k ||x_k - x_km1|| <= zeta_k") {
  vi::Rng rng(3);
  for (int i = 0; i < 1000; ++i) {
    const HVector a = vi::random_vector(kR2, rng);
    const HVector b = vi::random_vector(kR2, rng);
    const double zeta = std::pow(10.0, rng.uniform(-6, 1));
    const double xi = vi::inertial_xi(0.4, zeta, a, b);
    CHECK(xi <= 0.4);
    CHECK(xi * vi::distance(a, b) <= zeta * (1 + 1e-15));
  }
}

TEST_CASE("adaptive step") {
  const HVector u = vec2(1, 0), y = vec2(0, 0);
  CHECK(vi::adaptive_psi_next(0.9, 0.5, u, y, vec2(3, 3), vec2(3, 3)) == 0.9);
  CHECK(vi::adaptive_psi_next(0.9, 0.5, u, y, vec2(4, 0), vec2(0, 0)) == 0.125);
  CHECK(vi::adaptive_psi_next(0.1, 0.5, u, y, vec2(1, 0), vec2(0, 0)) == 0.1);
  CHECK_THROWS_AS(vi::adaptive_psi_next(0.0, 0.5, u, y, u, y), vi::ContractViolation);
}

TEST_CASE("Armijo search") {
  const vi::FeasibleSet whole = vi::WholeSpace{};
  SUBCASE("1-D toy problem") {
    const auto r = vi::armijo_psi(0.5, 0.5, 0.4, vec1(1.0), linear1(2.0), whole);
    CHECK(r.psi == 0.125);
    CHECK(r.trials == 3);
    CHECK(r.y[0] == doctest::Approx(0.75));
    CHECK(r.Ay[0] == doctest::Approx(1.5));
  }
  SUBCASE("zero operator value accepts alpha") {
    const vi::FeasibleSet box = vi::Box::uniform(kR1, -1, 1);
    const auto r = vi::armijo_psi(0.5, 0.5, 0.4, vec1(3.0), linear1(0.0), box);
    CHECK(r.psi == 0.5);
    CHECK(r.y[0] == 1.0);
  }
  SUBCASE("at a solution") {
    const auto r = vi::armijo_psi(0.5, 0.5, 0.4, vec1(0.0), linear1(2.0), whole);
    CHECK(r.psi == 0.5);
    CHECK(r.y[0] == 0.0);
  }
  SUBCASE("accepted step is maximal") {
    vi::Rng rng(8);
    const vi::FeasibleSet box = vi::Box::uniform(kR2, -1, 1);
    const vi::Mapping A("A", [](const HVector& x) {
      return HVector(x.space(), Eigen::Vector2d(5 * x[0] + 3 * x[1], -3 * x[0] + 7 * x[1]));
    });
    auto holds = [&](double psi, const HVector& x) {
      const HVector y = vi::project(box, x - psi * A(x));
      return psi * vi::norm(A(x) - A(y)) <= 0.4 * vi::norm(x - y) * (1 + 1e-12);
    };
    for (int i = 0; i < 200; ++i) {
      const HVector x = 3.0 * vi::random_vector(kR2, rng);
      const auto r = vi::armijo_psi(0.5, 0.5, 0.4, x, A, box);
      CHECK(holds(r.psi, x));
      if (r.psi != 0.5) CHECK_FALSE(holds(r.psi / 0.5, x));
    }
  }
  SUBCASE("cap on reductions") {
    const vi::Mapping wild("A", [](const HVector& x) {
      return HVector(x.space(), Eigen::VectorXd::Constant(1, x[0] == 0.0 ? 1.0 : 1e300));
    });
    CHECK_THROWS_AS(vi::armijo_psi(0.5, 0.5, 0.4, vec1(0.0), wild, whole), vi::LineSearchError);
  }
}

TEST_CASE("default sequences") {
  const vi::SequenceRules r = vi::paper_default_rules();
  CHECK(r.theta(1) == 0.5);
  CHECK(r.zeta(9) == 0.01);
  CHECK(r.varphi(1) == doctest::Approx(1.0 / 3.0));
  CHECK(r.a == doctest::Approx(1.0 / 3.0));
  for (int k = 1; k < 10000; k += 97) CHECK(r.varphi(k) < 0.5);
  CHECK_NOTHROW(vi::validate_rules(r, 0.0));
  CHECK_NOTHROW(vi::validate_rules(r, 0.5));
  // varphi_3 = 3/7 exceeds 1 - vartheta = 0.4.
  CHECK_THROWS_AS(vi::validate_rules(r, 0.6), vi::ContractViolation);
}

TEST_CASE("rule validation rejects bad sequences") {
  vi::SequenceRules r = vi::paper_default_rules();
  r.theta = [](int) { return 1.0; };
  CHECK_THROWS_AS(vi::validate_rules(r, 0.0), vi::ContractViolation);
  r = vi::paper_default_rules();
  r.zeta = [](int k) { return 1.0 / (k + 1); };  // zeta/theta constant
  CHECK_THROWS_AS(vi::validate_rules(r, 0.0), vi::ContractViolation);
  r = vi::paper_default_rules();
  r.varphi = [](int) { return 0.1; };
  CHECK_THROWS_AS(vi::validate_rules(r, 0.0), vi::ContractViolation);
}

TEST_CASE("default preset") {
  const vi::SolverParams p = vi::paper_preset();
  CHECK(p.xi == 0.4);
  CHECK(p.psi1 == 0.9);
  CHECK(p.phi == 0.5);
  CHECK(p.sigma == 0.5);
  CHECK(p.armijo_alpha == 0.5);
  CHECK(p.armijo_ell == 0.5);
  CHECK(p.armijo_phi == 0.4);
  CHECK(p.fixed_step_scale == 0.99);
  CHECK(p.max_iter == 400);
}
