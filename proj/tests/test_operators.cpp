#include <doctest.h>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include <cmath>

#include "vi/operators.hpp"

using vi::HVector;
using vi::SpaceDescriptor;

namespace {

HVector vec2(double a, double b) {
  return HVector(SpaceDescriptor::euclidean(2), Eigen::Vector2d(a, b));
}

}  // namespace

TEST_CASE("example 1 mappings") {
  const vi::Problem p = vi::make_example1();
  CHECK(vi::norm(p.A(vec2(0, 0))) == 0.0);
  const HVector a = p.A(vec2(1, 0));
  CHECK(a[0] == 1.0 + std::sin(1.0));
  CHECK(a[1] == -1.0);
  const HVector t = p.T(vec2(2, 4));
  CHECK(t[0] == 1.0);
  CHECK(t[1] == 4.0);
  CHECK(*p.A.meta().lipschitz == 3.0);
  CHECK(*p.T.meta().demicontractive == 0.0);
  REQUIRE(p.f.has_value());
  REQUIRE(p.known_solution.has_value());
  CHECK(vi::norm(*p.known_solution) == 0.0);
  CHECK_NOTHROW(vi::check_problem(p));
  CHECK(vi::vi_residual(p, *p.known_solution) == 0.0);
}

TEST_CASE("example 2 is deterministic and monotone") {
  const Eigen::MatrixXd G1 = vi::example2_matrix(30, 7);
  const Eigen::MatrixXd G2 = vi::example2_matrix(30, 7);
  CHECK(G1 == G2);
  CHECK_FALSE(G1 == vi::example2_matrix(30, 8));

  // The symmetric part B B^T + E is positive semidefinite.
  const Eigen::MatrixXd sym = 0.5 * (G1 + G1.transpose());
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(sym);
  CHECK(eig.eigenvalues().minCoeff() >= -1e-10);

  const vi::Problem p = vi::make_example2(30, 7);
  const HVector zero = HVector::zero(p.space);
  CHECK(vi::norm(p.A(zero)) == 0.0);
  CHECK(*p.A.meta().lipschitz == doctest::Approx(vi::spectral_norm(G1)));
  CHECK_NOTHROW(vi::check_problem(p));
  CHECK_THROWS_AS(vi::make_example2(0, 7), vi::ContractViolation);
}

TEST_CASE("example 3 mappings") {
  const vi::Problem p = vi::make_example3(256);
  CHECK(p.space.is_grid());
  CHECK(std::holds_alternative<vi::Ball>(p.C));
  const HVector neg = HVector::constant(p.space, -1.0);
  CHECK(vi::norm(p.A(neg)) == 0.0);
  const HVector t1 = p.T(HVector::constant(p.space, 1.0));
  const HVector t = vi::sample_on_grid(p.space, [](double s) { return s; });
  CHECK((t1.coords() - t.coords()).cwiseAbs().maxCoeff() <= 1e-14);
  CHECK(vi::norm(p.T(HVector::zero(p.space))) == 0.0);
  CHECK_NOTHROW(vi::check_problem(p));
}

TEST_CASE("monotonicity and Lipschitz spot checks") {
  const vi::Problem problems[] = {vi::make_example1(), vi::make_example2(20, 3),
                                  vi::make_example3(64)};
  for (const auto& p : problems) {
    CAPTURE(p.name);
    vi::Rng rng(99);
    const double L = *p.A.meta().lipschitz;
    for (int i = 0; i < 1000; ++i) {
      const HVector x = vi::random_vector(p.space, rng, -3, 3);
      const HVector y = vi::random_vector(p.space, rng, -3, 3);
      const HVector d = p.A(x) - p.A(y);
      CHECK(vi::inner(d, x - y) >= -1e-10);
      CHECK(vi::norm(d) <= L * vi::norm(x - y) * (1 + 1e-9));
    }
  }
}

TEST_CASE("spectral norm") {
  Eigen::MatrixXd d(2, 2);
  d << 3, 0, 0, 1;
  CHECK(vi::spectral_norm(d) == doctest::Approx(3.0).epsilon(1e-8));
  CHECK(vi::spectral_norm(Eigen::MatrixXd::Identity(5, 5)) == doctest::Approx(1.0).epsilon(1e-8));
  Eigen::MatrixXd rot(2, 2);
  rot << 0, -2, 2, 0;
  CHECK(vi::spectral_norm(rot) == doctest::Approx(2.0).epsilon(1e-8));
  CHECK_THROWS_AS(vi::spectral_norm(Eigen::MatrixXd::Ones(2, 3)), vi::ContractViolation);
}

TEST_CASE("spectral norm agrees with the SVD") {
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    const Eigen::MatrixXd G = vi::example2_matrix(40, seed);
    const Eigen::JacobiSVD<Eigen::MatrixXd> svd(G);
    CHECK(vi::spectral_norm(G) == doctest::Approx(svd.singularValues()(0)).epsilon(1e-7));
  }
}

TEST_CASE("mapping metadata validation") {
  CHECK_THROWS_AS(vi::Mapping::scaled_identity("S", 0.5, {.strong_monotonicity = 1.0,
                                                          .lipschitz_of_s = 0.5}),
                  vi::ContractViolation);
  CHECK_THROWS_AS(vi::Mapping::scaled_identity("T", 0.5, {.demicontractive = 1.0}),
                  vi::ContractViolation);
  const vi::Mapping f = vi::Mapping::scaled_identity("f", 0.5, {.contraction = 0.5});
  CHECK(f(vec2(2, -4))[1] == -2.0);
}

TEST_CASE("rng is reproducible") {
  vi::Rng a(42), b(42);
  for (int i = 0; i < 100; ++i) {
    const double u = a.uniform();
    CHECK(u == b.uniform());
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
  }
}
