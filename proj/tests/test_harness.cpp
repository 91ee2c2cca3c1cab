#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <sstream>

#include "vi/harness.hpp"

using vi::AlgorithmId;
using vi::BenchConfig;
using vi::ExampleId;
using vi::HVector;

namespace {

BenchConfig ex1_with(std::vector<AlgorithmId> algs) {
  BenchConfig cfg;
  cfg.algorithms = std::move(algs);
  return cfg;
}

bool has_check(const vi::ValidationReport& rep, const std::string& name, bool passed) {
  for (const auto& c : rep.checks) {
    if (c.name == name) return c.passed == passed;
  }
  return false;
}

}  // namespace

TEST_CASE("config defaults and validation") {
  BenchConfig cfg;
  CHECK(vi::effective_max_iter(cfg) == 400);
  CHECK(vi::effective_start(cfg).to_string() == "random:1");
  CHECK(cfg.algorithms.size() == 8);
  CHECK_NOTHROW(vi::validate_config(cfg));

  cfg.example = ExampleId::ex2;
  CHECK_THROWS_AS(vi::validate_config(cfg), vi::ConfigurationError);
  cfg.n = 10;
  CHECK_NOTHROW(vi::validate_config(cfg));

  cfg.example = ExampleId::ex3;
  CHECK_THROWS_AS(vi::validate_config(cfg), vi::ConfigurationError);
  cfg.points = 64;
  CHECK(vi::effective_max_iter(cfg) == 50);
  CHECK(vi::effective_start(cfg).name == "t2");

  BenchConfig bad;
  bad.start = vi::StartSpec::random(-1.0);
  CHECK_THROWS_AS(vi::validate_config(bad), vi::ConfigurationError);
  bad.start = vi::StartSpec::named("t2");
  CHECK_THROWS_AS(vi::validate_config(bad), vi::ConfigurationError);
  bad.start.reset();
  bad.algorithms.clear();
  CHECK_THROWS_AS(vi::validate_config(bad), vi::ConfigurationError);
}

TEST_CASE("config text") {
  BenchConfig cfg;
  vi::apply_config_text(cfg,
                        "# comment\n"
                        "example = ex2\n"
                        "n = 25   # trailing comment\n"
                        "seed = 12\n"
                        "algorithms = isegm, cor2\n"
                        "start = random:5\n"
                        "sigma = 0.25\n"
                        "max_iter = 30\n");
  CHECK(cfg.example == ExampleId::ex2);
  CHECK(*cfg.n == 25);
  CHECK(cfg.seed == 12);
  CHECK(cfg.algorithms == std::vector{AlgorithmId::ISEGM, AlgorithmId::COR2_VISCOSITY});
  CHECK(cfg.start->scale == 5.0);
  CHECK(cfg.params.sigma == 0.25);
  CHECK(*cfg.max_iter == 30);

  vi::apply_config_text(cfg, "preset = paper");
  CHECK(cfg.params.sigma == 0.5);

  CHECK_THROWS_AS(vi::apply_config_text(cfg, "bogus = 1"), vi::ConfigurationError);
  CHECK_THROWS_AS(vi::apply_config_text(cfg, "sigma 0.5"), vi::ConfigurationError);
  CHECK_THROWS_AS(vi::apply_config_text(cfg, "sigma = abc"), vi::ConfigurationError);
  CHECK_THROWS_AS(vi::apply_config_text(cfg, "algorithms = EGM"), vi::ConfigurationError);
  CHECK_THROWS_AS(vi::apply_config_file(cfg, "/nonexistent/vi.cfg"), vi::ConfigurationError);
}

TEST_CASE("start specifications") {
  CHECK(vi::StartSpec::parse("random").scale == 1.0);
  CHECK(vi::StartSpec::parse("random:20").scale == 20.0);
  CHECK(vi::StartSpec::parse("t_plus_halfcos").name == "tcos");
  CHECK_THROWS(vi::StartSpec::parse("sinh"));

  BenchConfig cfg;
  cfg.example = ExampleId::ex3;
  cfg.points = 257;
  const auto g = vi::SpaceDescriptor::grid_l2(257);
  cfg.start = vi::StartSpec::named("t2");
  CHECK(vi::make_start(cfg, g)[128] == 0.25);
  cfg.start = vi::StartSpec::named("expt");
  CHECK(vi::make_start(cfg, g)[0] == 1.0);
  cfg.start = vi::StartSpec::named("pow2t");
  CHECK(vi::make_start(cfg, g)[256] == doctest::Approx(2.0));
  cfg.start = vi::StartSpec::named("tcos");
  CHECK(vi::make_start(cfg, g)[0] == doctest::Approx(0.5));
  CHECK_THROWS_AS(vi::make_start(cfg, vi::SpaceDescriptor::euclidean(2)), vi::ConfigurationError);

  BenchConfig r;
  r.start = vi::StartSpec::random(20.0);
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    r.seed = seed;
    const HVector x = vi::make_start(r, vi::SpaceDescriptor::euclidean(2));
    CHECK(x.coords().minCoeff() >= 0.0);
    CHECK(x.coords().maxCoeff() <= 20.0);
  }
}

TEST_CASE("problem construction is deterministic") {
  BenchConfig cfg;
  cfg.example = ExampleId::ex2;
  cfg.n = 50;
  cfg.seed = 7;
  const vi::Problem a = vi::build_problem(cfg);
  const vi::Problem b = vi::build_problem(cfg);
  const HVector x = vi::make_start(cfg, a.space);
  CHECK(a.A(x).coords() == b.A(x).coords());
  CHECK(vi::distance(x, vi::make_start(cfg, b.space)) == 0.0);

  BenchConfig c3;
  c3.example = ExampleId::ex3;
  c3.points = 256;
  const vi::Problem p3 = vi::build_problem(c3);
  CHECK(p3.space.is_grid());
  CHECK(p3.space.size() == 256);
  CHECK(std::holds_alternative<vi::Ball>(p3.C));
}

TEST_CASE("seed from the environment") {
  ::setenv("VI_SOLVE_SEED", "1234", 1);
  CHECK(vi::seed_from_env() == 1234u);
  ::setenv("VI_SOLVE_SEED", "12x", 1);
  CHECK_FALSE(vi::seed_from_env().has_value());
  ::unsetenv("VI_SOLVE_SEED");
  CHECK_FALSE(vi::seed_from_env().has_value());
}

TEST_CASE("compare shares the start and keeps going after failures") {
  BenchConfig cfg;
  const auto recs = vi::compare(cfg);
  REQUIRE(recs.size() == 8);
  for (const auto& r : recs) {
    CAPTURE(vi::to_string(r.algorithm));
    CHECK(r.trace.complete);
    REQUIRE(r.trace.rows.size() == 400);
    CHECK(r.trace.rows.front().D_k == recs.front().trace.rows.front().D_k);
  }
  const auto final_D = [&](AlgorithmId id) {
    for (const auto& r : recs) {
      if (r.algorithm == id) return r.trace.rows.back().D_k;
    }
    return std::nan("");
  };
  CHECK(final_D(AlgorithmId::ISEGM) <= final_D(AlgorithmId::HSEGM));
  CHECK(final_D(AlgorithmId::ITEGM) <= final_D(AlgorithmId::HSEGM));

  BenchConfig broken;
  broken.params.sigma = 4.0;
  broken.algorithms = {AlgorithmId::ISEGM, AlgorithmId::HSEGM};
  const auto b = vi::compare(broken);
  CHECK_FALSE(b[0].trace.complete);
  CHECK_FALSE(b[0].trace.error.empty());
  CHECK(b[1].trace.complete);
}

TEST_CASE("csv output") {
  BenchConfig cfg = ex1_with({AlgorithmId::ISEGM});
  cfg.seed = 3;

  std::ostringstream empty;
  vi::write_csv(empty, {}, cfg);
  std::istringstream empty_in(empty.str());
  const vi::CsvTable et = vi::read_csv(empty_in);
  CHECK(et.rows.empty());
  CHECK(empty.str().find("algorithm,k,D_k,psi_k,xi_k,residual_uy,residual_Tz,elapsed_s\n") !=
        std::string::npos);
  CHECK(empty.str().rfind("# seed=3\n", 0) == 0);

  const auto recs = vi::compare(cfg);
  std::ostringstream os;
  vi::write_csv(os, recs, cfg);
  std::istringstream in(os.str());
  const vi::CsvTable t = vi::read_csv(in);
  REQUIRE(t.rows.size() == 400);
  CHECK(t.comments.size() >= 2);
  for (std::size_t i = 0; i < t.rows.size(); ++i) {
    const auto& src = recs[0].trace.rows[i];
    CHECK(t.rows[i].algorithm == "ISEGM");
    CHECK(t.rows[i].row.k == src.k);
    CHECK(t.rows[i].row.D_k == src.D_k);
    CHECK(t.rows[i].row.psi_k == src.psi_k);
    CHECK(t.rows[i].row.xi_k == src.xi_k);
    CHECK(t.rows[i].row.residual_Tz == src.residual_Tz);
  }

  const auto path = std::filesystem::temp_directory_path() / "vi_harness_test.csv";
  vi::emit_csv(recs, path, cfg);
  CHECK(vi::read_csv(path).rows.size() == 400);
  std::filesystem::remove(path);
  CHECK_THROWS(vi::emit_csv(recs, "/nonexistent/dir/out.csv", cfg));
}

TEST_CASE("validation suite") {
  const vi::ValidationReport ok = vi::validate(BenchConfig{});
  CHECK(ok.passed());
  for (const auto& c : ok.checks) {
    CAPTURE(c.name);
    CHECK(c.passed);
  }

  BenchConfig bad;
  bad.params.sigma = 4.0;
  const vi::ValidationReport rep = vi::validate(bad);
  CHECK_FALSE(rep.passed());
  CHECK(has_check(rep, "params.sigma_precondition", false));

  BenchConfig ex3;
  ex3.example = ExampleId::ex3;
  ex3.points = 256;
  ex3.algorithms = {AlgorithmId::ITEGM};
  const vi::ValidationReport r3 = vi::validate(ex3);
  CHECK(r3.passed());
  CHECK(has_check(r3, "ITEGM.tseng_residual", true));

  std::ostringstream os;
  vi::print_report(os, ok);
  CHECK(os.str().find("all checks passed") != std::string::npos);
}
