#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "vi/operators.hpp"
#include "vi/solvers.hpp"
#include "vi/stepsize.hpp"

namespace vi {

enum class ExampleId { ex1, ex2, ex3 };

std::string_view to_string(ExampleId id);
std::optional<ExampleId> parse_example(std::string_view name);

/// How the common starting point x^0 = x^1 is produced.
struct StartSpec {
  enum class Kind { RandomScaled, Named };
  Kind kind = Kind::RandomScaled;
  double scale = 1.0;  // RandomScaled: coordinates uniform in [0, scale)
  std::string name;    // Named: t2 | pow2t | expt | tcos

  static StartSpec random(double scale);
  static StartSpec named(std::string id);
  /// "random:<scale>", "random" (scale 1) or one of the function names.
  static StartSpec parse(std::string_view text);
  std::string to_string() const;
};

struct BenchConfig {
  ExampleId example = ExampleId::ex1;
  std::optional<Eigen::Index> n;       // ex2 dimension
  std::optional<Eigen::Index> points;  // ex3 grid size
  std::uint64_t seed = 0;
  std::vector<AlgorithmId> algorithms{kAllAlgorithms.begin(), kAllAlgorithms.end()};
  /// Unset means 50 for ex3 and 400 otherwise.
  std::optional<int> max_iter;
  std::optional<double> tol;
  /// Unset means random:1 for ex1/ex2 and t2 for ex3.
  std::optional<StartSpec> start;
  SolverParams params = paper_preset();
};

int effective_max_iter(const BenchConfig& cfg);
StartSpec effective_start(const BenchConfig& cfg);

/// Throws ConfigurationError for missing dimensions, non-positive scale,
/// empty algorithm lists and the like.
void validate_config(const BenchConfig& cfg);

/// One line, `key=value` pairs, stable across runs; echoed into CSV output.
std::string config_echo(const BenchConfig& cfg);

/// Applies `key = value` lines (# starts a comment) on top of `cfg`.
/// Keys: example n points seed algorithms max_iter tol start preset xi psi1
/// phi sigma armijo_alpha armijo_ell armijo_phi fixed_step_scale.
void apply_config_text(BenchConfig& cfg, std::string_view text);
void apply_config_file(BenchConfig& cfg, const std::filesystem::path& path);

/// Seed from the VI_SOLVE_SEED environment variable, if set and numeric.
std::optional<std::uint64_t> seed_from_env();

/// Deterministic in (example, n/points, seed).
Problem build_problem(const BenchConfig& cfg);

/// Builds x^1 for the problem's space; named functions need a GridL2 space.
HVector make_start(const BenchConfig& cfg, const SpaceDescriptor& space);

struct RunRecord {
  AlgorithmId algorithm;
  IterationTrace trace;
  std::uint64_t seed;
  std::string config;
};

/// Runs every configured algorithm on one problem instance from one start.
/// A failing algorithm yields an incomplete record; the others still run.
std::vector<RunRecord> compare(const BenchConfig& cfg);

/// Writes the trace table: `#` comment lines with seed and config, then the
/// header algorithm,k,D_k,psi_k,xi_k,residual_uy,residual_Tz,elapsed_s and
/// one row per iteration, reals printed with 17 significant digits.
void write_csv(std::ostream& out, const std::vector<RunRecord>& records, const BenchConfig& cfg);
void emit_csv(const std::vector<RunRecord>& records, const std::filesystem::path& path,
              const BenchConfig& cfg);

struct CsvRow {
  std::string algorithm;
  TraceRow row;
};

struct CsvTable {
  std::vector<std::string> comments;
  std::vector<CsvRow> rows;
};

CsvTable read_csv(std::istream& in);
CsvTable read_csv(const std::filesystem::path& path);

struct CheckResult {
  std::string name;
  bool passed;
  /// Largest observed violation (lhs - rhs, or ratio - bound); <= 0 is good.
  double worst;
  std::string detail;
};

struct ValidationReport {
  std::vector<CheckResult> checks;
  bool passed() const;
};

/// Runs the invariant suite on the configured problem: problem and
/// operator spot checks, projection properties, the contraction bound and
/// the per-iteration inequalities of every configured algorithm.
ValidationReport validate(const BenchConfig& cfg);

void print_report(std::ostream& out, const ValidationReport& report);

}  // namespace vi
