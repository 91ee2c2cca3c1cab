// vi_solve: command-line front end of the benchmark harness.
//
//   vi_solve list
//   vi_solve run      --example ex1 --algorithms ISEGM --out trace.csv
//   vi_solve compare  --example ex2 --n 50 --seed 7
//   vi_solve validate --example ex3 --points 256

#include <CLI11.hpp>

#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "vi/harness.hpp"

namespace {

struct CliOptions {
  std::string example;
  std::optional<long> n;
  std::optional<long> points;
  std::optional<std::uint64_t> seed;
  std::string algorithms;
  std::optional<int> max_iter;
  std::optional<double> tol;
  std::string start;
  std::string out;
  std::string config;
  std::string preset;
  std::vector<std::string> params;
};

void add_common_flags(CLI::App* cmd, CliOptions& o) {
  cmd->add_option("--example", o.example, "Benchmark problem")
      ->check(CLI::IsMember({"ex1", "ex2", "ex3"}));
  cmd->add_option("--n", o.n, "Dimension of ex2");
  cmd->add_option("--points", o.points, "Grid points of ex3");
  cmd->add_option("--seed", o.seed, "Seed (falls back to VI_SOLVE_SEED)");
  cmd->add_option("--algorithms", o.algorithms, "Comma-separated algorithm list, or 'all'");
  cmd->add_option("--max-iter", o.max_iter, "Iteration budget (default 400; 50 for ex3)");
  cmd->add_option("--tol", o.tol, "Stop once D_k <= tol");
  cmd->add_option("--start", o.start, "random:<scale> | t2 | pow2t | expt | tcos");
  cmd->add_option("--out", o.out, "CSV output path (default stdout)");
  cmd->add_option("--config", o.config, "key = value configuration file");
  cmd->add_option("--preset", o.preset, "Parameter preset")->check(CLI::IsMember({"paper"}));
  cmd->add_option("--param", o.params, "Parameter override key=value (repeatable)");
}

vi::BenchConfig resolve(const CliOptions& o) {
  vi::BenchConfig cfg;
  if (auto env = vi::seed_from_env()) cfg.seed = *env;
  if (!o.config.empty()) vi::apply_config_file(cfg, o.config);
  if (!o.preset.empty()) cfg.params = vi::paper_preset();
  if (!o.example.empty()) cfg.example = *vi::parse_example(o.example);
  if (o.n) cfg.n = *o.n;
  if (o.points) cfg.points = *o.points;
  if (o.seed) cfg.seed = *o.seed;
  if (!o.algorithms.empty()) vi::apply_config_text(cfg, "algorithms = " + o.algorithms);
  if (o.max_iter) cfg.max_iter = *o.max_iter;
  if (o.tol) cfg.tol = *o.tol;
  if (!o.start.empty()) cfg.start = vi::StartSpec::parse(o.start);
  for (const auto& kv : o.params) vi::apply_config_text(cfg, kv);
  vi::validate_config(cfg);
  return cfg;
}

int emit(const std::vector<vi::RunRecord>& records, const vi::BenchConfig& cfg,
         const std::string& out) {
  if (out.empty()) {
    vi::write_csv(std::cout, records, cfg);
  } else {
    vi::emit_csv(records, out, cfg);
  }
  int status = 0;
  for (const auto& rec : records) {
    const auto& rows = rec.trace.rows;
    std::cerr << vi::to_string(rec.algorithm) << ": ";
    if (!rec.trace.complete) {
      std::cerr << "FAILED " << rec.trace.error << "\n";
      status = 1;
      continue;
    }
    std::cerr << rows.size() << " iterations";
    if (!rows.empty()) {
      std::cerr << ", D_" << rows.back().k << " = " << rows.back().D_k
                << ", elapsed " << rows.back().elapsed_s << " s";
    }
    std::cerr << "\n";
  }
  return status;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Inertial extragradient solvers for variational inequality / fixed-point problems"};
  app.require_subcommand(1);

  CliOptions opts;
  auto* run_cmd = app.add_subcommand("run", "Run one algorithm and write its trace");
  auto* compare_cmd = app.add_subcommand("compare", "Run several algorithms from a shared start");
  auto* validate_cmd = app.add_subcommand("validate", "Run the invariant suite");
  auto* list_cmd = app.add_subcommand("list", "List algorithms and examples");
  for (auto* cmd : {run_cmd, compare_cmd, validate_cmd}) add_common_flags(cmd, opts);

  CLI11_PARSE(app, argc, argv);

  try {
    if (list_cmd->parsed()) {
      std::cout << "algorithms:\n";
      for (auto id : vi::kAllAlgorithms) {
        std::cout << "  " << vi::to_string(id) << "  " << vi::describe(id) << "\n";
      }
      std::cout << "examples:\n"
                << "  ex1  2-D nonlinear operator on the box [-1,1]^2\n"
                << "  ex2  linear operator G x on [-2,5]^n (needs --n)\n"
                << "  ex3  positive part on the unit ball of L2[0,1] (needs --points)\n";
      return 0;
    }

    vi::BenchConfig cfg = resolve(opts);

    if (run_cmd->parsed()) {
      if (opts.algorithms.empty()) cfg.algorithms = {vi::AlgorithmId::ISEGM};
      if (cfg.algorithms.size() != 1) {
        std::cerr << "run takes exactly one algorithm; use compare for several\n";
        return 2;
      }
      return emit(vi::compare(cfg), cfg, opts.out);
    }
    if (compare_cmd->parsed()) return emit(vi::compare(cfg), cfg, opts.out);
    if (validate_cmd->parsed()) {
      const vi::ValidationReport report = vi::validate(cfg);
      vi::print_report(std::cout, report);
      return report.passed() ? 0 : 1;
    }
  } catch (const vi::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
