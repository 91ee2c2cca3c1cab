#include "vi/harness.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <limits>
#include <sstream>

#include "vi/projections.hpp"

namespace vi {

namespace {

constexpr std::uint64_t kStartStream = 0x9E3779B97F4A7C15ULL;
constexpr double kFeasibilityTol = 1e-10;
constexpr double kHalfspaceTol = 1e-10;
constexpr double kInequalitySlack = 1e-9;

std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split(std::string_view s, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = s.find(sep, start);
    out.push_back(trim(s.substr(start, pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

double parse_double(const std::string& s, const std::string& key) {
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (s.empty() || end != s.c_str() + s.size()) {
    throw ConfigurationError("invalid number for '" + key + "': '" + s + "'");
  }
  return v;
}

template <typename Int>
Int parse_int(const std::string& s, const std::string& key) {
  Int v{};
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || ec != std::errc{} || ptr != s.data() + s.size()) {
    throw ConfigurationError("invalid integer for '" + key + "': '" + s + "'");
  }
  return v;
}

std::vector<AlgorithmId> parse_algorithm_list(const std::string& text) {
  std::vector<AlgorithmId> out;
  if (trim(text) == "all") return {kAllAlgorithms.begin(), kAllAlgorithms.end()};
  for (const auto& item : split(text, ',')) {
    if (item.empty()) continue;
    auto id = parse_algorithm(item);
    if (!id) throw ConfigurationError("unknown algorithm '" + item + "'");
    out.push_back(*id);
  }
  return out;
}

double named_start_value(const std::string& id, double t) {
  if (id == "t2") return t * t;
  if (id == "pow2t") return std::exp2(t);
  if (id == "expt") return std::exp(t);
  if (id == "tcos") return t + 0.5 * std::cos(t);
  throw ConfigurationError("unknown start function '" + id + "'");
}

}  // namespace

std::string_view to_string(ExampleId id) {
  switch (id) {
    case ExampleId::ex1: return "ex1";
    case ExampleId::ex2: return "ex2";
    case ExampleId::ex3: return "ex3";
  }
  return "?";
}

std::optional<ExampleId> parse_example(std::string_view name) {
  if (name == "ex1") return ExampleId::ex1;
  if (name == "ex2") return ExampleId::ex2;
  if (name == "ex3") return ExampleId::ex3;
  return std::nullopt;
}

StartSpec StartSpec::random(double scale) {
  return StartSpec{.kind = Kind::RandomScaled, .scale = scale, .name = {}};
}

StartSpec StartSpec::named(std::string id) {
  if (id == "t_plus_halfcos") id = "tcos";
  named_start_value(id, 0.0);  // rejects unknown ids
  return StartSpec{.kind = Kind::Named, .scale = 1.0, .name = std::move(id)};
}

StartSpec StartSpec::parse(std::string_view text) {
  const std::string s = trim(text);
  if (s == "random") return random(1.0);
  if (s.rfind("random:", 0) == 0) return random(parse_double(s.substr(7), "start"));
  return named(s);
}

std::string StartSpec::to_string() const {
  return kind == Kind::RandomScaled ? "random:" + fmt17(scale) : name;
}

int effective_max_iter(const BenchConfig& cfg) {
  if (cfg.max_iter) return *cfg.max_iter;
  return cfg.example == ExampleId::ex3 ? 50 : 400;
}

StartSpec effective_start(const BenchConfig& cfg) {
  if (cfg.start) return *cfg.start;
  return cfg.example == ExampleId::ex3 ? StartSpec::named("t2") : StartSpec::random(1.0);
}

void validate_config(const BenchConfig& cfg) {
  if (cfg.example == ExampleId::ex2 && (!cfg.n || *cfg.n < 1)) {
    throw ConfigurationError("ex2 requires --n >= 1");
  }
  if (cfg.example == ExampleId::ex3 && (!cfg.points || *cfg.points < 2)) {
    throw ConfigurationError("ex3 requires --points >= 2");
  }
  if (cfg.algorithms.empty()) throw ConfigurationError("no algorithms selected");
  if (effective_max_iter(cfg) < 0) throw ConfigurationError("max_iter must be >= 0");
  if (cfg.tol && !(*cfg.tol >= 0)) throw ConfigurationError("tol must be >= 0");
  const StartSpec start = effective_start(cfg);
  if (start.kind == StartSpec::Kind::RandomScaled && !(start.scale > 0)) {
    throw ConfigurationError("start scale must be > 0");
  }
  if (start.kind == StartSpec::Kind::Named && cfg.example != ExampleId::ex3) {
    throw ConfigurationError("named start functions need the L2 example (ex3)");
  }
}

std::string config_echo(const BenchConfig& cfg) {
  std::ostringstream os;
  os << "example=" << to_string(cfg.example)
     << " n=" << (cfg.n ? std::to_string(*cfg.n) : "-")
     << " points=" << (cfg.points ? std::to_string(*cfg.points) : "-")
     << " seed=" << cfg.seed << " max_iter=" << effective_max_iter(cfg)
     << " tol=" << (cfg.tol ? fmt17(*cfg.tol) : "-")
     << " start=" << effective_start(cfg).to_string() << " algorithms=";
  for (std::size_t i = 0; i < cfg.algorithms.size(); ++i) {
    os << (i ? "," : "") << to_string(cfg.algorithms[i]);
  }
  const SolverParams& p = cfg.params;
  os << " xi=" << fmt17(p.xi) << " psi1=" << fmt17(p.psi1) << " phi=" << fmt17(p.phi)
     << " sigma=" << fmt17(p.sigma) << " armijo_alpha=" << fmt17(p.armijo_alpha)
     << " armijo_ell=" << fmt17(p.armijo_ell) << " armijo_phi=" << fmt17(p.armijo_phi)
     << " fixed_step_scale=" << fmt17(p.fixed_step_scale) << " rules=paper";
  return os.str();
}

void apply_config_text(BenchConfig& cfg, std::string_view text) {
  std::istringstream in{std::string(text)};
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    const std::string content = trim(line);
    if (content.empty()) continue;
    const auto eq = content.find('=');
    if (eq == std::string::npos) {
      throw ConfigurationError("config line " + std::to_string(lineno) + ": expected key = value");
    }
    const std::string key = trim(content.substr(0, eq));
    const std::string value = trim(content.substr(eq + 1));
    SolverParams& sp = cfg.params;
    if (key == "example") {
      auto id = parse_example(value);
      if (!id) throw ConfigurationError("unknown example '" + value + "'");
      cfg.example = *id;
    } else if (key == "n") {
      cfg.n = parse_int<Eigen::Index>(value, key);
    } else if (key == "points") {
      cfg.points = parse_int<Eigen::Index>(value, key);
    } else if (key == "seed") {
      cfg.seed = parse_int<std::uint64_t>(value, key);
    } else if (key == "algorithms") {
      cfg.algorithms = parse_algorithm_list(value);
    } else if (key == "max_iter") {
      cfg.max_iter = parse_int<int>(value, key);
    } else if (key == "tol") {
      cfg.tol = parse_double(value, key);
    } else if (key == "start") {
      cfg.start = StartSpec::parse(value);
    } else if (key == "preset") {
      if (value != "paper") throw ConfigurationError("unknown preset '" + value + "'");
      sp = paper_preset();
    } else if (key == "xi") {
      sp.xi = parse_double(value, key);
    } else if (key == "psi1") {
      sp.psi1 = parse_double(value, key);
    } else if (key == "phi") {
      sp.phi = parse_double(value, key);
    } else if (key == "sigma") {
      sp.sigma = parse_double(value, key);
    } else if (key == "armijo_alpha") {
      sp.armijo_alpha = parse_double(value, key);
    } else if (key == "armijo_ell") {
      sp.armijo_ell = parse_double(value, key);
    } else if (key == "armijo_phi") {
      sp.armijo_phi = parse_double(value, key);
    } else if (key == "fixed_step_scale") {
      sp.fixed_step_scale = parse_double(value, key);
    } else {
      throw ConfigurationError("config line " + std::to_string(lineno) + ": unknown key '" +
                               key + "'");
    }
  }
}

void apply_config_file(BenchConfig& cfg, const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigurationError("cannot read config file " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  apply_config_text(cfg, buf.str());
}

std::optional<std::uint64_t> seed_from_env() {
  const char* raw = std::getenv("VI_SOLVE_SEED");
  if (!raw) return std::nullopt;
  std::uint64_t v{};
  const std::string s = trim(raw);
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || ec != std::errc{} || ptr != s.data() + s.size()) return std::nullopt;
  return v;
}

Problem build_problem(const BenchConfig& cfg) {
  validate_config(cfg);
  switch (cfg.example) {
    case ExampleId::ex1: return make_example1();
    case ExampleId::ex2: return make_example2(*cfg.n, cfg.seed);
    case ExampleId::ex3: return make_example3(*cfg.points);
  }
  throw ConfigurationError("unknown example");
}

HVector make_start(const BenchConfig& cfg, const SpaceDescriptor& space) {
  const StartSpec start = effective_start(cfg);
  if (start.kind == StartSpec::Kind::Named) {
    if (!space.is_grid()) {
      throw ConfigurationError("start function '" + start.name + "' needs a GridL2 space");
    }
    return sample_on_grid(space, [&](double t) { return named_start_value(start.name, t); });
  }
  if (!(start.scale > 0)) throw ConfigurationError("start scale must be > 0");
  Rng rng(cfg.seed ^ kStartStream);
  return start.scale * random_vector(space, rng, 0.0, 1.0);
}

std::vector<RunRecord> compare(const BenchConfig& cfg) {
  const Problem problem = build_problem(cfg);
  const HVector x1 = make_start(cfg, problem.space);
  const StopRule stop{.max_iter = effective_max_iter(cfg), .tol = cfg.tol};
  const std::string echo = config_echo(cfg);

  std::vector<RunRecord> records;
  records.reserve(cfg.algorithms.size());
  for (AlgorithmId alg : cfg.algorithms) {
    RunRecord rec{.algorithm = alg,
                  .trace = IterationTrace{.algorithm = alg, .rows = {}, .final_x = x1},
                  .seed = cfg.seed,
                  .config = echo};
    try {
      rec.trace = run(problem, alg, cfg.params, stop, x1);
    } catch (const Error& e) {
      rec.trace.complete = false;
      rec.trace.error = e.what();
    }
    records.push_back(std::move(rec));
  }
  return records;
}

void write_csv(std::ostream& out, const std::vector<RunRecord>& records,
               const BenchConfig& cfg) {
  out << "# seed=" << cfg.seed << "\n";
  out << "# config: " << config_echo(cfg) << "\n";
  for (const auto& rec : records) {
    if (!rec.trace.complete) {
      out << "# error " << to_string(rec.algorithm) << ": " << rec.trace.error << "\n";
    }
  }
  out << "algorithm,k,D_k,psi_k,xi_k,residual_uy,residual_Tz,elapsed_s\n";
  for (const auto& rec : records) {
    const std::string_view name = to_string(rec.algorithm);
    for (const TraceRow& r : rec.trace.rows) {
      out << name << ',' << r.k << ',' << fmt17(r.D_k) << ',' << fmt17(r.psi_k) << ','
          << fmt17(r.xi_k) << ',' << fmt17(r.residual_uy) << ',' << fmt17(r.residual_Tz) << ','
          << fmt17(r.elapsed_s) << '\n';
    }
  }
}

void emit_csv(const std::vector<RunRecord>& records, const std::filesystem::path& path,
              const BenchConfig& cfg) {
  std::ofstream out(path);
  if (!out) throw Error("cannot open " + path.string() + " for writing");
  write_csv(out, records, cfg);
  out.flush();
  if (!out) throw Error("write failed for " + path.string());
}

CsvTable read_csv(std::istream& in) {
  CsvTable table;
  std::string line;
  bool header_seen = false;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (line[0] == '#') {
      table.comments.push_back(line);
      continue;
    }
    if (!header_seen) {
      header_seen = true;
      continue;
    }
    const auto f = split(line, ',');
    if (f.size() != 8) throw Error("malformed CSV row: " + line);
    table.rows.push_back(CsvRow{
        .algorithm = f[0],
        .row = TraceRow{.k = parse_int<int>(f[1], "k"),
                        .D_k = std::strtod(f[2].c_str(), nullptr),
                        .psi_k = std::strtod(f[3].c_str(), nullptr),
                        .xi_k = std::strtod(f[4].c_str(), nullptr),
                        .residual_uy = std::strtod(f[5].c_str(), nullptr),
                        .residual_Tz = std::strtod(f[6].c_str(), nullptr),
                        .elapsed_s = std::strtod(f[7].c_str(), nullptr)},
    });
  }
  return table;
}

CsvTable read_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path.string());
  return read_csv(in);
}

// ---------------------------------------------------------------------------
// Invariant suite

bool ValidationReport::passed() const {
  return std::all_of(checks.begin(), checks.end(), [](const auto& c) { return c.passed; });
}

namespace {

constexpr double kNoViolation = -std::numeric_limits<double>::infinity();

// Tracks the largest value of (lhs - rhs) seen for one inequality.
struct Tally {
  double worst = kNoViolation;
  int count = 0;
  void add(double violation) {
    worst = std::max(worst, violation);
    ++count;
  }
  CheckResult result(std::string name, double tol, std::string detail = {}) const {
    if (detail.empty()) detail = std::to_string(count) + " samples";
    return {std::move(name), worst <= tol, worst, std::move(detail)};
  }
};

HVector spread_sample(const SpaceDescriptor& space, Rng& rng) {
  const double scale = std::pow(10.0, rng.uniform(-1.0, 1.0));
  return scale * random_vector(space, rng);
}

void check_projection(ValidationReport& rep, const Problem& p, Rng& rng, int samples) {
  Tally idem, firm, vari;
  for (int i = 0; i < samples; ++i) {
    const HVector x = spread_sample(p.space, rng);
    const HVector y = spread_sample(p.space, rng);
    const HVector px = project(p.C, x);
    const HVector py = project(p.C, y);
    idem.add(distance(project(p.C, px), px));
    firm.add(squared_norm(px - py) - inner(px - py, x - y));
    vari.add(inner(x - px, py - px));
  }
  rep.checks.push_back(idem.result("projection.idempotence", 1e-12));
  rep.checks.push_back(firm.result("projection.firm_nonexpansive", 1e-10));
  rep.checks.push_back(vari.result("projection.variational", 1e-10));
}

void check_operators(ValidationReport& rep, const Problem& p, Rng& rng, int samples) {
  Tally mono, lip, demi, strong;
  const auto L = p.A.meta().lipschitz;
  const double vartheta = p.T.meta().demicontractive.value_or(0.0);
  const auto eta = p.S.meta().strong_monotonicity;
  for (int i = 0; i < samples; ++i) {
    const HVector x = spread_sample(p.space, rng);
    const HVector y = spread_sample(p.space, rng);
    const HVector dA = p.A(x) - p.A(y);
    mono.add(-inner(dA, x - y));
    if (L) lip.add(norm(dA) - (*L + 1e-8) * distance(x, y));
    if (p.known_solution) {
      const HVector& z = *p.known_solution;
      const HVector Tx = p.T(x);
      demi.add(squared_norm(Tx - z) - squared_norm(x - z) - vartheta * squared_norm(x - Tx));
    }
    if (eta) {
      strong.add((*eta - 1e-10) * squared_norm(x - y) - inner(p.S(x) - p.S(y), x - y));
    }
  }
  rep.checks.push_back(mono.result("operator.A_monotone", 1e-10));
  if (L) rep.checks.push_back(lip.result("operator.A_lipschitz", 0.0));
  if (p.known_solution) rep.checks.push_back(demi.result("operator.T_demicontractive", 1e-10));
  if (eta) rep.checks.push_back(strong.result("operator.S_strongly_monotone", 0.0));
}

// Per-iteration checks for one algorithm run.
void check_algorithm(ValidationReport& rep, const Problem& p, const BenchConfig& cfg,
                     AlgorithmId alg, const HVector& x1, Rng& rng) {
  const std::string tag(to_string(alg));
  const SolverParams& params = cfg.params;
  const bool subgradient = uses_subgradient_step(alg);
  const bool has_distance_bound = alg != AlgorithmId::HSEGM;
  const bool inertial = alg == AlgorithmId::ISEGM || alg == AlgorithmId::ITEGM ||
                        alg == AlgorithmId::COR1_HALPERN || alg == AlgorithmId::COR2_VISCOSITY;
  const double phi = alg == AlgorithmId::STEGM ? params.armijo_phi : params.phi;

  Tally feas, slack, cover, bound, tseng, inertia, monotone_psi;
  double min_psi = std::numeric_limits<double>::infinity();
  double prev_psi = std::numeric_limits<double>::infinity();

  const auto observer = [&](const SolverState& s, const StepReport& r) {
    feas.add(distance(project(p.C, r.y), r.y) - kFeasibilityTol);
    if (subgradient && r.halfspace_slack) {
      // Signed distances to the boundary of H_k, relative to the size of
      // the projected point u - psi A y; on the linear example both the
      // normal and that point reach 1e4 or more.
      const HalfSpace h = halfspace_for_subgradient_step(r.u, r.psi_k, p.A(r.u), r.y);
      if (!h.degenerate()) {
        const double magnitude = 1.0 + norm(r.u - r.psi_k * p.A(r.y));
        const double scale = std::sqrt(h.normal_squared_norm()) * magnitude;
        slack.add(*r.halfspace_slack / scale);
        for (int i = 0; i < 4; ++i) {
          const HVector c = project(p.C, spread_sample(p.space, rng));
          cover.add(h.violation(c) / scale);
        }
      }
    }
    if (has_distance_bound && r.lemma_lhs_rhs) bound.add(r.lemma_lhs_rhs->first - r.lemma_lhs_rhs->second);
    if (uses_tseng_step(alg)) {
      tseng.add(distance(r.z, r.y) - phi * (r.psi_k / r.psi_next) * distance(r.u, r.y));
    }
    if (inertial) {
      const double gap = distance(s.x_cur, s.x_prev);
      if (gap > 0) inertia.add(r.xi_k * gap - params.rules.zeta(s.k) * (1.0 + 1e-12));
    }
    monotone_psi.add(r.psi_k - prev_psi);
    prev_psi = r.psi_k;
    min_psi = std::min(min_psi, r.psi_k);
  };

  std::optional<IterationTrace> trace;
  try {
    trace = run(p, alg, params, StopRule{.max_iter = effective_max_iter(cfg), .tol = {}}, x1,
                std::nullopt, observer);
  } catch (const Error& e) {
    rep.checks.push_back({tag + ".run", false, std::numeric_limits<double>::quiet_NaN(), e.what()});
    return;
  }
  rep.checks.push_back({tag + ".run", trace->complete, trace->complete ? 0.0 : 1.0,
                        trace->complete ? std::to_string(trace->rows.size()) + " iterations"
                                        : trace->error});
  rep.checks.push_back(feas.result(tag + ".feasibility", 0.0));
  if (subgradient) {
    rep.checks.push_back(slack.result(tag + ".halfspace_slack", kHalfspaceTol));
    rep.checks.push_back(cover.result(tag + ".C_in_halfspace", kHalfspaceTol));
  }
  if (has_distance_bound && p.known_solution) {
    rep.checks.push_back(bound.result(tag + ".distance_bound", kInequalitySlack));
  }
  if (uses_tseng_step(alg)) rep.checks.push_back(tseng.result(tag + ".tseng_residual", kInequalitySlack));
  if (inertial) rep.checks.push_back(inertia.result(tag + ".inertia_bound", 0.0));
  // Armijo restarts from alpha every iteration, so only the adaptive and
  // fixed steps are monotone.
  if (alg != AlgorithmId::STEGM) {
    rep.checks.push_back(monotone_psi.result(tag + ".psi_nonincreasing", 0.0));
  }

  if (const auto L = p.A.meta().lipschitz; L && !trace->rows.empty()) {
    double floor = 0.0;
    switch (alg) {
      case AlgorithmId::HSEGM: floor = params.fixed_step_scale / *L; break;
      case AlgorithmId::STEGM:
        floor = std::min(params.armijo_alpha, params.armijo_phi * params.armijo_ell / *L);
        break;
      default: floor = std::min(params.psi1, params.phi / *L); break;
    }
    rep.checks.push_back({tag + ".psi_floor", min_psi >= floor - 1e-12, floor - min_psi,
                          "min psi " + fmt17(min_psi) + ", floor " + fmt17(floor)});
  }
}

}  // namespace

ValidationReport validate(const BenchConfig& cfg) {
  ValidationReport rep;
  const Problem p = build_problem(cfg);
  Rng rng(cfg.seed ^ 0xA5A5A5A5DEADBEEFULL);

  try {
    check_problem(p);
    rep.checks.push_back({"problem.invariants", true, 0.0, p.name});
  } catch (const Error& e) {
    rep.checks.push_back({"problem.invariants", false, 1.0, e.what()});
  }

  const auto& sm = p.S.meta();
  bool sigma_ok = false;
  if (sm.strong_monotonicity && sm.lipschitz_of_s) {
    const double bound = 2.0 * *sm.strong_monotonicity / (*sm.lipschitz_of_s * *sm.lipschitz_of_s);
    sigma_ok = cfg.params.sigma > 0 && cfg.params.sigma < bound;
    rep.checks.push_back({"params.sigma_precondition", sigma_ok, cfg.params.sigma - bound,
                          "sigma " + fmt17(cfg.params.sigma) + " vs 2 eta/kappa^2 " +
                              fmt17(bound)});
  }

  check_projection(rep, p, rng, 1000);
  check_operators(rep, p, rng, 1000);

  if (sigma_ok) {
    const auto U = [&](const HVector& x) { return project(p.C, x); };
    const ContractionCheck cc =
        verify_contraction(p.S, U, cfg.params.sigma, 1.0, p.space, 1000, cfg.seed);
    rep.checks.push_back({"contraction.bound", cc.max_ratio <= cc.diagnostics.bound() + 1e-9,
                          cc.max_ratio - cc.diagnostics.bound(),
                          "gamma " + fmt17(cc.diagnostics.gamma) + ", max ratio " +
                              fmt17(cc.max_ratio)});
  }

  const HVector x1 = make_start(cfg, p.space);
  for (AlgorithmId alg : cfg.algorithms) check_algorithm(rep, p, cfg, alg, x1, rng);
  return rep;
}

void print_report(std::ostream& out, const ValidationReport& report) {
  for (const auto& c : report.checks) {
    out << (c.passed ? "PASS " : "FAIL ") << c.name << "  worst=" << fmt17(c.worst) << "  ("
        << c.detail << ")\n";
  }
  out << (report.passed() ? "all checks passed" : "validation FAILED") << "\n";
}

}  // namespace vi
