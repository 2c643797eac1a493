#include "cli.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <optional>
#include <ostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "trigkrylov/bench_suites.hpp"
#include "trigkrylov/bounds.hpp"
#include "trigkrylov/integrators.hpp"
#include "trigkrylov/matrix_market.hpp"
#include "trigkrylov/problems.hpp"
#include "trigkrylov/smallfun.hpp"

namespace trigkrylov::cli {

namespace {

struct RunConfig {
  std::string problem;
  std::string matrix;
  std::string u_file, v_file, g_file;
  std::string solver = "rt-seq";
  double tol = 1e-6;
  int m_max = 30;
  double alpha = 0.85;
  std::optional<double> t;
  double scale = 1.0;
  std::string out;
  std::uint64_t seed = 1;
  bool physical_velocity = false;
  bool no_reference = false;
  bool fixed_threshold = false;
  // bench
  std::string suite;
  std::vector<std::size_t> grids;
  std::vector<double> tols;
  std::vector<std::string> solvers;
  std::string sweep_problem = "isotropic";
  std::optional<double> max_seconds;
  bool no_timing = false;
  // bounds
  std::string m_range = "2:8";
  std::vector<double> times = {0.0, 0.25, 0.5, 1.0};
};

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct LoadedProblem {
  SecondOrderIVP ivp;
  std::optional<ProblemSpec> spec;
  std::string label;
};

LoadedProblem load_problem(const RunConfig& cfg) {
  const bool have_preset = !cfg.problem.empty();
  const bool have_matrix = !cfg.matrix.empty();
  if (have_preset == have_matrix) {
    throw UsageError("exactly one of --problem and --matrix is required");
  }
  LoadedProblem lp;
  if (have_preset) {
    auto spec = parse_preset(cfg.problem);
    if (!spec) throw UsageError("unknown problem preset '" + cfg.problem + "'");
    if (auto* w = std::get_if<WaveProblemSpec>(&*spec)) {
      if (cfg.t) w->t_final = *cfg.t;
    } else {
      auto& tr = std::get<TransportProblemSpec>(*spec);
      if (cfg.t) tr.t_final = *cfg.t;
      if (cfg.physical_velocity) tr.velocity = TransportVelocity::Physical;
    }
    lp.ivp = build_problem(*spec);
    lp.spec = spec;
    lp.label = describe(*spec);
    return lp;
  }
  auto a = read_matrix_market(std::filesystem::path(cfg.matrix));
  const auto n = static_cast<Eigen::Index>(a->dim());
  lp.ivp.op = std::move(a);
  lp.ivp.u = cfg.u_file.empty() ? Vector::Zero(n) : read_vector_file(cfg.u_file);
  lp.ivp.v = cfg.v_file.empty() ? Vector::Zero(n) : read_vector_file(cfg.v_file);
  lp.ivp.g = cfg.g_file.empty() ? Vector::Zero(n) : read_vector_file(cfg.g_file);
  lp.ivp.t_final = cfg.t.value_or(1.0);
  lp.label = cfg.matrix;
  return lp;
}

SolverKind solver_or_usage(const std::string& name) {
  auto k = parse_solver(name);
  if (!k) {
    throw UsageError("unknown solver '" + name +
                     "' (expected rt-sim, rt-seq, gautschi, two-pass or first-order)");
  }
  return *k;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream os(path);
  if (!os) throw Error("cannot open " + path.string());
  os << text;
}

int cmd_solve(const RunConfig& cfg, std::ostream& out) {
  const SolverKind kind = solver_or_usage(cfg.solver);
  LoadedProblem lp = load_problem(cfg);

  SolverConfig sc;
  sc.tol = cfg.tol;
  sc.m_max = cfg.m_max;
  sc.alpha = cfg.alpha;
  sc.scope = cfg.fixed_threshold ? ThresholdScope::Initial : ThresholdScope::PerCycle;
  sc.validate();

  const auto t0 = std::chrono::steady_clock::now();
  const SolveReport rep = solve(kind, lp.ivp, sc);
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

  std::optional<double> acc;
  if (!cfg.no_reference) {
    std::optional<State> ref;
    if (lp.spec) {
      ref = preset_reference(*lp.spec, lp.ivp);
    } else if (lp.ivp.op->dim() <= 2000) {
      ref = reference_solution(lp.ivp, ReferenceMethod::Dense);
    }
    if (ref) acc = (rep.y - ref->y).norm() / ref->y.norm();
  }

  std::ostringstream acc_text;
  if (acc) {
    acc_text << std::scientific << std::setprecision(2) << *acc;
  } else {
    acc_text << "n/a";
  }
  out << "solver, matvecs, cpu_seconds, rel_accuracy\n"
      << solver_name(kind) << ", " << rep.matvecs << ", " << std::fixed << std::setprecision(4)
      << secs << ", " << acc_text.str() << '\n';

  if (!cfg.out.empty()) {
    const std::string base = cfg.out;
    std::ostringstream summary;
    summary << "solver,problem,tol,m_max,matvecs,cycles,restarts,repair_events,threshold,"
               "v_out_averaged,cpu_seconds,rel_accuracy\n"
            << solver_name(kind) << ',' << lp.label << ',' << std::defaultfloat << cfg.tol << ','
            << cfg.m_max << ',' << rep.matvecs << ',' << rep.cycles << ',' << rep.restarts << ','
            << rep.repair_events << ',' << std::scientific << std::setprecision(6)
            << rep.threshold << ',' << (rep.v_out_averaged ? 1 : 0) << ',' << std::fixed
            << std::setprecision(4) << secs << ',' << acc_text.str() << '\n';
    write_text(base + "_summary.csv", summary.str());

    std::ostringstream steps;
    steps << "index,step\n" << std::scientific << std::setprecision(16);
    for (std::size_t i = 0; i < rep.step_sizes.size(); ++i) {
      steps << i << ',' << rep.step_sizes[i] << '\n';
    }
    write_text(base + "_steps.csv", steps.str());

    std::ostringstream log;
    log << "cycle,branch,m,t0,t1,max_residual\n" << std::scientific << std::setprecision(10);
    for (const auto& e : rep.residual_log) {
      log << e.cycle << ',' << e.branch << ',' << e.m << ',' << e.t0 << ',' << e.t1 << ','
          << e.max_residual << '\n';
    }
    write_text(base + "_residuals.csv", log.str());
    write_vector_binary(std::filesystem::path(base + "_y.bin"), rep.y);
    write_vector_binary(std::filesystem::path(base + "_v.bin"), rep.v_out);
  }
  return 0;
}

int cmd_bench(const RunConfig& cfg, std::ostream& out) {
  if (cfg.suite.empty()) throw UsageError("bench: --suite is required");
  const auto suite = parse_suite(cfg.suite);
  if (!suite) throw UsageError("bench: unknown suite '" + cfg.suite + "'");
  BenchOptions opts;
  opts.scale = cfg.scale;
  opts.grids = cfg.grids;
  opts.tolerances = cfg.tols;
  for (const auto& s : cfg.solvers) opts.solvers.push_back(solver_or_usage(s));
  opts.m_max = cfg.m_max;
  opts.alpha = cfg.alpha;
  opts.scope = cfg.fixed_threshold ? ThresholdScope::Initial : ThresholdScope::PerCycle;
  opts.sweep_problem = cfg.sweep_problem;
  opts.max_seconds = cfg.max_seconds;

  const BenchResult res = run_bench_suite(*suite, opts);
  if (cfg.out.empty()) {
    write_bench_csv(out, res, !cfg.no_timing);
  } else {
    std::ofstream os(cfg.out);
    if (!os) throw Error("cannot open " + cfg.out);
    write_bench_csv(os, res, !cfg.no_timing);
    out << "wrote " << res.cells.size() << " cells to " << cfg.out
        << (res.truncated ? " (truncated)" : "") << '\n';
  }
  return 0;
}

struct BoundsProblem {
  OperatorPtr op;
  Vector w, v;
  SpectrumClass spectrum;
};

BoundsProblem bounds_problem(const RunConfig& cfg) {
  const std::string prefix = "synthetic";
  if (cfg.problem.rfind(prefix, 0) == 0) {
    const std::string rest = cfg.problem.substr(prefix.size());
    const int n = rest.empty() ? 60 : std::stoi(rest);
    if (n < 2) throw UsageError("bounds: synthetic size must be at least 2");
    std::mt19937_64 rng(cfg.seed);
    std::normal_distribution<double> normal;
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    Matrix g(n, n);
    for (int j = 0; j < n; ++j) {
      for (int i = 0; i < n; ++i) g(i, j) = normal(rng);
    }
    const Matrix q = Eigen::HouseholderQR<Matrix>(g).householderQ();
    Vector lam(n);
    for (int i = 0; i < n; ++i) lam(i) = unif(rng);
    Matrix a = q * lam.asDiagonal() * q.transpose();
    a = 0.5 * (a + a.transpose()).eval();
    Vector w(n), v(n);
    for (int i = 0; i < n; ++i) w(i) = normal(rng);
    for (int i = 0; i < n; ++i) v(i) = normal(rng);
    return {std::make_shared<DenseOperator>(a, true), w / w.norm(), v / v.norm(),
            SpectrumClass::UnitInterval};
  }
  RunConfig c = cfg;
  LoadedProblem lp = load_problem(c);
  if (!lp.ivp.op->is_symmetric()) throw PreconditionError("bounds: operator not symmetric");
  const Vector w = lp.ivp.g - lp.ivp.op->apply(lp.ivp.u);
  return {lp.ivp.op, w, lp.ivp.v, SpectrumClass::Spd};
}

std::pair<int, int> parse_range(const std::string& s) {
  const auto colon = s.find(':');
  try {
    if (colon == std::string::npos) {
      const int m = std::stoi(s);
      return {m, m};
    }
    return {std::stoi(s.substr(0, colon)), std::stoi(s.substr(colon + 1))};
  } catch (const std::exception&) {
    throw UsageError("bad range '" + s + "' (expected a:b)");
  }
}

int cmd_bounds(const RunConfig& cfg, std::ostream& out) {
  if (cfg.problem.empty() && cfg.matrix.empty()) {
    throw UsageError("bounds: --problem (preset or synthetic<n>) or --matrix is required");
  }
  const BoundsProblem bp = bounds_problem(cfg);
  const auto [m_lo, m_hi] = parse_range(cfg.m_range);
  if (m_lo < 1 || m_hi < m_lo) throw UsageError("bounds: empty m range");

  std::ofstream file;
  std::ostream* os = &out;
  if (!cfg.out.empty()) {
    file.open(cfg.out);
    if (!file) throw Error("cannot open " + cfg.out);
    os = &file;
  }
  *os << "m,t,res_psi,res_sigma,prop22,prop23_simple,prop23_tight,prop23_tight_corrected,p3,p4,"
         "violations\n";
  *os << std::scientific << std::setprecision(6);
  int violations = 0;
  for (int m = m_lo; m <= m_hi; ++m) {
    for (double t : cfg.times) {
      const BoundCheck bc = check_bounds(*bp.op, bp.w, bp.v, m, t, bp.spectrum);
      auto opt = [&](const std::optional<double>& x) {
        if (x) {
          *os << *x;
        } else {
          *os << "n/a";
        }
      };
      *os << m << ',' << t << ',' << bc.res_psi << ',' << bc.res_sigma << ',' << bc.prop22 << ',';
      opt(bc.prop23 ? std::optional<double>(bc.prop23->simple) : std::nullopt);
      *os << ',';
      opt(bc.prop23 ? std::optional<double>(bc.prop23->tight) : std::nullopt);
      *os << ',';
      opt(bc.prop23 ? std::optional<double>(bc.prop23->tight_corrected) : std::nullopt);
      *os << ',';
      opt(bc.p3);
      *os << ',';
      opt(bc.p4);
      *os << ',' << (bc.violations.empty() ? "none" : bc.violations) << '\n';
      if (!bc.violations.empty()) ++violations;
    }
  }
  if (!cfg.out.empty()) out << "violations: " << violations << '\n';
  return 0;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Krylov integrators for y'' = -A y + g"};
  app.fallthrough();
  app.set_config("--config", "", "flat key=value file; command-line flags override it");
  app.require_subcommand(1);

  RunConfig cfg;
  std::optional<double> t_opt;
  app.add_option("--problem", cfg.problem,
                 "preset: isotropic<n>, anisotropic<n>, transport<n> (bounds: synthetic<n>)");
  app.add_option("--matrix", cfg.matrix, "Matrix Market file for A");
  app.add_option("--u", cfg.u_file, "initial position vector file");
  app.add_option("--v", cfg.v_file, "initial velocity vector file");
  app.add_option("--g", cfg.g_file, "constant forcing vector file");
  app.add_option("--solver", cfg.solver, "rt-sim | rt-seq | gautschi | two-pass | first-order");
  app.add_option("--tol", cfg.tol, "residual tolerance")->check(CLI::PositiveNumber);
  app.add_option("--mmax", cfg.m_max, "maximum Krylov dimension")->check(CLI::Range(2, 100000));
  app.add_option("--alpha", cfg.alpha, "Gautschi safety factor")->check(CLI::Range(0.0, 1.0));
  app.add_option("--t", t_opt, "final time");
  app.add_option("--scale", cfg.scale, "bench grid scale factor")->check(CLI::PositiveNumber);
  app.add_option("--out", cfg.out, "output path (prefix for solve)");
  app.add_option("--seed", cfg.seed, "random seed");
  app.add_flag("--physical-velocity", cfg.physical_velocity,
               "transport: use -c u0' - alpha u0 as initial velocity");
  app.add_flag("--fixed-threshold", cfg.fixed_threshold,
               "keep the residual threshold of the initial data for every restart");
  app.add_flag("--no-reference", cfg.no_reference, "solve: skip the reference solution");
  app.add_option("--suite", cfg.suite, "table2 | table3 | table4 | table5 | fig-tol-sweep");
  app.add_option("--grids", cfg.grids, "bench: unscaled grid sizes to keep")->delimiter(',');
  app.add_option("--tols", cfg.tols, "bench: nominal tolerances to keep")->delimiter(',');
  app.add_option("--solvers", cfg.solvers, "bench: solvers to keep")->delimiter(',');
  app.add_option("--sweep-problem", cfg.sweep_problem, "fig-tol-sweep problem")
      ->check(CLI::IsMember({"isotropic", "anisotropic", "transport"}));
  app.add_option("--max-seconds", cfg.max_seconds, "bench: wall-clock budget");
  app.add_flag("--no-timing", cfg.no_timing, "bench: write 0 in the seconds column");
  app.add_option("--ms", cfg.m_range, "bounds: Krylov steps a:b");
  app.add_option("--times", cfg.times, "bounds: evaluation times")->delimiter(',');

  auto* solve_cmd = app.add_subcommand("solve", "integrate one problem");
  auto* bench_cmd = app.add_subcommand("bench", "run a benchmark suite and emit CSV");
  auto* bounds_cmd = app.add_subcommand("bounds", "compare measured residuals with a-priori bounds");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 2;
  }
  cfg.t = t_opt;

  try {
    if (solve_cmd->parsed()) return cmd_solve(cfg, out);
    if (bench_cmd->parsed()) return cmd_bench(cfg, out);
    if (bounds_cmd->parsed()) return cmd_bounds(cfg, out);
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\n\n" << app.help();
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
  return 2;
}

}  // namespace trigkrylov::cli
