#include "trigkrylov/bench_suites.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <iomanip>
#include <ostream>

#include "trigkrylov/problems.hpp"

namespace trigkrylov {

namespace {

struct SuiteLayout {
  std::vector<std::size_t> grids;
  std::vector<double> tols;
  std::vector<SolverKind> solvers;
  double t_final = 1.0;
};

const std::vector<SolverKind> kWaveSolvers = {SolverKind::RtSimultaneous, SolverKind::RtSequential,
                                              SolverKind::Gautschi, SolverKind::TwoPassLanczos};
const std::vector<SolverKind> kTransportSolvers = {SolverKind::RtSimultaneous,
                                                   SolverKind::RtSequential, SolverKind::Gautschi,
                                                   SolverKind::FirstOrderBlock};

SuiteLayout layout(BenchSuite suite, const BenchOptions& opts) {
  switch (suite) {
    case BenchSuite::Table2:
    case BenchSuite::Table3:
      return {{10, 20, 40, 80}, {1e-4, 1e-6}, kWaveSolvers, 1.0};
    case BenchSuite::Table4:
      return {{10, 20, 40, 80}, {1e-4, 1e-6, 1e-8}, kWaveSolvers, 10.0};
    case BenchSuite::Table5:
      return {{128, 256, 512, 1024}, {1e-4, 1e-6}, kTransportSolvers, 1.0};
    case BenchSuite::FigTolSweep: {
      std::vector<double> tols;
      for (int e = 1; e <= 8; ++e) tols.push_back(std::pow(10.0, -e));
      const bool transport = opts.sweep_problem == "transport";
      return {{transport ? std::size_t{512} : std::size_t{40}}, tols,
              transport ? kTransportSolvers : kWaveSolvers, 1.0};
    }
  }
  return {};
}

ProblemSpec problem_for(BenchSuite suite, const BenchOptions& opts, std::size_t n, double t) {
  switch (suite) {
    case BenchSuite::Table2:
      return WaveProblemSpec::isotropic(n, t);
    case BenchSuite::Table3:
    case BenchSuite::Table4:
      return WaveProblemSpec::anisotropic(n, t);
    case BenchSuite::Table5: {
      TransportProblemSpec s;
      s.nx = n;
      s.t_final = t;
      return s;
    }
    case BenchSuite::FigTolSweep:
      if (opts.sweep_problem == "anisotropic") return WaveProblemSpec::anisotropic(n, t);
      if (opts.sweep_problem == "transport") {
        TransportProblemSpec s;
        s.nx = n;
        s.t_final = t;
        return s;
      }
      return WaveProblemSpec::isotropic(n, t);
  }
  return WaveProblemSpec::isotropic(n, t);
}

template <class T>
std::vector<T> restrict_to(const std::vector<T>& all, const std::vector<T>& keep) {
  if (keep.empty()) return all;
  std::vector<T> out;
  for (const T& x : all) {
    if (std::find(keep.begin(), keep.end(), x) != keep.end()) out.push_back(x);
  }
  return out;
}

std::vector<double> restrict_tols(const std::vector<double>& all, const std::vector<double>& keep) {
  if (keep.empty()) return all;
  std::vector<double> out;
  for (double x : all) {
    for (double k : keep) {
      if (std::abs(x - k) <= 1e-9 * std::abs(k)) {
        out.push_back(x);
        break;
      }
    }
  }
  return out;
}

}  // namespace

std::optional<BenchSuite> parse_suite(std::string_view name) {
  if (name == "table2") return BenchSuite::Table2;
  if (name == "table3") return BenchSuite::Table3;
  if (name == "table4") return BenchSuite::Table4;
  if (name == "table5") return BenchSuite::Table5;
  if (name == "fig-tol-sweep") return BenchSuite::FigTolSweep;
  return std::nullopt;
}

std::string_view suite_name(BenchSuite suite) {
  switch (suite) {
    case BenchSuite::Table2: return "table2";
    case BenchSuite::Table3: return "table3";
    case BenchSuite::Table4: return "table4";
    case BenchSuite::Table5: return "table5";
    case BenchSuite::FigTolSweep: return "fig-tol-sweep";
  }
  return "?";
}

std::size_t scaled_grid(std::size_t n, double scale) {
  const auto s = static_cast<std::size_t>(std::floor(static_cast<double>(n) * scale));
  return std::max<std::size_t>(4, s);
}

double adjusted_tolerance(BenchSuite suite, SolverKind solver, double tol) {
  switch (suite) {
    case BenchSuite::Table3:
    case BenchSuite::Table4:
      if (solver == SolverKind::Gautschi) return tol / 10.0;
      if (solver == SolverKind::TwoPassLanczos) return tol * 10.0;
      return tol;
    case BenchSuite::Table5:
      return solver == SolverKind::FirstOrderBlock ? tol * 10.0 : tol;
    default:
      return tol;
  }
}

BenchResult run_bench_suite(BenchSuite suite, const BenchOptions& opts) {
  if (!(opts.scale > 0.0)) throw PreconditionError("bench: scale must be positive");
  const SuiteLayout lay = layout(suite, opts);
  const auto grids = restrict_to(lay.grids, opts.grids);
  const auto tols = restrict_tols(lay.tols, opts.tolerances);
  const auto solvers = restrict_to(lay.solvers, opts.solvers);
  if (grids.empty() || tols.empty() || solvers.empty()) {
    throw PreconditionError("bench: empty selection for suite " + std::string(suite_name(suite)));
  }

  using Clock = std::chrono::steady_clock;
  const auto start = Clock::now();
  BenchResult result;

  for (std::size_t n0 : grids) {
    const std::size_t n = scaled_grid(n0, opts.scale);
    const ProblemSpec spec = problem_for(suite, opts, n, lay.t_final);
    const SecondOrderIVP ivp = build_problem(spec);
    std::optional<State> ref;

    for (double tol : tols) {
      for (SolverKind kind : solvers) {
        BenchCell cell;
        cell.suite = suite_name(suite);
        cell.problem = describe(spec);
        cell.grid = n;
        cell.t_final = lay.t_final;
        cell.tol = tol;
        cell.tol_used = adjusted_tolerance(suite, kind, tol);
        cell.solver = kind;

        if (opts.max_seconds &&
            std::chrono::duration<double>(Clock::now() - start).count() > *opts.max_seconds) {
          result.truncated = true;
          return result;
        }
        if (!ref) ref = preset_reference(spec, ivp);

        SolverConfig cfg;
        cfg.m_max = opts.m_max;
        cfg.alpha = opts.alpha;
        cfg.scope = opts.scope;
        cfg.tol = cell.tol_used;
        try {
          const auto t0 = Clock::now();
          const SolveReport rep = solve(kind, ivp, cfg);
          cell.seconds = std::chrono::duration<double>(Clock::now() - t0).count();
          cell.matvecs = rep.matvecs;
          cell.cycles = rep.cycles;
          cell.repairs = rep.repair_events;
          cell.rel_accuracy = (rep.y - ref->y).norm() / ref->y.norm();
        } catch (const Error& e) {
          cell.status = std::string("error: ") + e.what();
        }
        result.cells.push_back(std::move(cell));
      }
    }
  }
  return result;
}

void write_bench_csv(std::ostream& os, const BenchResult& result, bool timings) {
  os << "suite,problem,grid,t,tol,tol_used,solver,matvecs,rel_accuracy,seconds,cycles,repairs,"
        "status\n";
  const auto old_flags = os.flags();
  const auto old_prec = os.precision();
  for (const BenchCell& c : result.cells) {
    std::string status = c.status;
    std::replace(status.begin(), status.end(), ',', ';');
    os << c.suite << ',' << c.problem << ',' << c.grid << ',' << std::defaultfloat
       << std::setprecision(6) << c.t_final << ',' << c.tol << ',' << c.tol_used << ','
       << solver_name(c.solver) << ',' << c.matvecs << ',' << std::scientific
       << std::setprecision(3) << c.rel_accuracy << ',' << std::fixed << std::setprecision(4)
       << (timings ? c.seconds : 0.0) << ',' << c.cycles << ',' << c.repairs << ',' << status
       << '\n';
  }
  if (result.truncated) os << "# truncated: time budget exhausted\n";
  os.flags(old_flags);
  os.precision(old_prec);
}

}  // namespace trigkrylov
