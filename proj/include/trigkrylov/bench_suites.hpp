#pragma once

// Grid x tolerance x solver benchmark matrices and their CSV output.

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "trigkrylov/integrators.hpp"

namespace trigkrylov {

enum class BenchSuite { Table2, Table3, Table4, Table5, FigTolSweep };

/// "table2", "table3", "table4", "table5", "fig-tol-sweep".
std::optional<BenchSuite> parse_suite(std::string_view name);
std::string_view suite_name(BenchSuite suite);

struct BenchOptions {
  double scale = 1.0;
  /// Restrict to these unscaled grid sizes (e.g. {10, 20}); empty keeps all.
  std::vector<std::size_t> grids;
  /// Restrict to these nominal tolerances; empty keeps all.
  std::vector<double> tolerances;
  /// Restrict to these solvers; empty keeps the suite's set.
  std::vector<SolverKind> solvers;
  int m_max = 30;
  double alpha = 0.85;
  ThresholdScope scope = ThresholdScope::PerCycle;
  /// fig-tol-sweep problem: "isotropic", "anisotropic" or "transport".
  std::string sweep_problem = "isotropic";
  /// Wall-clock budget; cells are skipped once it is exhausted.
  std::optional<double> max_seconds;
};

struct BenchCell {
  std::string suite;
  std::string problem;
  std::size_t grid = 0;        // after scaling
  double t_final = 1.0;
  double tol = 0.0;            // nominal (row) tolerance
  double tol_used = 0.0;       // after the per-solver adjustment
  SolverKind solver = SolverKind::RtSequential;
  std::uint64_t matvecs = 0;
  double rel_accuracy = 0.0;   // ||y - y_ref|| / ||y_ref||
  double seconds = 0.0;
  int cycles = 0;
  int repairs = 0;
  std::string status = "ok";
};

struct BenchResult {
  std::vector<BenchCell> cells;
  bool truncated = false;
};

/// n -> max(4, floor(n * scale)).
std::size_t scaled_grid(std::size_t n, double scale);

/// Tolerance each solver runs with for a nominal row tolerance.
double adjusted_tolerance(BenchSuite suite, SolverKind solver, double tol);

BenchResult run_bench_suite(BenchSuite suite, const BenchOptions& opts);

/// Header: suite,problem,grid,t,tol,tol_used,solver,matvecs,rel_accuracy,seconds,cycles,repairs,status
/// With `timings` off the seconds column is written as 0 so output is reproducible.
void write_bench_csv(std::ostream& os, const BenchResult& result, bool timings = true);

}  // namespace trigkrylov
