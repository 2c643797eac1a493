#pragma once

// Krylov integrators for y'' = -A y + g.

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "trigkrylov/ivp.hpp"
#include "trigkrylov/krylov.hpp"

namespace trigkrylov {

/// PerCycle measures each restart against its own inflow norms; Initial keeps
/// the absolute threshold computed from u, v and g. The first-order block
/// solver always uses Initial.
enum class ThresholdScope { PerCycle, Initial };

struct SolverConfig {
  int m_max = 30;
  double tol = 1e-6;
  double alpha = 0.85;  // Gautschi safety factor for the initial runs
  bool reorth = false;
  int check_interval = 10;  // two-pass Lanczos
  /// Two-pass iteration cap per branch; 0 selects 10 * m_max * 20.
  int max_iterations = 0;
  /// Per-basis dimension of the solvers that keep two bases (or one basis of
  /// doubled length) alive; defaults to m_max / 2.
  std::optional<int> per_basis_cap;
  /// Gautschi: also evaluate the closing half step so that v_out = v_N.
  bool final_velocity = false;
  /// Replaces the tolerance-derived absolute residual threshold.
  std::optional<double> abs_threshold;
  ThresholdScope scope = ThresholdScope::PerCycle;

  void validate() const;
  [[nodiscard]] int basis_cap() const { return per_basis_cap.value_or(m_max / 2); }
};

struct ResidualLogEntry {
  int cycle = 0;
  std::string branch;  // "psi", "sigma", "combined", "phi"
  Eigen::Index m = 0;
  double t0 = 0.0;
  double t1 = 0.0;
  double max_residual = 0.0;
};

struct SolveReport {
  Vector y;
  Vector v_out;
  /// Gautschi returns averaged velocities rather than y'(t).
  bool v_out_averaged = false;
  std::uint64_t matvecs = 0;
  int cycles = 0;
  int restarts = 0;
  std::vector<double> step_sizes;
  std::vector<ResidualLogEntry> residual_log;
  int repair_events = 0;
  double threshold = 0.0;  // absolute residual threshold of the first cycle
};

enum class SolverKind { RtSimultaneous, RtSequential, Gautschi, TwoPassLanczos, FirstOrderBlock };

/// "rt-sim", "rt-seq", "gautschi", "two-pass", "first-order".
std::optional<SolverKind> parse_solver(std::string_view name);
std::string_view solver_name(SolverKind kind);

SolveReport rt_simultaneous(const SecondOrderIVP& ivp, const SolverConfig& cfg);
SolveReport rt_sequential(const SecondOrderIVP& ivp, const SolverConfig& cfg);
SolveReport gautschi(const SecondOrderIVP& ivp, const SolverConfig& cfg);
SolveReport two_pass_lanczos(const SecondOrderIVP& ivp, const SolverConfig& cfg);
SolveReport rt_first_order_block(const SecondOrderIVP& ivp, const SolverConfig& cfg);

struct GautschiIncrement {
  Vector x;
  Eigen::Index m = 0;
  double max_residual = 0.0;  // coarse residual on [0, delta]
  bool repaired = false;
};

/// x = delta/2 psi(delta^2 A) w from one Krylov run of at most m_max vectors.
/// When the residual exceeds thr before delta the run is bridged by
/// rt_sequential with the absolute threshold thr.
GautschiIncrement gautschi_increment(const OperatorPtr& op, const Vector& w, double delta,
                                     double thr, const SolverConfig& cfg);

SolveReport solve(SolverKind kind, const SecondOrderIVP& ivp, const SolverConfig& cfg);

/// The Gautschi recurrence with exact dense matrix functions and a fixed step.
/// Entry k holds y_k and the averaged velocity v_k.
std::vector<State> gautschi_dense(const Matrix& a, const Vector& u, const Vector& v,
                                  const Vector& g, double delta, int steps);

}  // namespace trigkrylov
