#pragma once

// Arnoldi / Lanczos processes, residual curves and residual-based step search.

#include <concepts>
#include <cstdint>
#include <functional>
#include <optional>

#include "trigkrylov/linop.hpp"
#include "trigkrylov/smallfun.hpp"

namespace trigkrylov {

enum class KrylovMode {
  Auto,              // Lanczos for symmetric operators, Arnoldi otherwise
  FullArnoldi,       // modified Gram-Schmidt, whole basis kept
  Lanczos,           // three-term recurrence, whole basis kept
  LanczosThreeTerm,  // three-term recurrence, only the last two vectors kept
};

/// Happy breakdown threshold relative to ||H_m||_F.
inline constexpr double kBreakdownTol = 1e-12;

/// A V_m = V_{m+1} H_m (underlined), with H_m of size (m+1) x m.
struct KrylovDecomposition {
  KrylovMode mode = KrylovMode::FullArnoldi;
  Matrix basis;  // n x (m+1); empty in three-term mode
  Vector v_last;  // v_m  (three-term mode only)
  Vector v_next;  // v_{m+1}, zero after breakdown
  Matrix h;       // (m+1) x m
  double h_next = 0.0;
  double beta = 0.0;
  Eigen::Index m = 0;
  bool breakdown = false;

  [[nodiscard]] bool tridiagonal() const { return mode != KrylovMode::FullArnoldi; }
  [[nodiscard]] bool has_basis() const { return mode != KrylovMode::LanczosThreeTerm; }

  /// Leading m x m block of H.
  [[nodiscard]] Matrix square() const { return h.topLeftCorner(m, m); }
  [[nodiscard]] SpectralCache factorize() const;

  /// V_m c for a coefficient vector of length m.
  [[nodiscard]] Vector combine(const Vector& c) const;
};

struct KrylovOptions {
  KrylovMode mode = KrylovMode::Auto;
  bool reorth = false;
};

/// Step-by-step Krylov process; every step() costs exactly one matvec.
class KrylovBuilder {
 public:
  KrylovBuilder(const LinearOperator& op, const Vector& w, Eigen::Index capacity,
                KrylovOptions opts = {});

  /// Extends the decomposition by one vector. Returns false (without a matvec)
  /// when the capacity is exhausted or a breakdown already occurred.
  bool step();

  [[nodiscard]] Eigen::Index m() const { return m_; }
  [[nodiscard]] Eigen::Index capacity() const { return cap_; }
  [[nodiscard]] bool breakdown() const { return breakdown_; }
  [[nodiscard]] double beta() const { return beta_; }
  [[nodiscard]] double h_next() const { return h_next_; }
  [[nodiscard]] KrylovMode mode() const { return mode_; }
  [[nodiscard]] bool tridiagonal() const { return mode_ != KrylovMode::FullArnoldi; }

  /// Factorization of the current H_m (m x m).
  [[nodiscard]] SpectralCache factorize() const;
  /// Snapshot of the current state; the n x (m+1) basis is copied only on request.
  [[nodiscard]] KrylovDecomposition decomposition(bool with_basis = true) const;

  /// V_m c for a coefficient vector of length m (full-storage modes).
  [[nodiscard]] Vector combine(const Vector& c) const;

 private:
  const LinearOperator& op_;
  KrylovMode mode_;
  bool reorth_;
  Eigen::Index cap_;
  Eigen::Index m_ = 0;
  double beta_ = 0.0;
  double h_next_ = 0.0;
  double h_frob2_ = 0.0;
  bool breakdown_ = false;
  Matrix basis_;         // n x (cap+1), full-storage modes
  Vector prev_, cur_;    // three-term mode: v_{m-1}, v_m
  Vector next_;          // v_{m+1}
  Vector alpha_, betas_;  // Lanczos coefficients
  Matrix h_;              // Arnoldi Hessenberg (cap+1) x cap
};

/// Runs m_target steps (fewer on breakdown).
KrylovDecomposition krylov_build(const LinearOperator& op, const Vector& w, Eigen::Index m_target,
                                 KrylovOptions opts = {});

/// Replays the recurrence stored in `d` from the same starting vector w and
/// hands v_1 .. v_m to `visit(j, v_j)` (j zero based). Costs m-1 matvecs; for
/// Lanczos the vectors are bitwise identical to the original run.
void regenerate_basis(const LinearOperator& op, const Vector& w, const KrylovDecomposition& d,
                      const std::function<void(Eigen::Index, const Vector&)>& visit);

/// t -> ||r_m(t)|| = h_next |e_m^T u(t)| for one projected IVP.
class ResidualCurve {
 public:
  ResidualCurve(SpectralCache cache, ProjectedKind kind, double beta, double h_next);
  ResidualCurve(const KrylovDecomposition& d, ProjectedKind kind);

  [[nodiscard]] double operator()(double t) const;
  [[nodiscard]] const SpectralCache& cache() const { return cache_; }
  [[nodiscard]] ProjectedKind kind() const { return kind_; }
  [[nodiscard]] double beta() const { return beta_; }
  [[nodiscard]] double h_next() const { return h_next_; }

  /// u(t) of the projected IVP.
  [[nodiscard]] Vector coefficients(double t) const;

 private:
  SpectralCache cache_;
  ProjectedKind kind_;
  double beta_;
  double h_next_;
};

double residual_norm_at(const ResidualCurve& curve, double t);

/// -h_next (e_m^T u(t)) v_{m+1}.
Vector residual_vector(const KrylovDecomposition& d, ProjectedKind kind, double t);

template <class F>
concept ResidualFunction = requires(const F& f, double t) {
  { f(t) } -> std::convertible_to<double>;
};

/// Sample points t/6, t/3, ..., t used for the cheap convergence test.
inline constexpr int kCoarseSamples = 6;

template <ResidualFunction F>
double coarse_residual_max(const F& curve, double t) {
  double worst = 0.0;
  for (int i = 1; i <= kCoarseSamples; ++i) {
    const double s = (i == kCoarseSamples) ? t : t * static_cast<double>(i) / kCoarseSamples;
    worst = std::max(worst, static_cast<double>(curve(s)));
  }
  return worst;
}

template <ResidualFunction F>
bool coarse_residual_check(const F& curve, double t, double tol) {
  return coarse_residual_max(curve, t) <= tol;
}

inline constexpr int kDefaultMaxHalvings = 40;

/// Largest multiple of dt = t / (2^k 100) on which the residual stays below tol,
/// with k the smallest level at which dt itself is admissible.
template <ResidualFunction F>
double find_largest_admissible_step(const F& curve, double t, double tol,
                                    int k_max = kDefaultMaxHalvings) {
  if (!(t > 0.0)) throw PreconditionError("find_largest_admissible_step: t must be positive");
  for (int k = 0; k <= k_max; ++k) {
    const std::int64_t samples = std::int64_t{100} << k;
    const double dt = t / static_cast<double>(samples);
    if (!(curve(dt) <= tol)) continue;
    for (std::int64_t j = 2; j <= samples; ++j) {
      const double s = (j == samples) ? t : static_cast<double>(j) * dt;
      if (!(curve(s) <= tol)) return static_cast<double>(j - 1) * dt;
    }
    return t;
  }
  throw StagnationError("stagnation: residual not small even for tiny steps");
}

}  // namespace trigkrylov
