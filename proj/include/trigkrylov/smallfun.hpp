#pragma once

// Scalar and small-matrix evaluation of the trigonometric matrix functions
//
//   psi(z)   = 2 (1 - cos sqrt z) / z,   psi(0) = 1
//   sigma(z) = sin(sqrt z) / sqrt z,     sigma(0) = 1
//   phi(z)   = (e^z - 1) / z,            phi(0) = 1
//
// and of the projected IVP solutions built from them.

#include <complex>
#include <vector>

#include <Eigen/Dense>

#include "trigkrylov/ivp.hpp"
#include "trigkrylov/linop.hpp"

namespace trigkrylov {

using Complex = std::complex<double>;
using CVector = Eigen::VectorXcd;
using CMatrix = Eigen::MatrixXcd;

enum class ScalarFunKind { Psi, Sigma, Phi };

/// Below this |z| psi and sigma switch to their (1,1) Pade approximants.
inline constexpr double kPadeThreshold = 1e-3;

Complex scalar_fun(ScalarFunKind kind, Complex z);
double scalar_fun(ScalarFunKind kind, double z);

/// d/dz of scalar_fun.
Complex scalar_fun_derivative(ScalarFunKind kind, Complex z);

/// The (1,1) Pade approximant at the origin (psi and sigma only).
Complex pade11(ScalarFunKind kind, Complex z);

/// Functions of z parameterized by a time t; these are the entries that
/// appear in the projected solutions and their time derivatives.
enum class TimeFunKind {
  PsiPosition,    // t^2/2 psi(t^2 z)
  SigmaPosition,  // t sigma(t^2 z)
  Cosine,         // cos(t sqrt z) = 1 - t^2/2 z psi(t^2 z)
  PhiPosition,    // t phi(-t z)
};

struct TimeFunction {
  TimeFunKind kind;
  double t;

  [[nodiscard]] Complex operator()(Complex z) const;
  [[nodiscard]] double operator()(double z) const;
  [[nodiscard]] Complex derivative(Complex z) const;
};

/// Factorization of a small matrix H, reused across many evaluation times.
///
/// Symmetric input is diagonalized (H = Q diag(lambda) Q^T); general input is
/// reduced to complex Schur form H = Q T Q^H and functions of T are formed by
/// a block Parlett recurrence. Near-equal diagonal entries of T (separation
/// below kClusterTol) are reordered next to each other and handled as 2x2
/// blocks; larger clusters are split by a small diagonal perturbation and
/// flagged through perturbed().
class SpectralCache {
 public:
  static constexpr double kClusterTol = 1e-8;

  SpectralCache() = default;
  explicit SpectralCache(const Matrix& h);
  SpectralCache(const Matrix& h, bool symmetric);

  static SpectralCache from_tridiagonal(const Vector& diag, const Vector& offdiag);

  [[nodiscard]] Eigen::Index size() const { return n_; }
  [[nodiscard]] bool symmetric() const { return symmetric_; }
  [[nodiscard]] bool perturbed() const { return perturbed_; }

  /// f(H) b.
  [[nodiscard]] Vector apply(const TimeFunction& f, const Vector& b) const;
  /// f(H) e_1.
  [[nodiscard]] Vector first_column(const TimeFunction& f) const;
  /// e_m^T f(H) e_1, the quantity the residual depends on.
  [[nodiscard]] double corner(const TimeFunction& f) const;

  /// Eigenvalues (complex in general; real parts for the symmetric path).
  [[nodiscard]] CVector eigenvalues() const;
  /// Smallest eigenvalue; symmetric path only.
  [[nodiscard]] double lambda_min() const;

  /// ||H - Q (Lambda|T) Q^H||, for checking the factorization.
  [[nodiscard]] double reconstruction_error(const Matrix& h) const;

 private:
  [[nodiscard]] CMatrix triangular_function(const TimeFunction& f) const;
  void reorder_clusters();

  Eigen::Index n_ = 0;
  bool symmetric_ = true;
  bool perturbed_ = false;
  // symmetric path
  Vector lambda_;
  Matrix q_;
  // general path
  CMatrix t_;
  CMatrix qc_;
  std::vector<Eigen::Index> block_start_;  // Parlett block boundaries
};

/// f(H) b with f a time function; builds a throwaway cache when none is given.
Vector matfun_action(const Matrix& h, const TimeFunction& f, const Vector& b,
                     const SpectralCache* cache = nullptr);

/// Which projected IVP a Krylov decomposition was built for.
enum class ProjectedKind {
  Psi,    // u'' = -H u + beta e1, u(0) = u'(0) = 0:  u = t^2/2 psi(t^2 H) beta e1
  Sigma,  // u'' = -H u, u(0) = 0, u'(0) = beta e1:   u = t sigma(t^2 H) beta e1
  Phi,    // u' = -H u + beta e1, u(0) = 0:           u = t phi(-t H) beta e1
};

TimeFunKind position_function(ProjectedKind kind);

/// u(t) of the projected IVP.
Vector projected_solution(const SpectralCache& cache, ProjectedKind kind, double beta, double t);

/// Dense reference evaluation f(A) x through a full eigendecomposition
/// (symmetric) or diagonalization (general). Intended for small problems.
class DenseMatrixFunctions {
 public:
  explicit DenseMatrixFunctions(const Matrix& a);
  [[nodiscard]] Vector apply(const TimeFunction& f, const Vector& x) const;
  [[nodiscard]] bool symmetric() const { return symmetric_; }

 private:
  bool symmetric_;
  Vector lambda_;
  Matrix q_;
  CVector clambda_;
  CMatrix v_;
  Eigen::PartialPivLU<CMatrix> vlu_;
};

/// y(t) = u + t^2/2 psi(t^2 A)(-A u + g) + t sigma(t^2 A) v and its time
/// derivative, by dense factorization of A.
State exact_ivp_solution(const Matrix& a, const Vector& u, const Vector& v, const Vector& g,
                         double t);
State exact_ivp_solution(const SecondOrderIVP& ivp, double t,
                         std::size_t cap = kDefaultDenseCap);

}  // namespace trigkrylov
