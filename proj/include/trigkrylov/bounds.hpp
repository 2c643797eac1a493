#pragma once

// A-priori residual bounds and the Bessel / shifted-Chebyshev coefficients
// of t sigma(t^2 z) and t^2/2 psi(t^2 z) on [0, 1].

#include <optional>
#include <string>
#include <vector>

#include "trigkrylov/linop.hpp"

namespace trigkrylov {

enum class SpectrumClass { General, Spd, UnitInterval };

struct BoundInput {
  int m = 1;
  double t = 0.0;
  double h_psi = 0.0;
  double beta_psi = 0.0;
  double h_sigma = 0.0;
  double beta_sigma = 0.0;
  /// -1/2 ||H_m - I||_2 for each branch.
  double omega_psi = 0.0;
  double omega_sigma = 0.0;
  /// Smallest eigenvalues of the projected matrices (SPD case).
  double lambda_min_psi = 0.0;
  double lambda_min_sigma = 0.0;
  SpectrumClass spectrum = SpectrumClass::General;
};

/// -1/2 ||H - I||_2.
double omega_hat(const Matrix& h);

/// J_k(t) for 0 <= t <= 100, 0 <= k <= 400.
double bessel_j(int k, double t);
/// J_0(t) .. J_kmax(t) from a single backward sweep.
std::vector<double> bessel_j_sequence(int kmax, double t);

/// Smallest L with |J_{2L+1}(t)| and (L+1)|J_{2L+2}(t)| below 1e-16.
int chebyshev_truncation(double t);

/// Coefficient of T_k(2z - 1) in sin(t sqrt z)/sqrt z on [0, 1] (k = 0 term
/// to be halved in the series): 4 (-1)^k sum_{l=k}^{L} J_{2l+1}(t).
double cheb_coeff_sigma(int k, double t, std::optional<int> truncation = std::nullopt);
/// Coefficient of T_k(2z - 1) in (1 - cos(t sqrt z))/z on [0, 1]:
/// 8 (-1)^k sum_{l=0}^{L} (l+1) J_{2(k+l+1)}(t).
double cheb_coeff_psi(int k, double t, std::optional<int> truncation = std::nullopt);

/// t phi(-t omega) (h_psi beta_psi + h_sigma beta_sigma), omega = min(omega_psi, omega_sigma).
double bound_prop22(const BoundInput& in);

struct Prop23Bound {
  double simple = 0.0;  // (h_psi beta_psi / lambda_psi + h_sigma beta_sigma) t
  double tight = 0.0;   // min-form with the t / lambda_psi term as printed
  /// min-form with t / sqrt(lambda_psi), which follows from |1 - cos x| <= x.
  double tight_corrected = 0.0;
};

Prop23Bound bound_prop23(const BoundInput& in);

/// 16 (t/2)^(2m-1) / (2m-1)!, for t <= 1, m >= 2, spectrum in [0, 1], beta = 1.
double bound_p3(int m, double t);
/// (128/15) (t/2)^(2m) / (2m)!.
double bound_p4(int m, double t);

/// Measured residuals of the psi run on w and the sigma run on v after m
/// Krylov steps, next to every bound that applies to the spectrum class.
struct BoundCheck {
  BoundInput input;
  double res_psi = 0.0;    // max over [0, t] of ||r_m^psi||
  double res_sigma = 0.0;  // max over [0, t] of ||r_m^sigma||
  double prop22 = 0.0;
  std::optional<Prop23Bound> prop23;
  std::optional<double> p3;  // compared with res_sigma / beta_sigma
  std::optional<double> p4;  // compared with res_psi / beta_psi
  /// Names of the violated bounds, space separated; empty if none.
  std::string violations;
};

BoundCheck check_bounds(const LinearOperator& op, const Vector& w, const Vector& v, int m,
                        double t, SpectrumClass spectrum, int samples = 64);

}  // namespace trigkrylov
