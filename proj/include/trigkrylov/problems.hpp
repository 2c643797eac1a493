#pragma once

// Benchmark problems: the 3D wave equation and the 1D transport equation with
// decay, plus reference solutions for accuracy reporting.

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <variant>

#include "trigkrylov/ivp.hpp"
#include "trigkrylov/linop.hpp"

namespace trigkrylov {

enum class WaveInitial { IsotropicPoly, AnisotropicSines };

struct WaveProblemSpec {
  std::size_t nx = 10, ny = 10, nz = 10;
  double kx = 1.0, ky = 1.0, kz = 1.0;
  WaveInitial initial = WaveInitial::IsotropicPoly;
  double t_final = 1.0;

  /// k = (1, 1, 1), u0 = (1-x)^3 (1-y^2) (1-z^2), v0 = 1.
  static WaveProblemSpec isotropic(std::size_t n, double t = 1.0);
  /// k = (1e4, 1e2, 1), sine-sum initial data with i, j, k in {1, 2, 3}.
  static WaveProblemSpec anisotropic(std::size_t n, double t = 1.0);

  [[nodiscard]] std::size_t dim() const { return nx * ny * nz; }
};

enum class TransportVelocity {
  Printed,   // u0' - alpha u0
  Physical,  // -c u0' - alpha u0
};

struct TransportProblemSpec {
  std::size_t nx = 128;
  double c = 0.3;
  double alpha = 1.0;
  double t_final = 1.0;
  TransportVelocity velocity = TransportVelocity::Printed;
  /// Reject operators whose symmetric part is indefinite beyond round-off.
  bool strict = false;
};

/// Seven-point stencil with the SPD sign convention, g = 0.
SecondOrderIVP build_wave3d(const WaveProblemSpec& spec);

/// A = c^2 Ls - 2 alpha c D - alpha^2 I with Ls = (1/h^2) tridiag(-1, 2, -1).
SecondOrderIVP build_transport(const TransportProblemSpec& spec);

/// Smallest eigenvalue of c^2 Ls - alpha^2 I (the symmetric part of A),
/// from the closed-form Dirichlet spectrum.
double transport_symmetric_part_min(const TransportProblemSpec& spec);

/// Initial data sampled at interior points (x fastest).
Vector wave_initial_position(const WaveProblemSpec& spec);
Vector wave_initial_velocity(const WaveProblemSpec& spec);

inline constexpr std::size_t kSpectralCap = 48;

/// Exact solution of the semi-discrete wave problem by discrete sine transforms.
State spectral_reference_wave3d(const WaveProblemSpec& spec, double t);

enum class ReferenceMethod { Dense, Spectral, TightTolerance };

/// `wave` is required for the spectral method.
State reference_solution(const SecondOrderIVP& ivp, ReferenceMethod method,
                         const WaveProblemSpec* wave = nullptr);

using ProblemSpec = std::variant<WaveProblemSpec, TransportProblemSpec>;

/// "isotropic<n>", "anisotropic<n>", "transport<n>".
std::optional<ProblemSpec> parse_preset(std::string_view name);
SecondOrderIVP build_problem(const ProblemSpec& spec);
std::string describe(const ProblemSpec& spec);

/// Default reference for a preset: spectral for wave grids up to kSpectralCap,
/// tight tolerance otherwise.
State preset_reference(const ProblemSpec& spec, const SecondOrderIVP& ivp);

}  // namespace trigkrylov
