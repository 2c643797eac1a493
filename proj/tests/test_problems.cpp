#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "support.hpp"
#include "trigkrylov/integrators.hpp"
#include "trigkrylov/problems.hpp"

using namespace trigkrylov;

TEST(Problems, IsotropicInitialData) {
  const auto spec = WaveProblemSpec::isotropic(3);
  const Vector u = wave_initial_position(spec);
  ASSERT_EQ(u.size(), 27);
  EXPECT_NEAR(u[0], 0.75 * 0.75 * 0.75 * (1 - 0.0625) * (1 - 0.0625), 1e-15);
  EXPECT_NEAR(u[0], 0.370788, 1e-6);
  // x runs fastest: index 1 is (2h, h, h).
  EXPECT_NEAR(u[1], 0.125 * (1 - 0.0625) * (1 - 0.0625), 1e-15);
  EXPECT_EQ(wave_initial_velocity(spec), Vector::Ones(27));
}

TEST(Problems, AnisotropicCentrePoint) {
  const auto spec = WaveProblemSpec::anisotropic(1);
  const double pi2 = std::numbers::pi * std::numbers::pi;
  double expect = 0.0;
  for (int i : {1, 3})
    for (int j : {1, 3})
      for (int k : {1, 3}) {
        const double sign = ((i + j + k - 3) / 2) % 2 == 0 ? 1.0 : -1.0;
        expect += sign * pi2 * (1e4 * i * i + 1e2 * j * j + k * k);
      }
  EXPECT_NEAR(wave_initial_position(spec)[0], 0.0, 1e-13);
  EXPECT_NEAR(wave_initial_velocity(spec)[0], expect, 1e-9 * std::abs(expect));
}

TEST(Problems, WaveOperatorIsSymmetric) {
  const SecondOrderIVP ivp = build_wave3d(WaveProblemSpec::anisotropic(4));
  EXPECT_TRUE(ivp.op->is_symmetric());
  EXPECT_EQ(ivp.op->dim(), 64u);
  EXPECT_EQ(ivp.g, Vector::Zero(64));
  const Matrix a = assemble_dense(*ivp.op);
  EXPECT_LE((a - a.transpose()).norm(), 1e-12 * a.norm());
  EXPECT_GT(Eigen::SelfAdjointEigenSolver<Matrix>(a).eigenvalues().minCoeff(), 0.0);
}

TEST(Problems, SpectralReferenceMatchesExpm) {
  for (auto spec : {WaveProblemSpec::isotropic(3, 0.7), WaveProblemSpec::anisotropic(3, 0.01)}) {
    const SecondOrderIVP ivp = build_wave3d(spec);
    const Matrix a = assemble_dense(*ivp.op);
    const State ex = tk_test::expm_oracle(a, ivp.u, ivp.v, ivp.g, spec.t_final);
    const State sp = spectral_reference_wave3d(spec, spec.t_final);
    EXPECT_LE(tk_test::rel_err(sp.y, ex.y), 1e-10);
    EXPECT_LE(tk_test::rel_err(sp.dy, ex.dy), 1e-10);
  }
}

TEST(Problems, ReferenceMethodsAgree) {
  const auto spec = WaveProblemSpec::isotropic(6);
  const SecondOrderIVP ivp = build_wave3d(spec);
  const State d = reference_solution(ivp, ReferenceMethod::Dense);
  const State s = reference_solution(ivp, ReferenceMethod::Spectral, &spec);
  const State t = reference_solution(ivp, ReferenceMethod::TightTolerance);
  EXPECT_LE(tk_test::rel_err(d.y, s.y), 1e-8);
  EXPECT_LE(tk_test::rel_err(t.y, s.y), 1e-8);
  EXPECT_THROW((void)reference_solution(ivp, ReferenceMethod::Spectral), PreconditionError);
}

TEST(Problems, TransportDenseAgreesWithTightTolerance) {
  TransportProblemSpec spec;
  spec.nx = 64;
  const SecondOrderIVP ivp = build_transport(spec);
  EXPECT_FALSE(ivp.op->is_symmetric());
  const State d = reference_solution(ivp, ReferenceMethod::Dense);
  const State t = reference_solution(ivp, ReferenceMethod::TightTolerance);
  EXPECT_LE(tk_test::rel_err(t.y, d.y), 1e-8);
}

TEST(Problems, TransportSymmetricPartIndefinite) {
  TransportProblemSpec spec;
  const double lmin = transport_symmetric_part_min(spec);
  EXPECT_NEAR(lmin, -0.112, 1e-3);
  const Matrix a = assemble_dense(*build_transport(spec).op);
  const Matrix s = 0.5 * (a + a.transpose());
  EXPECT_NEAR(Eigen::SelfAdjointEigenSolver<Matrix>(s).eigenvalues().minCoeff(), lmin, 1e-9);
  spec.strict = true;
  EXPECT_THROW((void)build_transport(spec), PreconditionError);
}

TEST(Problems, TransportVelocityVariants) {
  TransportProblemSpec spec;
  spec.nx = 32;
  const SecondOrderIVP p = build_transport(spec);
  spec.velocity = TransportVelocity::Physical;
  const SecondOrderIVP q = build_transport(spec);
  EXPECT_EQ(p.u, q.u);
  // printed: du - alpha u; physical: -c du - alpha u.
  const Vector du = p.v + spec.alpha * p.u;
  EXPECT_LE((q.v - (-spec.c * du - spec.alpha * p.u)).norm(), 1e-12 * q.v.norm());
}

TEST(Problems, PresetParsing) {
  auto iso = parse_preset("isotropic12");
  ASSERT_TRUE(iso);
  EXPECT_EQ(std::get<WaveProblemSpec>(*iso).nx, 12u);
  auto an = parse_preset("anisotropic5");
  ASSERT_TRUE(an);
  EXPECT_EQ(std::get<WaveProblemSpec>(*an).kx, 1e4);
  auto tr = parse_preset("transport256");
  ASSERT_TRUE(tr);
  EXPECT_EQ(std::get<TransportProblemSpec>(*tr).nx, 256u);
  for (const char* bad : {"isotropic", "isotropic0", "iso10", "transport12x", ""}) {
    EXPECT_FALSE(parse_preset(bad)) << bad;
  }
  EXPECT_EQ(describe(*iso), "isotropic 12x12x12 t=1");
  EXPECT_EQ(build_problem(*tr).op->dim(), 256u);
}

TEST(Problems, GridRefinementConverges) {
  // The semi-discrete solution at the centre point approaches a limit as h -> 0.
  double prev_diff = 1e300;
  double prev = 0.0;
  for (std::size_t n : {7u, 15u, 31u}) {
    const auto spec = WaveProblemSpec::isotropic(n, 0.3);
    const State s = spectral_reference_wave3d(spec, 0.3);
    const auto c = static_cast<Eigen::Index>(n / 2);
    const double centre = s.y[(c * static_cast<Eigen::Index>(n) + c) * static_cast<Eigen::Index>(n) + c];
    if (n > 7) {
      const double diff = std::abs(centre - prev);
      EXPECT_LT(diff, prev_diff);
      prev_diff = diff;
    }
    prev = centre;
  }
}

TEST(Problems, RejectsBadSpecs) {
  WaveProblemSpec w;
  w.nx = 0;
  EXPECT_THROW((void)build_wave3d(w), PreconditionError);
  TransportProblemSpec t;
  t.nx = 2;
  EXPECT_THROW((void)build_transport(t), PreconditionError);
  EXPECT_THROW((void)spectral_reference_wave3d(WaveProblemSpec::isotropic(kSpectralCap + 1), 1.0),
               PreconditionError);
}
