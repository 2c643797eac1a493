#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "support.hpp"
#include "trigkrylov/krylov.hpp"

using namespace trigkrylov;
using tk_test::Rng;

namespace {

ResidualCurve scalar_sigma_curve(double lambda, double h_next) {
  return ResidualCurve(SpectralCache(Matrix::Constant(1, 1, lambda)), ProjectedKind::Sigma, 1.0,
                       h_next);
}

// Projected solution u(t) and its ODE right-hand side, computed by the
// augmented-exponential oracle on the small matrix.
struct Projected {
  Vector u;
  Vector rhs;  // u'' for psi/sigma, u' for phi
};

Projected projected_oracle(const Matrix& h, double beta, ProjectedKind kind, double t) {
  const Eigen::Index m = h.rows();
  const Vector z = Vector::Zero(m);
  const Vector e1 = beta * Vector::Unit(m, 0);
  Projected p;
  switch (kind) {
    case ProjectedKind::Psi:
      p.u = tk_test::expm_oracle(h, z, z, e1, t).y;
      p.rhs = -h * p.u + e1;
      break;
    case ProjectedKind::Sigma:
      p.u = tk_test::expm_oracle(h, z, e1, z, t).y;
      p.rhs = -h * p.u;
      break;
    case ProjectedKind::Phi: {
      Matrix a = Matrix::Zero(m + 1, m + 1);
      a.topLeftCorner(m, m) = -h;
      a.topRightCorner(m, 1) = e1;
      p.u = (t * a).exp().topRightCorner(m, 1);
      p.rhs = -h * p.u + e1;
      break;
    }
  }
  return p;
}

}  // namespace

TEST(Krylov, IdentityBreaksDownImmediately) {
  IdentityOperator id(5);
  const auto d = krylov_build(id, Vector::Ones(5), 4);
  EXPECT_EQ(d.m, 1);
  EXPECT_TRUE(d.breakdown);
  EXPECT_EQ(d.h_next, 0.0);
  EXPECT_NEAR(d.h(0, 0), 1.0, 1e-15);
  EXPECT_EQ(id.matvec_count(), 1u);
}

TEST(Krylov, FullDimensionRecoversSpectrum) {
  DiagonalOperator a((Vector(4) << 1, 2, 3, 4).finished());
  const auto d = krylov_build(a, Vector::Constant(4, 0.5), 4);
  EXPECT_EQ(d.m, 4);
  Vector ev = Eigen::SelfAdjointEigenSolver<Matrix>(d.square()).eigenvalues();
  for (int i = 0; i < 4; ++i) EXPECT_NEAR(ev[i], i + 1.0, 1e-12);
}

TEST(Krylov, ArnoldiRelationHolds) {
  Rng rng(3);
  for (bool sym : {true, false}) {
    const Matrix a = sym ? tk_test::random_spd(50, rng) : tk_test::random_nonsymmetric(50, rng);
    DenseOperator op(a);
    const auto d = krylov_build(op, tk_test::random_vector(50, rng), 10);
    EXPECT_EQ(op.matvec_count(), 10u);
    EXPECT_EQ(d.tridiagonal(), sym);
    const Matrix lhs = a * d.basis.leftCols(10);
    const Matrix rhs = d.basis * d.h;
    EXPECT_LE((lhs - rhs).norm() / a.norm(), 1e-12);
  }
}

TEST(Krylov, ReorthogonalizationKeepsBasisOrthonormal) {
  Rng rng(5);
  Vector lam = Vector::LinSpaced(200, 1.0, 1e6);
  const Matrix q = tk_test::random_orthogonal(200, rng);
  const Matrix a = q * lam.asDiagonal() * q.transpose();
  DenseOperator op(0.5 * (a + a.transpose()));
  const Vector w = tk_test::random_vector(200, rng);
  const auto d = krylov_build(op, w, 60, {KrylovMode::Lanczos, true});
  const Matrix g = d.basis.transpose() * d.basis;
  EXPECT_LE((g - Matrix::Identity(g.rows(), g.cols())).norm(), 1e-8);
}

TEST(Krylov, ThreeTermMatchesFullStorageLanczos) {
  Rng rng(9);
  DenseOperator op(tk_test::random_spd(40, rng));
  const Vector w = tk_test::random_vector(40, rng);
  const auto full = krylov_build(op, w, 12, {KrylovMode::Lanczos, false});
  const auto lean = krylov_build(op, w, 12, {KrylovMode::LanczosThreeTerm, false});
  EXPECT_FALSE(lean.has_basis());
  EXPECT_EQ(full.h, lean.h);
  EXPECT_EQ(full.h_next, lean.h_next);
  EXPECT_EQ(full.v_next, lean.v_next);
}

TEST(Krylov, RegenerateBasisReplaysRecurrence) {
  Rng rng(13);
  for (bool sym : {true, false}) {
    const Matrix a = sym ? tk_test::random_spd(30, rng) : tk_test::random_nonsymmetric(30, rng);
    DenseOperator op(a);
    const Vector w = tk_test::random_vector(30, rng);
    const auto d = krylov_build(op, w, 9);
    const auto before = op.matvec_count();
    double err = 0.0;
    regenerate_basis(op, w, d, [&](Eigen::Index j, const Vector& v) {
      err = std::max(err, (v - d.basis.col(j)).norm());
    });
    EXPECT_EQ(op.matvec_count() - before, 8u);
    if (sym) {
      EXPECT_EQ(err, 0.0);
    } else {
      EXPECT_LE(err, 1e-12);
    }
  }
}

TEST(Krylov, RejectsBadInput) {
  IdentityOperator id(3);
  EXPECT_THROW((void)krylov_build(id, Vector::Zero(3), 2), PreconditionError);
  EXPECT_THROW((void)krylov_build(id, Vector::Ones(3), 4), PreconditionError);
  EXPECT_THROW((void)krylov_build(id, Vector::Ones(2), 1), DimensionError);
  Rng rng(1);
  DenseOperator ns(tk_test::random_nonsymmetric(4, rng));
  EXPECT_THROW((void)krylov_build(ns, Vector::Ones(4), 2, {KrylovMode::Lanczos, false}),
               PreconditionError);
}

TEST(ResidualCurveTest, ZeroAtOriginAndAfterBreakdown) {
  Rng rng(2);
  DenseOperator op(tk_test::random_spd(20, rng));
  const auto d = krylov_build(op, tk_test::random_vector(20, rng), 5);
  for (ProjectedKind k : {ProjectedKind::Psi, ProjectedKind::Sigma, ProjectedKind::Phi}) {
    EXPECT_EQ(residual_norm_at(ResidualCurve(d, k), 0.0), 0.0);
  }
  IdentityOperator id(4);
  const ResidualCurve c(krylov_build(id, Vector::Ones(4), 3), ProjectedKind::Sigma);
  for (double t : {0.1, 1.0, 50.0}) EXPECT_EQ(residual_norm_at(c, t), 0.0);
  EXPECT_TRUE(coarse_residual_check(c, 3.0, 0.0));
}

TEST(ResidualCurveTest, ExplicitResidualIdentity) {
  Rng rng(19);
  for (int trial = 0; trial < 6; ++trial) {
    const bool sym = trial % 2 == 0;
    const Matrix a = sym ? tk_test::random_spd(40, rng) : tk_test::random_nonsymmetric(40, rng);
    DenseOperator op(a);
    const Vector w = tk_test::random_vector(40, rng);
    const Eigen::Index m = 3 + 4 * (trial / 2);
    const auto d = krylov_build(op, w, m);
    for (ProjectedKind kind : {ProjectedKind::Psi, ProjectedKind::Sigma, ProjectedKind::Phi}) {
      for (double t : {0.3, 1.0}) {
        const Projected p = projected_oracle(d.square(), d.beta, kind, t);
        const Vector vm = d.basis.leftCols(m) * p.u;
        const Vector vrhs = d.basis.leftCols(m) * p.rhs;
        const Vector forcing = (kind == ProjectedKind::Sigma) ? Vector::Zero(40) : Vector(w);
        const Vector explicit_r = -a * vm + forcing - vrhs;
        const Vector formula = residual_vector(d, kind, t);
        // Round-off floor of forming A y explicitly.
        const double floor = 1e-13 * (a.norm() * vm.norm() + w.norm());
        EXPECT_LE((explicit_r - formula).norm(), 1e-9 * formula.norm() + floor)
            << "trial " << trial << " kind " << int(kind);
        EXPECT_NEAR(ResidualCurve(d, kind)(t), formula.norm(), 1e-12 * formula.norm() + 1e-15 * d.beta);
        const double galerkin = (d.basis.leftCols(m).transpose() * explicit_r).norm();
        EXPECT_LE(galerkin, 1e-8 * (a.norm() * vm.norm() + d.beta));
      }
    }
  }
}

TEST(CoarseCheck, ScalarSineExamples) {
  const ResidualCurve c = scalar_sigma_curve(1.0, 1.0);
  EXPECT_NEAR(c(0.5), std::sin(0.5), 1e-15);
  EXPECT_TRUE(coarse_residual_check(c, std::numbers::pi / 2, 1.0));
  EXPECT_FALSE(coarse_residual_check(c, std::numbers::pi / 2, 0.5));
}

TEST(StepSearch, ScalarSineExample) {
  const ResidualCurve c = scalar_sigma_curve(1.0, 1.0);
  EXPECT_DOUBLE_EQ(find_largest_admissible_step(c, 100.0, 0.5), 0.5);
}

TEST(StepSearch, ZeroCurveAdmitsWholeInterval) {
  auto zero = [](double) { return 0.0; };
  EXPECT_EQ(find_largest_admissible_step(zero, 3.5, 1e-12), 3.5);
}

TEST(StepSearch, StagnationIsReported) {
  auto flat = [](double) { return 1.0; };
  EXPECT_THROW((void)find_largest_admissible_step(flat, 1.0, 0.5), StagnationError);
  EXPECT_THROW((void)find_largest_admissible_step(flat, 0.0, 0.5), PreconditionError);
}

TEST(StepSearch, TieIsAdmissible) {
  auto ramp = [](double s) { return s; };
  // dt = 0.01; residual(0.5) == 0.5 exactly, residual(0.51) > 0.5.
  EXPECT_NEAR(find_largest_admissible_step(ramp, 1.0, 0.5), 0.5, 1e-15);
}

TEST(StepSearchProperty, MatchesDefinitionOnRandomCurves) {
  Rng rng(44);
  for (int trial = 0; trial < 8; ++trial) {
    DenseOperator op(tk_test::random_spd(30, rng, 1.0, 400.0));
    const auto d = krylov_build(op, tk_test::random_vector(30, rng), 6);
    const ResidualCurve c(d, trial % 2 ? ProjectedKind::Psi : ProjectedKind::Sigma);
    const double t = 2.0;
    const double tol = 1e-3 * c(t) + 1e-14;
    const double delta = find_largest_admissible_step(c, t, tol);
    // Independent replay of the search definition.
    double dt = t / 100.0;
    while (!(c(dt) <= tol)) dt *= 0.5;
    double expect = t;
    const auto samples = static_cast<long>(std::llround(t / dt));
    for (long j = 1; j <= samples; ++j) {
      if (!(c(j * dt) <= tol)) {
        expect = (j - 1) * dt;
        break;
      }
    }
    EXPECT_NEAR(delta, expect, 1e-12 * t);
    EXPECT_GE(delta, dt * (1 - 1e-12));
    EXPECT_LE(c(delta), tol);
    if (delta < t) {
      EXPECT_GT(c(delta + dt), tol);
    }
  }
}
