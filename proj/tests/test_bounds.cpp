#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include <boost/math/special_functions/bessel.hpp>

#include "support.hpp"
#include "trigkrylov/bounds.hpp"
#include "trigkrylov/problems.hpp"

using namespace trigkrylov;
using tk_test::Rng;

namespace {

// Power series of J_k in long double; fine for t <= 12.
double bessel_series(int k, double t) {
  long double term = 1.0L;
  for (int i = 1; i <= k; ++i) term *= (0.5L * t) / i;
  long double sum = term;
  const long double q = -0.25L * t * t;
  for (int m = 1; m < 200; ++m) {
    term *= q / (static_cast<long double>(m) * (m + k));
    sum += term;
    if (std::fabs(term) < 1e-30L) break;
  }
  return static_cast<double>(sum);
}

double f_sigma(double t, double z) {
  if (z == 0.0) return t;
  return std::sin(t * std::sqrt(z)) / std::sqrt(z);
}

double f_psi(double t, double z) {
  if (z < 1e-8) return 0.5 * t * t - t * t * t * t * z / 24.0;
  return (1.0 - std::cos(t * std::sqrt(z))) / z;
}

// Coefficient of T_k(2z - 1) by N-point Gauss-Chebyshev quadrature.
template <class F>
double cheb_quadrature(F f, int k, int n = 2000) {
  double s = 0.0;
  for (int j = 0; j < n; ++j) {
    const double th = std::numbers::pi * (j + 0.5) / n;
    s += f(0.5 * (std::cos(th) + 1.0)) * std::cos(k * th);
  }
  return 2.0 * s / n;
}

template <class C>
double cheb_sum(C coeff, int kmax, double z) {
  const double x = 2 * z - 1;
  double s = 0.0;
  for (int k = 0; k <= kmax; ++k) {
    const double c = coeff(k);
    s += (k == 0 ? 0.5 : 1.0) * c * std::cos(k * std::acos(x));
  }
  return s;
}

}  // namespace

TEST(Bessel, SpotValue) { EXPECT_NEAR(bessel_j(1, 1.0), 0.4400505857449335, 1e-15); }

TEST(Bessel, MatchesSeriesOracle) {
  for (double t : {0.0, 0.1, 0.5, 1.0, 2.5, 5.0, 8.0}) {
    for (int k = 0; k <= 30; ++k) {
      EXPECT_NEAR(bessel_j(k, t), bessel_series(k, t), 1e-12) << "k=" << k << " t=" << t;
    }
  }
}

TEST(Bessel, MatchesBoostForLargeArguments) {
  for (double t : {12.0, 30.0, 57.3, 100.0}) {
    const auto seq = bessel_j_sequence(150, t);
    for (int k = 0; k <= 150; k += 7) {
      const double ref = boost::math::cyl_bessel_j(k, t);
      EXPECT_NEAR(bessel_j(k, t), ref, 1e-12) << "k=" << k << " t=" << t;
      EXPECT_NEAR(seq[k], ref, 1e-12);
    }
  }
}

TEST(Chebyshev, CoefficientsMatchQuadrature) {
  for (double t : {0.2, 1.0, 2.0, 3.7, 5.0}) {
    for (int k = 0; k <= 20; ++k) {
      const double qs = cheb_quadrature([t](double z) { return f_sigma(t, z); }, k);
      const double qp = cheb_quadrature([t](double z) { return f_psi(t, z); }, k);
      EXPECT_NEAR(cheb_coeff_sigma(k, t), qs, 1e-9) << "sigma k=" << k << " t=" << t;
      EXPECT_NEAR(cheb_coeff_psi(k, t), qp, 1e-9) << "psi k=" << k << " t=" << t;
    }
  }
}

TEST(Chebyshev, SeriesReconstructsFunction) {
  for (double t : {1.0, 4.0}) {
    for (double z : {0.37, 0.5}) {
      const double s = cheb_sum([t](int k) { return cheb_coeff_sigma(k, t); }, 40, z);
      const double p = cheb_sum([t](int k) { return cheb_coeff_psi(k, t); }, 40, z);
      EXPECT_NEAR(s, f_sigma(t, z), 1e-12);
      EXPECT_NEAR(p, f_psi(t, z), 1e-12);
    }
  }
}

TEST(Chebyshev, CoefficientsDecaySuperexponentially) {
  const double t = 1.0;
  for (int k = 4; k <= 12; ++k) {
    EXPECT_LT(std::abs(cheb_coeff_sigma(k + 1, t)), 0.2 * std::abs(cheb_coeff_sigma(k, t)) + 1e-300);
  }
  EXPECT_LT(std::abs(cheb_coeff_psi(15, t)), 1e-20);
  EXPECT_GE(chebyshev_truncation(5.0), chebyshev_truncation(1.0));
}

TEST(PBounds, SpotValues) {
  EXPECT_NEAR(bound_p3(2, 1.0), 1.0 / 3.0, 1e-15);
  EXPECT_NEAR(bound_p4(2, 1.0), 128.0 / 15.0 / 16.0 / 24.0, 1e-15);
  EXPECT_NEAR(bound_p4(2, 1.0), 0.0222222, 1e-7);
  EXPECT_EQ(bound_p3(5, 0.0), 0.0);
  EXPECT_EQ(bound_p4(5, 0.0), 0.0);
  EXPECT_THROW((void)bound_p3(1, 0.5), PreconditionError);
  EXPECT_THROW((void)bound_p4(3, 1.5), PreconditionError);
}

TEST(PropBounds, HandComputedValues) {
  BoundInput in;
  in.t = 1.0;
  in.h_psi = 1.0;
  in.beta_psi = 1.0;
  EXPECT_NEAR(bound_prop22(in), 1.0, 1e-15);
  in.omega_psi = in.omega_sigma = -1.0;
  EXPECT_NEAR(bound_prop22(in), std::numbers::e - 1.0, 1e-14);

  BoundInput s;
  s.spectrum = SpectrumClass::Spd;
  s.t = 2.0;
  s.h_psi = 2.0;
  s.beta_psi = 3.0;
  s.lambda_min_psi = 4.0;
  s.h_sigma = 1.0;
  s.beta_sigma = 1.0;
  s.lambda_min_sigma = 1.0;
  const Prop23Bound b = bound_prop23(s);
  EXPECT_NEAR(b.simple, 5.0, 1e-14);
  // psi: 6 * min(2, 0.5, 0.5); sigma: min(2, 1).
  EXPECT_NEAR(b.tight, 4.0, 1e-14);
  EXPECT_NEAR(b.tight_corrected, 6.0 * 0.5 + 1.0, 1e-14);

  s.spectrum = SpectrumClass::General;
  EXPECT_THROW((void)bound_prop23(s), PreconditionError);
}

TEST(PropBounds, OmegaHat) {
  EXPECT_EQ(omega_hat(Matrix::Identity(3, 3)), 0.0);
  EXPECT_NEAR(omega_hat(3.0 * Matrix::Identity(2, 2)), -1.0, 1e-15);
}

TEST(BoundGrid, SyntheticUnitSpectrumNoViolations) {
  Rng rng(60);
  const Eigen::Index n = 60;
  Vector lam(n);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (Eigen::Index i = 0; i < n; ++i) lam[i] = u(rng);
  const Matrix q = tk_test::random_orthogonal(n, rng);
  Matrix a = q * lam.asDiagonal() * q.transpose();
  DenseOperator op(0.5 * (a + a.transpose()));
  int checked = 0;
  for (int trial = 0; trial < 4; ++trial) {
    const Vector w = tk_test::random_vector(n, rng).normalized();
    const Vector v = tk_test::random_vector(n, rng).normalized();
    for (int m : {2, 3, 5, 8}) {
      for (double t : {0.1, 0.5, 1.0}) {
        const BoundCheck c = check_bounds(op, w, v, m, t, SpectrumClass::UnitInterval);
        EXPECT_EQ(c.violations, "") << "m=" << m << " t=" << t;
        ASSERT_TRUE(c.p3 && c.p4);
        EXPECT_LE(c.res_sigma, *c.p3 + 1e-14);
        EXPECT_LE(c.res_psi, *c.p4 + 1e-14);
        ++checked;
      }
    }
  }
  EXPECT_EQ(checked, 48);
}

TEST(BoundGrid, WaveOperatorNoViolations) {
  const SecondOrderIVP ivp = build_wave3d(WaveProblemSpec::isotropic(6));
  const Vector w = ivp.g - ivp.op->apply(ivp.u);
  for (int m : {3, 8, 15}) {
    for (double t : {1.0, 5.0, 10.0}) {
      const BoundCheck c = check_bounds(*ivp.op, w, ivp.v, m, t, SpectrumClass::Spd);
      EXPECT_EQ(c.violations, "") << "m=" << m << " t=" << t;
      EXPECT_TRUE(c.prop23.has_value());
      EXPECT_LE(c.res_psi + c.res_sigma, c.prop22 * (1 + 1e-12));
    }
  }
}

TEST(BoundGrid, NonsymmetricUsesGeneralBoundOnly) {
  Rng rng(61);
  DenseOperator op(tk_test::random_nonsymmetric(40, rng));
  const BoundCheck c = check_bounds(op, tk_test::random_vector(40, rng),
                                    tk_test::random_vector(40, rng), 6, 0.8,
                                    SpectrumClass::General);
  EXPECT_EQ(c.violations, "");
  EXPECT_FALSE(c.prop23.has_value());
  EXPECT_FALSE(c.p3.has_value());
  EXPECT_THROW((void)check_bounds(op, Vector::Ones(40), Vector::Ones(40), 3, 1.0,
                                  SpectrumClass::Spd),
               PreconditionError);
}
