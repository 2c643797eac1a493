#pragma once

#include <cmath>
#include <cstdint>
#include <memory>
#include <random>

#include <Eigen/Dense>
#include <unsupported/Eigen/MatrixFunctions>

#include "trigkrylov/ivp.hpp"
#include "trigkrylov/linop.hpp"

namespace tk_test {

using trigkrylov::Matrix;
using trigkrylov::Vector;

using Rng = std::mt19937_64;

inline Vector random_vector(Eigen::Index n, Rng& rng) {
  std::normal_distribution<double> d;
  Vector x(n);
  for (Eigen::Index i = 0; i < n; ++i) x[i] = d(rng);
  return x;
}

inline Matrix random_matrix(Eigen::Index r, Eigen::Index c, Rng& rng) {
  std::normal_distribution<double> d;
  Matrix a(r, c);
  for (Eigen::Index j = 0; j < c; ++j)
    for (Eigen::Index i = 0; i < r; ++i) a(i, j) = d(rng);
  return a;
}

inline Matrix random_orthogonal(Eigen::Index n, Rng& rng) {
  Eigen::HouseholderQR<Matrix> qr(random_matrix(n, n, rng));
  return qr.householderQ() * Matrix::Identity(n, n);
}

/// Q diag(lambda) Q^T with eigenvalues uniform in [lo, hi].
inline Matrix random_spd(Eigen::Index n, Rng& rng, double lo = 0.5, double hi = 10.0) {
  std::uniform_real_distribution<double> u(lo, hi);
  Vector lam(n);
  for (Eigen::Index i = 0; i < n; ++i) lam[i] = u(rng);
  const Matrix q = random_orthogonal(n, rng);
  Matrix a = q * lam.asDiagonal() * q.transpose();
  return 0.5 * (a + a.transpose());
}

/// SPD part plus a skew part, so Re(x^T A x) > 0 but A != A^T.
inline Matrix random_nonsymmetric(Eigen::Index n, Rng& rng, double skew = 1.0) {
  Matrix k = random_matrix(n, n, rng);
  k = 0.5 * (k - k.transpose());
  return random_spd(n, rng, 0.5, 5.0) + skew * k;
}

inline double rel_err(const Vector& a, const Vector& b) {
  const double s = b.norm();
  return s > 0.0 ? (a - b).norm() / s : (a - b).norm();
}

inline std::shared_ptr<const trigkrylov::DenseOperator> dense_op(const Matrix& a) {
  return std::make_shared<const trigkrylov::DenseOperator>(a);
}

/// Exact (y, y') of y'' = -A y + g via the exponential of the augmented
/// first-order matrix [[0, I, 0], [-A, 0, g], [0, 0, 0]].
inline trigkrylov::State expm_oracle(const Matrix& a, const Vector& u, const Vector& v,
                                     const Vector& g, double t) {
  const Eigen::Index n = a.rows();
  Matrix m = Matrix::Zero(2 * n + 1, 2 * n + 1);
  m.block(0, n, n, n) = Matrix::Identity(n, n);
  m.block(n, 0, n, n) = -a;
  m.block(n, 2 * n, n, 1) = g;
  const Matrix e = (t * m).exp();
  Vector z(2 * n + 1);
  z << u, v, 1.0;
  const Vector r = e * z;
  return {r.head(n), r.segment(n, n)};
}

inline trigkrylov::SecondOrderIVP make_ivp(const Matrix& a, const Vector& u, const Vector& v,
                                           const Vector& g, double t) {
  trigkrylov::SecondOrderIVP ivp;
  ivp.op = dense_op(a);
  ivp.u = u;
  ivp.v = v;
  ivp.g = g;
  ivp.t_final = t;
  return ivp;
}

}  // namespace tk_test
