#include "trigkrylov/smallfun.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <Eigen/Eigenvalues>

namespace trigkrylov {

namespace {

constexpr int kSeriesTerms = 28;

Complex sinc(Complex w) {
  if (std::abs(w) < 1e-4) {
    const Complex w2 = w * w;
    return 1.0 - w2 / 6.0 + w2 * w2 / 120.0;
  }
  return std::sin(w) / w;
}

// sum_k c_k z^k with c_k = num(k) / den(k); stops once terms are negligible.
template <class Coef>
Complex power_series(Complex z, Coef coef) {
  Complex sum = 0.0;
  Complex zk = 1.0;
  for (int k = 0; k < kSeriesTerms; ++k) {
    const Complex term = coef(k) * zk;
    sum += term;
    if (k > 2 && std::abs(term) <= 1e-18 * std::abs(sum)) break;
    zk *= z;
  }
  return sum;
}

// 1 / n!
double inv_factorial(int n) {
  double r = 1.0;
  for (int i = 2; i <= n; ++i) r /= static_cast<double>(i);
  return r;
}

double sign_alt(int k) { return (k % 2 == 0) ? 1.0 : -1.0; }

}  // namespace

Complex pade11(ScalarFunKind kind, Complex z) {
  switch (kind) {
    case ScalarFunKind::Psi:
      return (1.0 - z / 20.0) / (1.0 + z / 30.0);
    case ScalarFunKind::Sigma:
      return (1.0 - 7.0 * z / 60.0) / (1.0 + z / 20.0);
    case ScalarFunKind::Phi:
      break;
  }
  throw PreconditionError("pade11: only defined for psi and sigma");
}

Complex scalar_fun(ScalarFunKind kind, Complex z) {
  switch (kind) {
    case ScalarFunKind::Psi: {
      if (std::abs(z) < kPadeThreshold) return pade11(kind, z);
      const Complex s = sinc(0.5 * std::sqrt(z));
      return s * s;
    }
    case ScalarFunKind::Sigma:
      if (std::abs(z) < kPadeThreshold) return pade11(kind, z);
      return sinc(std::sqrt(z));
    case ScalarFunKind::Phi:
      if (std::abs(z) < 1.0) {
        return power_series(z, [](int k) { return inv_factorial(k + 1); });
      }
      if (z.imag() == 0.0) return std::expm1(z.real()) / z.real();
      return (std::exp(z) - 1.0) / z;
  }
  return 0.0;
}

double scalar_fun(ScalarFunKind kind, double z) { return scalar_fun(kind, Complex(z, 0.0)).real(); }

Complex scalar_fun_derivative(ScalarFunKind kind, Complex z) {
  const bool small = std::abs(z) < 1.0;
  switch (kind) {
    case ScalarFunKind::Psi:
      if (small) {
        return power_series(z, [](int k) {
          return 2.0 * sign_alt(k + 1) * (k + 1) * inv_factorial(2 * k + 4);
        });
      }
      return (scalar_fun(ScalarFunKind::Sigma, z) - scalar_fun(ScalarFunKind::Psi, z)) / z;
    case ScalarFunKind::Sigma:
      if (small) {
        return power_series(
            z, [](int k) { return sign_alt(k + 1) * (k + 1) * inv_factorial(2 * k + 3); });
      }
      return (std::cos(std::sqrt(z)) - scalar_fun(ScalarFunKind::Sigma, z)) / (2.0 * z);
    case ScalarFunKind::Phi:
      if (small) {
        return power_series(z, [](int k) { return (k + 1) * inv_factorial(k + 2); });
      }
      return (std::exp(z) * (z - 1.0) + 1.0) / (z * z);
  }
  return 0.0;
}

Complex TimeFunction::operator()(Complex z) const {
  const double t2 = t * t;
  switch (kind) {
    case TimeFunKind::PsiPosition:
      return 0.5 * t2 * scalar_fun(ScalarFunKind::Psi, t2 * z);
    case TimeFunKind::SigmaPosition:
      return t * scalar_fun(ScalarFunKind::Sigma, t2 * z);
    case TimeFunKind::Cosine:
      return std::cos(t * std::sqrt(z));
    case TimeFunKind::PhiPosition:
      return t * scalar_fun(ScalarFunKind::Phi, -t * z);
  }
  return 0.0;
}

double TimeFunction::operator()(double z) const { return (*this)(Complex(z, 0.0)).real(); }

Complex TimeFunction::derivative(Complex z) const {
  const double t2 = t * t;
  switch (kind) {
    case TimeFunKind::PsiPosition:
      return 0.5 * t2 * t2 * scalar_fun_derivative(ScalarFunKind::Psi, t2 * z);
    case TimeFunKind::SigmaPosition:
      return t * t2 * scalar_fun_derivative(ScalarFunKind::Sigma, t2 * z);
    case TimeFunKind::Cosine:
      return -0.5 * t2 * scalar_fun(ScalarFunKind::Sigma, t2 * z);
    case TimeFunKind::PhiPosition:
      return -t2 * scalar_fun_derivative(ScalarFunKind::Phi, -t * z);
  }
  return 0.0;
}

// --------------------------------------------------------------------------
// SpectralCache

SpectralCache::SpectralCache(const Matrix& h) : SpectralCache(h, h.isApprox(h.transpose(), 0.0)) {}

SpectralCache::SpectralCache(const Matrix& h, bool symmetric) : n_(h.rows()), symmetric_(symmetric) {
  if (h.rows() != h.cols()) throw DimensionError("SpectralCache: matrix must be square");
  if (n_ == 0) return;
  if (!h.allFinite()) throw Error("SpectralCache: non-finite entries");
  if (symmetric_) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(h);
    if (es.info() != Eigen::Success) throw Error("SpectralCache: eigendecomposition failed");
    lambda_ = es.eigenvalues();
    q_ = es.eigenvectors();
    return;
  }
  Eigen::ComplexSchur<CMatrix> cs(h.cast<Complex>());
  if (cs.info() != Eigen::Success) throw Error("SpectralCache: Schur decomposition failed");
  t_ = cs.matrixT().triangularView<Eigen::Upper>();
  qc_ = cs.matrixU();
  reorder_clusters();
}

SpectralCache SpectralCache::from_tridiagonal(const Vector& diag, const Vector& offdiag) {
  if (offdiag.size() + 1 != diag.size() && !(diag.size() == 0 && offdiag.size() == 0)) {
    throw DimensionError("SpectralCache: off-diagonal must have length n-1");
  }
  SpectralCache c;
  c.n_ = diag.size();
  c.symmetric_ = true;
  if (c.n_ == 0) return c;
  if (!diag.allFinite() || !offdiag.allFinite()) {
    throw Error("SpectralCache: non-finite entries");
  }
  Eigen::SelfAdjointEigenSolver<Matrix> es;
  es.computeFromTridiagonal(diag, offdiag, Eigen::ComputeEigenvectors);
  if (es.info() != Eigen::Success) throw Error("SpectralCache: tridiagonal eigensolver failed");
  c.lambda_ = es.eigenvalues();
  c.q_ = es.eigenvectors();
  return c;
}

void SpectralCache::reorder_clusters() {
  const Eigen::Index n = n_;
  // Cluster labels by transitive closure of |t_ii - t_jj| <= kClusterTol.
  std::vector<Eigen::Index> label(static_cast<std::size_t>(n), -1);
  Eigen::Index next = 0;
  for (Eigen::Index i = 0; i < n; ++i) {
    if (label[i] >= 0) continue;
    label[i] = next;
    std::vector<Eigen::Index> stack{i};
    while (!stack.empty()) {
      const auto p = stack.back();
      stack.pop_back();
      for (Eigen::Index j = 0; j < n; ++j) {
        if (label[j] < 0 && std::abs(t_(j, j) - t_(p, p)) <= kClusterTol) {
          label[j] = next;
          stack.push_back(j);
        }
      }
    }
    ++next;
  }

  // Bubble equal labels together with unitary adjacent swaps.
  auto swap_adjacent = [&](Eigen::Index k) {
    const Complex a = t_(k, k);
    const Complex b = t_(k + 1, k + 1);
    const Complex x1 = t_(k, k + 1);
    const Complex x2 = b - a;
    const double r = std::hypot(std::abs(x1), std::abs(x2));
    const Complex g11 = x1 / r, g21 = x2 / r;
    const Complex g12 = -std::conj(g21), g22 = std::conj(g11);
    for (Eigen::Index j = k; j < n; ++j) {
      const Complex r1 = t_(k, j), r2 = t_(k + 1, j);
      t_(k, j) = std::conj(g11) * r1 + std::conj(g21) * r2;
      t_(k + 1, j) = std::conj(g12) * r1 + std::conj(g22) * r2;
    }
    for (Eigen::Index i = 0; i <= k + 1; ++i) {
      const Complex c1 = t_(i, k), c2 = t_(i, k + 1);
      t_(i, k) = c1 * g11 + c2 * g21;
      t_(i, k + 1) = c1 * g12 + c2 * g22;
    }
    for (Eigen::Index i = 0; i < n; ++i) {
      const Complex c1 = qc_(i, k), c2 = qc_(i, k + 1);
      qc_(i, k) = c1 * g11 + c2 * g21;
      qc_(i, k + 1) = c1 * g12 + c2 * g22;
    }
    t_(k + 1, k) = 0.0;
  };

  std::vector<Eigen::Index> first_pos(static_cast<std::size_t>(next), n);
  for (Eigen::Index i = 0; i < n; ++i) first_pos[label[i]] = std::min(first_pos[label[i]], i);
  auto rank = [&](Eigen::Index i) { return first_pos[label[i]]; };
  for (Eigen::Index pass = 0; pass < n; ++pass) {
    bool swapped = false;
    for (Eigen::Index k = 0; k + 1 < n; ++k) {
      if (rank(k) > rank(k + 1)) {
        swap_adjacent(k);
        std::swap(label[k], label[k + 1]);
        swapped = true;
      }
    }
    if (!swapped) break;
  }

  block_start_.clear();
  for (Eigen::Index i = 0; i < n;) {
    Eigen::Index j = i + 1;
    while (j < n && label[j] == label[i]) ++j;
    if (j - i <= 2) {
      block_start_.push_back(i);
    } else {
      // Split a large cluster by spreading its diagonal just past the tolerance.
      perturbed_ = true;
      const Complex centre = t_(i, i);
      for (Eigen::Index p = i; p < j; ++p) {
        t_(p, p) = centre + 2.0 * kClusterTol * static_cast<double>(p - i);
        block_start_.push_back(p);
      }
    }
    i = j;
  }
  block_start_.push_back(n);
}

CMatrix SpectralCache::triangular_function(const TimeFunction& f) const {
  const Eigen::Index n = n_;
  CMatrix fm = CMatrix::Zero(n, n);
  const auto nb = static_cast<Eigen::Index>(block_start_.size()) - 1;
  auto lo = [&](Eigen::Index b) { return block_start_[static_cast<std::size_t>(b)]; };
  auto sz = [&](Eigen::Index b) { return lo(b + 1) - lo(b); };

  for (Eigen::Index b = 0; b < nb; ++b) {
    const auto i = lo(b);
    fm(i, i) = f(t_(i, i));
    if (sz(b) == 2) {
      const Complex a = t_(i, i), c = t_(i + 1, i + 1);
      fm(i + 1, i + 1) = f(c);
      fm(i, i + 1) = t_(i, i + 1) * f.derivative(0.5 * (a + c));
    }
  }

  for (Eigen::Index d = 1; d < nb; ++d) {
    for (Eigen::Index bi = 0; bi + d < nb; ++bi) {
      const Eigen::Index bj = bi + d;
      const auto i0 = lo(bi), si = sz(bi), j0 = lo(bj), sj = sz(bj);
      CMatrix rhs = fm.block(i0, i0, si, si) * t_.block(i0, j0, si, sj) -
                    t_.block(i0, j0, si, sj) * fm.block(j0, j0, sj, sj);
      for (Eigen::Index bk = bi + 1; bk < bj; ++bk) {
        const auto k0 = lo(bk), sk = sz(bk);
        rhs += fm.block(i0, k0, si, sk) * t_.block(k0, j0, sk, sj) -
               t_.block(i0, k0, si, sk) * fm.block(k0, j0, sk, sj);
      }
      if (si == 1 && sj == 1) {
        fm(i0, j0) = rhs(0, 0) / (t_(i0, i0) - t_(j0, j0));
        continue;
      }
      // T_ii X - X T_jj = rhs as a Kronecker system on vec(X).
      const Eigen::Index s = si * sj;
      CMatrix k = CMatrix::Zero(s, s);
      const CMatrix tii = t_.block(i0, i0, si, si);
      const CMatrix tjj = t_.block(j0, j0, sj, sj);
      for (Eigen::Index q = 0; q < sj; ++q) {
        k.block(q * si, q * si, si, si) += tii;
        for (Eigen::Index p = 0; p < sj; ++p) {
          k.block(p * si, q * si, si, si) -= tjj(q, p) * CMatrix::Identity(si, si);
        }
      }
      const CVector x = k.fullPivLu().solve(rhs.reshaped());
      fm.block(i0, j0, si, sj) = x.reshaped(si, sj);
    }
  }
  return fm;
}

Vector SpectralCache::apply(const TimeFunction& f, const Vector& b) const {
  if (b.size() != n_) throw DimensionError("SpectralCache::apply: vector length mismatch");
  if (symmetric_) {
    Vector c = q_.transpose() * b;
    for (Eigen::Index k = 0; k < n_; ++k) c[k] *= f(lambda_[k]);
    return q_ * c;
  }
  const CVector c = qc_.adjoint() * b.cast<Complex>();
  return (qc_ * (triangular_function(f) * c)).real();
}

Vector SpectralCache::first_column(const TimeFunction& f) const {
  if (symmetric_) {
    Vector c = q_.row(0).transpose();
    for (Eigen::Index k = 0; k < n_; ++k) c[k] *= f(lambda_[k]);
    return q_ * c;
  }
  const CVector c = qc_.row(0).adjoint();
  return (qc_ * (triangular_function(f) * c)).real();
}

double SpectralCache::corner(const TimeFunction& f) const {
  if (n_ == 0) return 0.0;
  const Eigen::Index last = n_ - 1;
  if (symmetric_) {
    double s = 0.0;
    for (Eigen::Index k = 0; k < n_; ++k) s += q_(last, k) * f(lambda_[k]) * q_(0, k);
    return s;
  }
  const CVector c = qc_.row(0).adjoint();
  return (qc_.row(last) * (triangular_function(f) * c)).value().real();
}

CVector SpectralCache::eigenvalues() const {
  if (symmetric_) return lambda_.cast<Complex>();
  return t_.diagonal();
}

double SpectralCache::lambda_min() const {
  if (!symmetric_) throw PreconditionError("lambda_min: only available for symmetric H");
  if (n_ == 0) throw PreconditionError("lambda_min: empty matrix");
  return lambda_.minCoeff();
}

double SpectralCache::reconstruction_error(const Matrix& h) const {
  if (symmetric_) return (h - q_ * lambda_.asDiagonal() * q_.transpose()).norm();
  return (h.cast<Complex>() - qc_ * t_ * qc_.adjoint()).norm();
}

Vector matfun_action(const Matrix& h, const TimeFunction& f, const Vector& b,
                     const SpectralCache* cache) {
  if (cache != nullptr) return cache->apply(f, b);
  return SpectralCache(h).apply(f, b);
}

TimeFunKind position_function(ProjectedKind kind) {
  switch (kind) {
    case ProjectedKind::Psi:
      return TimeFunKind::PsiPosition;
    case ProjectedKind::Sigma:
      return TimeFunKind::SigmaPosition;
    case ProjectedKind::Phi:
      return TimeFunKind::PhiPosition;
  }
  return TimeFunKind::PsiPosition;
}

Vector projected_solution(const SpectralCache& cache, ProjectedKind kind, double beta, double t) {
  if (t < 0.0) throw PreconditionError("projected_solution: t must be nonnegative");
  return beta * cache.first_column({position_function(kind), t});
}

// --------------------------------------------------------------------------
// Dense reference

DenseMatrixFunctions::DenseMatrixFunctions(const Matrix& a)
    : symmetric_(a.isApprox(a.transpose(), 0.0)) {
  if (a.rows() != a.cols()) throw DimensionError("DenseMatrixFunctions: matrix must be square");
  if (symmetric_) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(a);
    if (es.info() != Eigen::Success) throw Error("DenseMatrixFunctions: eigensolver failed");
    lambda_ = es.eigenvalues();
    q_ = es.eigenvectors();
    return;
  }
  Eigen::EigenSolver<Matrix> es(a);
  if (es.info() != Eigen::Success) throw Error("DenseMatrixFunctions: eigensolver failed");
  clambda_ = es.eigenvalues();
  v_ = es.eigenvectors();
  vlu_.compute(v_);
}

Vector DenseMatrixFunctions::apply(const TimeFunction& f, const Vector& x) const {
  if (symmetric_) {
    Vector c = q_.transpose() * x;
    for (Eigen::Index k = 0; k < c.size(); ++k) c[k] *= f(lambda_[k]);
    return q_ * c;
  }
  CVector c = vlu_.solve(x.cast<Complex>());
  for (Eigen::Index k = 0; k < c.size(); ++k) c[k] *= f(clambda_[k]);
  return (v_ * c).real();
}

State exact_ivp_solution(const Matrix& a, const Vector& u, const Vector& v, const Vector& g,
                         double t) {
  const auto n = a.rows();
  if (a.cols() != n || u.size() != n || v.size() != n || g.size() != n) {
    throw DimensionError("exact_ivp_solution: inconsistent dimensions");
  }
  const DenseMatrixFunctions fa(a);
  const Vector w = g - a * u;
  State s;
  s.y = u + fa.apply({TimeFunKind::PsiPosition, t}, w) + fa.apply({TimeFunKind::SigmaPosition, t}, v);
  s.dy = fa.apply({TimeFunKind::SigmaPosition, t}, w) + fa.apply({TimeFunKind::Cosine, t}, v);
  return s;
}

State exact_ivp_solution(const SecondOrderIVP& ivp, double t, std::size_t cap) {
  ivp.validate();
  const Matrix a = assemble_dense(*ivp.op, cap);
  return exact_ivp_solution(a, ivp.u, ivp.v, ivp.g, t);
}

}  // namespace trigkrylov
