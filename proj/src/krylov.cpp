#include "trigkrylov/krylov.hpp"

#include <cmath>
#include <span>
#include <string>

#include "trigkrylov/kernels.hpp"

namespace trigkrylov {

namespace {

std::span<const double> cspan(const Eigen::Ref<const Vector>& v) {
  return {v.data(), static_cast<std::size_t>(v.size())};
}
std::span<double> mspan(Eigen::Ref<Vector> v) {
  return {v.data(), static_cast<std::size_t>(v.size())};
}

double dot(const Eigen::Ref<const Vector>& a, const Eigen::Ref<const Vector>& b) {
  return kernels::parallel::dot(cspan(a), cspan(b));
}
double nrm2(const Eigen::Ref<const Vector>& a) { return kernels::parallel::nrm2(cspan(a)); }
void axpy(double alpha, const Eigen::Ref<const Vector>& x, Eigen::Ref<Vector> y) {
  kernels::parallel::axpy(alpha, cspan(x), mspan(y));
}

// Shared by the builder and the regeneration pass so both produce identical bits.
void normalize_into(const Vector& w, double b, Eigen::Ref<Vector> out) { out = w / b; }

}  // namespace

KrylovBuilder::KrylovBuilder(const LinearOperator& op, const Vector& w, Eigen::Index capacity,
                             KrylovOptions opts)
    : op_(op), reorth_(opts.reorth), cap_(capacity) {
  const auto n = static_cast<Eigen::Index>(op.dim());
  if (w.size() != n) throw DimensionError("krylov: starting vector length mismatch");
  if (capacity < 1) throw PreconditionError("krylov: capacity must be at least 1");
  if (capacity > n) cap_ = n;
  beta_ = nrm2(w);
  if (!(beta_ > 0.0)) throw PreconditionError("krylov: zero starting vector");
  if (!std::isfinite(beta_)) throw Error("krylov: non-finite starting vector");

  mode_ = opts.mode;
  if (mode_ == KrylovMode::Auto) {
    mode_ = op.is_symmetric() ? KrylovMode::Lanczos : KrylovMode::FullArnoldi;
  }
  if (mode_ != KrylovMode::FullArnoldi && !op.is_symmetric()) {
    throw PreconditionError("krylov: Lanczos requires a symmetric operator");
  }
  if (mode_ == KrylovMode::LanczosThreeTerm) {
    cur_.resize(n);
    normalize_into(w, beta_, cur_);
    prev_ = Vector::Zero(n);
  } else {
    basis_.resize(n, cap_ + 1);
    normalize_into(w, beta_, basis_.col(0));
  }
  if (mode_ == KrylovMode::FullArnoldi) {
    h_ = Matrix::Zero(cap_ + 1, cap_);
  } else {
    alpha_.resize(cap_);
    betas_.resize(cap_);
  }
}

bool KrylovBuilder::step() {
  if (breakdown_ || m_ >= cap_) return false;
  const Eigen::Index j = m_;
  const bool full = mode_ != KrylovMode::LanczosThreeTerm;
  if (!full && j > 0) {
    std::swap(prev_, cur_);
    std::swap(cur_, next_);
  }
  auto vj = [&]() -> Eigen::Ref<const Vector> {
    if (full) return basis_.col(j);
    return cur_;
  };

  Vector w(basis_.rows() > 0 ? basis_.rows() : cur_.size());
  op_.apply(cspan(vj()), mspan(w));
  double hnorm_add = 0.0;

  if (mode_ == KrylovMode::FullArnoldi) {
    for (Eigen::Index i = 0; i <= j; ++i) {
      const double hij = dot(basis_.col(i), w);
      h_(i, j) = hij;
      axpy(-hij, basis_.col(i), w);
    }
    if (reorth_) {
      for (Eigen::Index i = 0; i <= j; ++i) {
        const double c = dot(basis_.col(i), w);
        h_(i, j) += c;
        axpy(-c, basis_.col(i), w);
      }
    }
    for (Eigen::Index i = 0; i <= j; ++i) hnorm_add += h_(i, j) * h_(i, j);
  } else {
    if (j > 0) {
      if (full) {
        axpy(-betas_[j - 1], basis_.col(j - 1), w);
      } else {
        axpy(-betas_[j - 1], prev_, w);
      }
    }
    const double a = dot(vj(), w);
    alpha_[j] = a;
    axpy(-a, vj(), w);
    if (reorth_ && full) {
      for (int pass = 0; pass < 2; ++pass) {
        for (Eigen::Index i = 0; i <= j; ++i) axpy(-dot(basis_.col(i), w), basis_.col(i), w);
      }
    }
    hnorm_add = a * a;
  }
  if (j > 0) hnorm_add += 2.0 * h_next_ * h_next_;
  h_frob2_ += hnorm_add;

  const double hn = nrm2(w);
  m_ = j + 1;
  const double scale = std::sqrt(h_frob2_);
  if (hn <= kBreakdownTol * scale || hn == 0.0) {
    breakdown_ = true;
    h_next_ = 0.0;
    next_ = Vector::Zero(w.size());
  } else {
    h_next_ = hn;
    if (full) {
      normalize_into(w, hn, basis_.col(j + 1));
    } else {
      next_.resize(w.size());
      normalize_into(w, hn, next_);
    }
  }
  if (mode_ == KrylovMode::FullArnoldi) {
    h_(j + 1, j) = h_next_;
  } else {
    betas_[j] = h_next_;
  }
  if (!std::isfinite(hn)) throw Error("krylov: non-finite vector encountered");
  return true;
}

SpectralCache KrylovBuilder::factorize() const {
  if (mode_ == KrylovMode::FullArnoldi) {
    return SpectralCache(Matrix(h_.topLeftCorner(m_, m_)), false);
  }
  return SpectralCache::from_tridiagonal(alpha_.head(m_), betas_.head(m_ > 0 ? m_ - 1 : 0));
}

Vector KrylovBuilder::combine(const Vector& c) const {
  if (mode_ == KrylovMode::LanczosThreeTerm) {
    throw PreconditionError("combine: three-term Lanczos keeps no basis");
  }
  if (c.size() != m_) throw DimensionError("combine: coefficient length mismatch");
  return basis_.leftCols(m_) * c;
}

KrylovDecomposition KrylovBuilder::decomposition(bool with_basis) const {
  KrylovDecomposition d;
  d.mode = mode_;
  d.m = m_;
  d.beta = beta_;
  d.h_next = h_next_;
  d.breakdown = breakdown_;
  if (mode_ == KrylovMode::FullArnoldi) {
    d.h = h_.topLeftCorner(m_ + 1, m_);
  } else {
    d.h = Matrix::Zero(m_ + 1, m_);
    for (Eigen::Index i = 0; i < m_; ++i) {
      d.h(i, i) = alpha_[i];
      d.h(i + 1, i) = betas_[i];
      if (i + 1 < m_) d.h(i, i + 1) = betas_[i];
    }
  }
  if (mode_ == KrylovMode::LanczosThreeTerm) {
    d.v_last = (m_ == 0) ? Vector() : cur_;
    d.v_next = (m_ == 0) ? cur_ : next_;
  } else if (with_basis) {
    d.basis = basis_.leftCols(m_ + 1);
    if (breakdown_) d.basis.col(m_).setZero();
    d.v_next = d.basis.col(m_);
  }
  return d;
}

SpectralCache KrylovDecomposition::factorize() const {
  if (m == 0) return {};
  if (tridiagonal()) {
    const Vector diag = h.diagonal().head(m);
    const Vector off = h.diagonal(-1).head(m - 1);
    return SpectralCache::from_tridiagonal(diag, off);
  }
  return SpectralCache(square(), false);
}

Vector KrylovDecomposition::combine(const Vector& c) const {
  if (!has_basis()) throw PreconditionError("combine: decomposition keeps no basis");
  if (c.size() != m) throw DimensionError("combine: coefficient length mismatch");
  return basis.leftCols(m) * c;
}

KrylovDecomposition krylov_build(const LinearOperator& op, const Vector& w, Eigen::Index m_target,
                                 KrylovOptions opts) {
  if (m_target > static_cast<Eigen::Index>(op.dim())) {
    throw PreconditionError("krylov_build: m_target exceeds operator dimension");
  }
  KrylovBuilder b(op, w, m_target, opts);
  while (b.step()) {
  }
  return b.decomposition();
}

void regenerate_basis(const LinearOperator& op, const Vector& w, const KrylovDecomposition& d,
                      const std::function<void(Eigen::Index, const Vector&)>& visit) {
  const Eigen::Index m = d.m;
  if (m == 0) return;
  if (w.size() != static_cast<Eigen::Index>(op.dim())) {
    throw DimensionError("regenerate_basis: starting vector length mismatch");
  }
  Vector cur(w.size());
  normalize_into(w, d.beta, cur);
  if (d.tridiagonal()) {
    Vector prev = Vector::Zero(w.size());
    Vector next(w.size());
    Vector tmp;
    for (Eigen::Index j = 0; j < m; ++j) {
      visit(j, cur);
      if (j + 1 == m) break;
      op.apply(cur, tmp);
      if (j > 0) axpy(-d.h(j, j - 1), prev, tmp);
      axpy(-d.h(j, j), cur, tmp);
      normalize_into(tmp, d.h(j + 1, j), next);
      std::swap(prev, cur);
      std::swap(cur, next);
    }
    return;
  }
  Matrix v(w.size(), m);
  v.col(0) = cur;
  Vector tmp;
  for (Eigen::Index j = 0; j < m; ++j) {
    visit(j, v.col(j));
    if (j + 1 == m) break;
    tmp.resize(w.size());
    op.apply(cspan(v.col(j)), mspan(tmp));
    for (Eigen::Index i = 0; i <= j; ++i) axpy(-d.h(i, j), v.col(i), tmp);
    normalize_into(tmp, d.h(j + 1, j), v.col(j + 1));
  }
}

ResidualCurve::ResidualCurve(SpectralCache cache, ProjectedKind kind, double beta, double h_next)
    : cache_(std::move(cache)), kind_(kind), beta_(beta), h_next_(h_next) {}

ResidualCurve::ResidualCurve(const KrylovDecomposition& d, ProjectedKind kind)
    : ResidualCurve(d.factorize(), kind, d.beta, d.h_next) {}

double ResidualCurve::operator()(double t) const {
  if (h_next_ == 0.0 || cache_.size() == 0) return 0.0;
  return h_next_ * std::abs(beta_ * cache_.corner({position_function(kind_), t}));
}

Vector ResidualCurve::coefficients(double t) const {
  return projected_solution(cache_, kind_, beta_, t);
}

double residual_norm_at(const ResidualCurve& curve, double t) {
  if (t < 0.0) throw PreconditionError("residual_norm_at: t must be nonnegative");
  return curve(t);
}

Vector residual_vector(const KrylovDecomposition& d, ProjectedKind kind, double t) {
  const ResidualCurve curve(d, kind);
  const Vector u = curve.coefficients(t);
  return -d.h_next * u[d.m - 1] * d.v_next;
}

}  // namespace trigkrylov
