#include "trigkrylov/linop.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "trigkrylov/kernels.hpp"

namespace trigkrylov {

void LinearOperator::apply(std::span<const double> x, std::span<double> y) const {
  if (x.size() != dim_ || y.size() != dim_) {
    throw DimensionError("apply: operator dimension " + std::to_string(dim_) +
                         ", got vectors of length " + std::to_string(x.size()) + " and " +
                         std::to_string(y.size()));
  }
  do_apply(x, y);
  count_.fetch_add(1, std::memory_order_relaxed);
}

void LinearOperator::apply(const Vector& x, Vector& y) const {
  if (static_cast<std::size_t>(x.size()) != dim_) {
    throw DimensionError("apply: operator dimension " + std::to_string(dim_) +
                         ", got vector of length " + std::to_string(x.size()));
  }
  y.resize(x.size());
  apply(std::span<const double>(x.data(), dim_), std::span<double>(y.data(), dim_));
}

Vector LinearOperator::apply(const Vector& x) const {
  Vector y;
  apply(x, y);
  return y;
}

void IdentityOperator::do_apply(std::span<const double> x, std::span<double> y) const {
  std::copy(x.begin(), x.end(), y.begin());
}

DiagonalOperator::DiagonalOperator(Vector d)
    : LinearOperator(static_cast<std::size_t>(d.size()), true), d_(std::move(d)) {}

void DiagonalOperator::do_apply(std::span<const double> x, std::span<double> y) const {
  for (std::size_t i = 0; i < x.size(); ++i) y[i] = d_[static_cast<Eigen::Index>(i)] * x[i];
}

DenseOperator::DenseOperator(Matrix a) : DenseOperator(a, a.isApprox(a.transpose(), 0.0)) {}

DenseOperator::DenseOperator(Matrix a, bool symmetric)
    : LinearOperator(static_cast<std::size_t>(a.rows()), symmetric), a_(std::move(a)) {
  if (a_.rows() != a_.cols()) throw DimensionError("DenseOperator: matrix must be square");
}

void DenseOperator::do_apply(std::span<const double> x, std::span<double> y) const {
  const auto n = a_.rows();
  Eigen::Map<const Vector> xm(x.data(), n);
  Eigen::Map<Vector> ym(y.data(), n);
  ym.noalias() = a_ * xm;
}

namespace {

bool csr_is_symmetric(std::size_t n, const std::vector<std::int64_t>& rp,
                      const std::vector<std::int64_t>& ci, const std::vector<double>& v) {
  for (std::size_t r = 0; r < n; ++r) {
    for (auto k = rp[r]; k < rp[r + 1]; ++k) {
      const auto c = static_cast<std::size_t>(ci[k]);
      const auto first = ci.begin() + rp[c];
      const auto last = ci.begin() + rp[c + 1];
      const auto it = std::lower_bound(first, last, static_cast<std::int64_t>(r));
      if (it == last || *it != static_cast<std::int64_t>(r)) {
        if (v[k] != 0.0) return false;
        continue;
      }
      if (v[static_cast<std::size_t>(it - ci.begin())] != v[k]) return false;
    }
  }
  return true;
}

}  // namespace

SparseCSR::SparseCSR(std::size_t n, std::vector<Triplet> entries, std::optional<bool> symmetric)
    : LinearOperator(n, false) {
  for (const auto& e : entries) {
    if (e.row < 0 || e.col < 0 || static_cast<std::size_t>(e.row) >= n ||
        static_cast<std::size_t>(e.col) >= n) {
      throw DimensionError("SparseCSR: entry (" + std::to_string(e.row) + ", " +
                           std::to_string(e.col) + ") outside " + std::to_string(n) + "x" +
                           std::to_string(n));
    }
  }
  std::sort(entries.begin(), entries.end(), [](const Triplet& a, const Triplet& b) {
    return a.row != b.row ? a.row < b.row : a.col < b.col;
  });
  row_ptr_.assign(n + 1, 0);
  for (std::size_t k = 0; k < entries.size(); ++k) {
    if (k > 0 && entries[k].row == entries[k - 1].row && entries[k].col == entries[k - 1].col) {
      values_.back() += entries[k].value;
      continue;
    }
    col_idx_.push_back(entries[k].col);
    values_.push_back(entries[k].value);
    ++row_ptr_[static_cast<std::size_t>(entries[k].row) + 1];
  }
  for (std::size_t r = 0; r < n; ++r) row_ptr_[r + 1] += row_ptr_[r];

  set_symmetric(symmetric.value_or(csr_is_symmetric(n, row_ptr_, col_idx_, values_)));
}

void SparseCSR::do_apply(std::span<const double> x, std::span<double> y) const {
  kernels::parallel::csr_spmv({row_ptr_, col_idx_, values_}, x, y);
}

Tridiagonal Tridiagonal::scaled(double c) const {
  Tridiagonal t = *this;
  for (double& v : t.lower) v *= c;
  for (double& v : t.diag) v *= c;
  for (double& v : t.upper) v *= c;
  return t;
}

Matrix Tridiagonal::dense() const {
  const auto n = static_cast<Eigen::Index>(size());
  Matrix m = Matrix::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    m(i, i) = diag[static_cast<std::size_t>(i)];
    if (i + 1 < n) {
      m(i + 1, i) = lower[static_cast<std::size_t>(i)];
      m(i, i + 1) = upper[static_cast<std::size_t>(i)];
    }
  }
  return m;
}

Tridiagonal dirichlet_laplacian_1d(std::size_t n) {
  if (n == 0) throw DimensionError("dirichlet_laplacian_1d: n must be positive");
  const double h = 1.0 / static_cast<double>(n + 1);
  const double s = 1.0 / (h * h);
  return {std::vector<double>(n - 1, -s), std::vector<double>(n, 2.0 * s),
          std::vector<double>(n - 1, -s)};
}

Tridiagonal centered_difference_1d(std::size_t n) {
  if (n == 0) throw DimensionError("centered_difference_1d: n must be positive");
  const double h = 1.0 / static_cast<double>(n + 1);
  const double s = 1.0 / (2.0 * h);
  return {std::vector<double>(n - 1, -s), std::vector<double>(n, 0.0),
          std::vector<double>(n - 1, s)};
}

namespace {

void check_tridiagonal(const Tridiagonal& t, const char* name) {
  if (t.size() == 0 || t.lower.size() + 1 != t.size() || t.upper.size() + 1 != t.size()) {
    throw DimensionError(std::string("KroneckerSum3D: malformed factor ") + name);
  }
}

kernels::TridiagView view(const Tridiagonal& t) { return {t.lower, t.diag, t.upper}; }

}  // namespace

KroneckerSum3D::KroneckerSum3D(Tridiagonal lx, Tridiagonal ly, Tridiagonal lz)
    : LinearOperator(lx.size() * ly.size() * lz.size(),
                     lx.is_symmetric() && ly.is_symmetric() && lz.is_symmetric()),
      lx_(std::move(lx)),
      ly_(std::move(ly)),
      lz_(std::move(lz)) {
  check_tridiagonal(lx_, "x");
  check_tridiagonal(ly_, "y");
  check_tridiagonal(lz_, "z");
}

void KroneckerSum3D::do_apply(std::span<const double> x, std::span<double> y) const {
  kernels::parallel::kron_sum3d(view(lx_), view(ly_), view(lz_), x, y);
}

std::unique_ptr<SparseCSR> KroneckerSum3D::assemble() const {
  const auto nx = static_cast<std::int64_t>(lx_.size());
  const auto ny = static_cast<std::int64_t>(ly_.size());
  const auto nz = static_cast<std::int64_t>(lz_.size());
  std::vector<Triplet> e;
  e.reserve(static_cast<std::size_t>(7 * nx * ny * nz));
  auto idx = [&](std::int64_t i, std::int64_t j, std::int64_t k) { return i + nx * (j + ny * k); };
  auto add_factor = [&](const Tridiagonal& t, std::int64_t i, std::int64_t n, std::int64_t p,
                        std::int64_t stride) {
    const auto u = static_cast<std::size_t>(i);
    e.push_back({p, p, t.diag[u]});
    if (i > 0) e.push_back({p, p - stride, t.lower[u - 1]});
    if (i + 1 < n) e.push_back({p, p + stride, t.upper[u]});
  };
  for (std::int64_t k = 0; k < nz; ++k) {
    for (std::int64_t j = 0; j < ny; ++j) {
      for (std::int64_t i = 0; i < nx; ++i) {
        const auto p = idx(i, j, k);
        add_factor(lx_, i, nx, p, 1);
        add_factor(ly_, j, ny, p, nx);
        add_factor(lz_, k, nz, p, nx * ny);
      }
    }
  }
  return std::make_unique<SparseCSR>(dim(), std::move(e), is_symmetric());
}

BlockFirstOrderOperator::BlockFirstOrderOperator(OperatorPtr inner)
    : LinearOperator(2 * inner->dim(), false), inner_(std::move(inner)) {}

void BlockFirstOrderOperator::do_apply(std::span<const double> x, std::span<double> y) const {
  const std::size_t n = inner_->dim();
  // [x1; x2] -> [-x2; A x1]
  for (std::size_t i = 0; i < n; ++i) y[i] = -x[n + i];
  inner_->apply(x.first(n), y.subspan(n, n));
}

Matrix assemble_dense(const LinearOperator& op, std::size_t cap) {
  if (op.dim() > cap) {
    throw DimensionError("assemble_dense: dimension " + std::to_string(op.dim()) +
                         " exceeds cap " + std::to_string(cap));
  }
  const auto n = static_cast<Eigen::Index>(op.dim());
  Matrix a(n, n);
  Vector e = Vector::Zero(n);
  Vector col(n);
  for (Eigen::Index j = 0; j < n; ++j) {
    e[j] = 1.0;
    op.apply(e, col);
    a.col(j) = col;
    e[j] = 0.0;
  }
  return a;
}

}  // namespace trigkrylov
