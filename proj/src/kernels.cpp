#include "trigkrylov/kernels.hpp"

#include <cassert>
#include <cmath>

#include <omp.h>

namespace trigkrylov::kernels {

namespace {

// Contribution of one tridiagonal factor along a stride.
inline double tri_row(const TridiagView& t, std::size_t i, std::size_t n, const double* x,
                      std::size_t stride) {
  double s = t.diag[i] * x[0];
  if (i > 0) s += t.lower[i - 1] * x[-static_cast<std::ptrdiff_t>(stride)];
  if (i + 1 < n) s += t.upper[i] * x[stride];
  return s;
}

}  // namespace

namespace serial {

double dot(std::span<const double> x, std::span<const double> y) {
  assert(x.size() == y.size());
  double s = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) s += x[i] * y[i];
  return s;
}

double nrm2(std::span<const double> x) { return std::sqrt(dot(x, x)); }

void axpy(double alpha, std::span<const double> x, std::span<double> y) {
  assert(x.size() == y.size());
  for (std::size_t i = 0; i < x.size(); ++i) y[i] += alpha * x[i];
}

void scal(double alpha, std::span<double> x) {
  for (double& v : x) v *= alpha;
}

void kron_sum3d(const TridiagView& tx, const TridiagView& ty, const TridiagView& tz,
                std::span<const double> x, std::span<double> y) {
  const std::size_t nx = tx.diag.size();
  const std::size_t ny = ty.diag.size();
  const std::size_t nz = tz.diag.size();
  assert(x.size() == nx * ny * nz && y.size() == x.size());
  for (std::size_t k = 0; k < nz; ++k) {
    for (std::size_t j = 0; j < ny; ++j) {
      for (std::size_t i = 0; i < nx; ++i) {
        const std::size_t p = i + nx * (j + ny * k);
        const double* xp = x.data() + p;
        y[p] = tri_row(tx, i, nx, xp, 1) + tri_row(ty, j, ny, xp, nx) +
               tri_row(tz, k, nz, xp, nx * ny);
      }
    }
  }
}

void csr_spmv(const CsrView& a, std::span<const double> x, std::span<double> y) {
  const std::size_t rows = a.row_ptr.size() - 1;
  assert(y.size() == rows);
  for (std::size_t r = 0; r < rows; ++r) {
    double s = 0.0;
    for (auto k = a.row_ptr[r]; k < a.row_ptr[r + 1]; ++k) s += a.values[k] * x[a.col_idx[k]];
    y[r] = s;
  }
}

}  // namespace serial

namespace parallel {

double dot(std::span<const double> x, std::span<const double> y) {
  assert(x.size() == y.size());
  const auto n = static_cast<std::int64_t>(x.size());
  double s = 0.0;
#pragma omp parallel for schedule(static) reduction(+ : s)
  for (std::int64_t i = 0; i < n; ++i) s += x[i] * y[i];
  return s;
}

double nrm2(std::span<const double> x) { return std::sqrt(dot(x, x)); }

void axpy(double alpha, std::span<const double> x, std::span<double> y) {
  assert(x.size() == y.size());
  const auto n = static_cast<std::int64_t>(x.size());
#pragma omp parallel for schedule(static)
  for (std::int64_t i = 0; i < n; ++i) y[i] += alpha * x[i];
}

void scal(double alpha, std::span<double> x) {
  const auto n = static_cast<std::int64_t>(x.size());
#pragma omp parallel for schedule(static)
  for (std::int64_t i = 0; i < n; ++i) x[i] *= alpha;
}

void kron_sum3d(const TridiagView& tx, const TridiagView& ty, const TridiagView& tz,
                std::span<const double> x, std::span<double> y) {
  const std::size_t nx = tx.diag.size();
  const std::size_t ny = ty.diag.size();
  const auto nz = static_cast<std::int64_t>(tz.diag.size());
  const auto nyz = static_cast<std::int64_t>(ny) * nz;
  assert(x.size() == nx * ny * static_cast<std::size_t>(nz) && y.size() == x.size());
#pragma omp parallel for schedule(static)
  for (std::int64_t jk = 0; jk < nyz; ++jk) {
    const auto k = static_cast<std::size_t>(jk) / ny;
    const auto j = static_cast<std::size_t>(jk) % ny;
    const std::size_t base = nx * (j + ny * k);
    for (std::size_t i = 0; i < nx; ++i) {
      const double* xp = x.data() + base + i;
      y[base + i] = tri_row(tx, i, nx, xp, 1) + tri_row(ty, j, ny, xp, nx) +
                    tri_row(tz, k, static_cast<std::size_t>(nz), xp, nx * ny);
    }
  }
}

void csr_spmv(const CsrView& a, std::span<const double> x, std::span<double> y) {
  const auto rows = static_cast<std::int64_t>(a.row_ptr.size()) - 1;
  assert(y.size() == static_cast<std::size_t>(rows));
#pragma omp parallel for schedule(static)
  for (std::int64_t r = 0; r < rows; ++r) {
    double s = 0.0;
    for (auto k = a.row_ptr[r]; k < a.row_ptr[r + 1]; ++k) s += a.values[k] * x[a.col_idx[k]];
    y[r] = s;
  }
}

}  // namespace parallel

int max_threads() { return omp_get_max_threads(); }

}  // namespace trigkrylov::kernels
