#pragma once

// Data-parallel inner loops. Every kernel exists twice: a plain serial loop
// (the reference used by the tests) and an OpenMP version used by the solvers.
// Both variants take identical arguments so they can be swapped one-for-one.

#include <cstddef>
#include <cstdint>
#include <span>

namespace trigkrylov::kernels {

/// Tridiagonal 1-D factor stored by diagonals; lower/upper have length n-1.
struct TridiagView {
  std::span<const double> lower;
  std::span<const double> diag;
  std::span<const double> upper;
};

/// Compressed sparse row storage, borrowed.
struct CsrView {
  std::span<const std::int64_t> row_ptr;
  std::span<const std::int64_t> col_idx;
  std::span<const double> values;
};

namespace serial {

double dot(std::span<const double> x, std::span<const double> y);
double nrm2(std::span<const double> x);
void axpy(double alpha, std::span<const double> x, std::span<double> y);
void scal(double alpha, std::span<double> x);

// y = (Tz (x) I (x) I + I (x) Ty (x) I + I (x) I (x) Tx) x, x fastest.
void kron_sum3d(const TridiagView& tx, const TridiagView& ty, const TridiagView& tz,
                std::span<const double> x, std::span<double> y);

void csr_spmv(const CsrView& a, std::span<const double> x, std::span<double> y);

}  // namespace serial

namespace parallel {

double dot(std::span<const double> x, std::span<const double> y);
double nrm2(std::span<const double> x);
void axpy(double alpha, std::span<const double> x, std::span<double> y);
void scal(double alpha, std::span<double> x);

void kron_sum3d(const TridiagView& tx, const TridiagView& ty, const TridiagView& tz,
                std::span<const double> x, std::span<double> y);

void csr_spmv(const CsrView& a, std::span<const double> x, std::span<double> y);

}  // namespace parallel

/// Number of OpenMP threads the parallel kernels will use.
int max_threads();

}  // namespace trigkrylov::kernels
