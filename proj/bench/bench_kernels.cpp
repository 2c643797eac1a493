// Serial reference kernels against their OpenMP counterparts.

#include <benchmark/benchmark.h>

#include <random>
#include <vector>

#include "trigkrylov/kernels.hpp"
#include "trigkrylov/linop.hpp"

namespace ks = trigkrylov::kernels;
using trigkrylov::Tridiagonal;

namespace {

std::vector<double> random_data(std::size_t n, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<double> x(n);
  for (double& v : x) v = u(rng);
  return x;
}

ks::TridiagView view(const Tridiagonal& t) { return {t.lower, t.diag, t.upper}; }

template <bool Parallel>
void BM_dot(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto x = random_data(n, 1), y = random_data(n, 2);
  for (auto _ : state) {
    const double d = Parallel ? ks::parallel::dot(x, y) : ks::serial::dot(x, y);
    benchmark::DoNotOptimize(d);
  }
  state.SetBytesProcessed(state.iterations() * static_cast<std::int64_t>(2 * n * sizeof(double)));
}

template <bool Parallel>
void BM_axpy(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto x = random_data(n, 3);
  auto y = random_data(n, 4);
  for (auto _ : state) {
    if constexpr (Parallel) {
      ks::parallel::axpy(1e-3, x, y);
    } else {
      ks::serial::axpy(1e-3, x, y);
    }
    benchmark::ClobberMemory();
  }
  state.SetBytesProcessed(state.iterations() * static_cast<std::int64_t>(3 * n * sizeof(double)));
}

template <bool Parallel>
void BM_kron_sum3d(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const Tridiagonal l = trigkrylov::dirichlet_laplacian_1d(n);
  const auto x = random_data(n * n * n, 5);
  std::vector<double> y(x.size());
  for (auto _ : state) {
    if constexpr (Parallel) {
      ks::parallel::kron_sum3d(view(l), view(l), view(l), x, y);
    } else {
      ks::serial::kron_sum3d(view(l), view(l), view(l), x, y);
    }
    benchmark::DoNotOptimize(y.data());
  }
  state.counters["dof"] = static_cast<double>(x.size());
}

template <bool Parallel>
void BM_csr_spmv(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const Tridiagonal l = trigkrylov::dirichlet_laplacian_1d(n);
  const auto a = trigkrylov::KroneckerSum3D(l, l, l).assemble();
  const ks::CsrView v{a->row_ptr(), a->col_idx(), a->values()};
  const auto x = random_data(a->dim(), 6);
  std::vector<double> y(x.size());
  for (auto _ : state) {
    if constexpr (Parallel) {
      ks::parallel::csr_spmv(v, x, y);
    } else {
      ks::serial::csr_spmv(v, x, y);
    }
    benchmark::DoNotOptimize(y.data());
  }
  state.counters["nnz"] = static_cast<double>(a->nnz());
}

}  // namespace

BENCHMARK(BM_dot<false>)->Name("dot/serial")->Arg(1 << 16)->Arg(1 << 20);
BENCHMARK(BM_dot<true>)->Name("dot/parallel")->Arg(1 << 16)->Arg(1 << 20);
BENCHMARK(BM_axpy<false>)->Name("axpy/serial")->Arg(1 << 16)->Arg(1 << 20);
BENCHMARK(BM_axpy<true>)->Name("axpy/parallel")->Arg(1 << 16)->Arg(1 << 20);
BENCHMARK(BM_kron_sum3d<false>)->Name("kron_sum3d/serial")->Arg(20)->Arg(40)->Arg(80);
BENCHMARK(BM_kron_sum3d<true>)->Name("kron_sum3d/parallel")->Arg(20)->Arg(40)->Arg(80);
BENCHMARK(BM_csr_spmv<false>)->Name("csr_spmv/serial")->Arg(20)->Arg(40);
BENCHMARK(BM_csr_spmv<true>)->Name("csr_spmv/parallel")->Arg(20)->Arg(40);

BENCHMARK_MAIN();
