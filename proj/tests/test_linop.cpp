#include <gtest/gtest.h>

#include <sstream>
#include <thread>
#include <vector>

#include <unsupported/Eigen/KroneckerProduct>

#include "support.hpp"
#include "trigkrylov/linop.hpp"
#include "trigkrylov/matrix_market.hpp"

using namespace trigkrylov;
using tk_test::Rng;

namespace {

Matrix kron_sum_oracle(const Matrix& lx, const Matrix& ly, const Matrix& lz) {
  const Matrix ix = Matrix::Identity(lx.rows(), lx.rows());
  const Matrix iy = Matrix::Identity(ly.rows(), ly.rows());
  const Matrix iz = Matrix::Identity(lz.rows(), lz.rows());
  Matrix a = Eigen::kroneckerProduct(lz, Eigen::kroneckerProduct(iy, ix).eval()).eval();
  a += Eigen::kroneckerProduct(iz, Eigen::kroneckerProduct(ly, ix).eval()).eval();
  a += Eigen::kroneckerProduct(iz, Eigen::kroneckerProduct(iy, lx).eval()).eval();
  return a;
}

}  // namespace

TEST(Linop, IdentityApply) {
  IdentityOperator id(3);
  const Vector x = (Vector(3) << 1, 2, 3).finished();
  EXPECT_EQ(id.apply(x), x);
  EXPECT_EQ(id.matvec_count(), 1u);
}

TEST(Linop, DirichletLaplacianStencil) {
  const Tridiagonal l = dirichlet_laplacian_1d(3);
  const Matrix a = l.dense();
  const Vector y = a * Vector::Ones(3);
  EXPECT_NEAR(y[0], 16.0, 1e-12);
  EXPECT_NEAR(y[1], 0.0, 1e-12);
  EXPECT_NEAR(y[2], 16.0, 1e-12);
}

TEST(Linop, BlockFirstOrder) {
  auto inner = std::make_shared<const IdentityOperator>(2);
  BlockFirstOrderOperator b(inner);
  const Vector x = (Vector(4) << 1, 2, 3, 4).finished();
  const Vector y = b.apply(x);
  EXPECT_EQ(y, (Vector(4) << -3, -4, 1, 2).finished());
  EXPECT_EQ(b.matvec_count(), 1u);
  EXPECT_EQ(inner->matvec_count(), 1u);
}

TEST(Linop, BlockFirstOrderAssembled1x1) {
  auto inner = std::make_shared<const DenseOperator>(Matrix::Constant(1, 1, 2.5));
  BlockFirstOrderOperator b(inner);
  const Matrix m = assemble_dense(b);
  Matrix expect(2, 2);
  expect << 0, -1, 2.5, 0;
  EXPECT_EQ(m, expect);
}

TEST(Linop, AssembleIdentity) {
  IdentityOperator id(2);
  EXPECT_EQ(assemble_dense(id), Matrix::Identity(2, 2));
  EXPECT_EQ(id.matvec_count(), 2u);
}

TEST(Linop, AssembleCapEnforced) {
  IdentityOperator id(10);
  EXPECT_THROW((void)assemble_dense(id, 5), DimensionError);
}

TEST(Linop, DimensionMismatchThrows) {
  IdentityOperator id(3);
  EXPECT_THROW((void)id.apply(Vector::Ones(4)), DimensionError);
  EXPECT_EQ(id.matvec_count(), 0u);
}

TEST(Linop, KroneckerSumMatchesExplicitAssembly) {
  Rng rng(7);
  for (std::size_t n : {2u, 3u, 5u, 8u}) {
    const Tridiagonal lx = dirichlet_laplacian_1d(n).scaled(3.0);
    const Tridiagonal ly = dirichlet_laplacian_1d(n + 1).scaled(0.5);
    const Tridiagonal lz = dirichlet_laplacian_1d(n);
    KroneckerSum3D k(lx, ly, lz);
    const Matrix oracle = kron_sum_oracle(lx.dense(), ly.dense(), lz.dense());
    ASSERT_EQ(static_cast<Eigen::Index>(k.dim()), oracle.rows());
    const Vector x = tk_test::random_vector(oracle.rows(), rng);
    EXPECT_LE(tk_test::rel_err(k.apply(x), oracle * x), 1e-12) << "n=" << n;

    const auto csr = k.assemble();
    EXPECT_TRUE(csr->is_symmetric());
    EXPECT_LE(tk_test::rel_err(csr->apply(x), oracle * x), 1e-12);
  }
}

TEST(Linop, KroneckerSum2x2x2IsotropicHandAssembly) {
  const Tridiagonal l = dirichlet_laplacian_1d(2);
  KroneckerSum3D k(l, l, l);
  const Matrix a = assemble_dense(k);
  // h = 1/3: diagonal 3 * 2 * 9, each neighbour -9.
  for (int i = 0; i < 8; ++i) {
    EXPECT_DOUBLE_EQ(a(i, i), 54.0);
    int nb = 0;
    for (int j = 0; j < 8; ++j) {
      if (j == i) continue;
      const int diff = i ^ j;
      if (diff == 1 || diff == 2 || diff == 4) {
        EXPECT_DOUBLE_EQ(a(i, j), -9.0);
        ++nb;
      } else {
        EXPECT_DOUBLE_EQ(a(i, j), 0.0);
      }
    }
    EXPECT_EQ(nb, 3);
  }
}

TEST(LinopProperty, LinearityAndSymmetry) {
  Rng rng(11);
  std::vector<std::unique_ptr<LinearOperator>> ops;
  ops.push_back(std::make_unique<DiagonalOperator>(tk_test::random_vector(27, rng)));
  ops.push_back(std::make_unique<DenseOperator>(tk_test::random_spd(27, rng)));
  ops.push_back(std::make_unique<DenseOperator>(tk_test::random_nonsymmetric(27, rng)));
  const Tridiagonal l = dirichlet_laplacian_1d(3);
  ops.push_back(std::make_unique<KroneckerSum3D>(l, l.scaled(2.0), l.scaled(0.1)));
  ops.push_back(KroneckerSum3D(l, l, l).assemble());

  for (const auto& op : ops) {
    for (int trial = 0; trial < 5; ++trial) {
      const Vector x = tk_test::random_vector(27, rng);
      const Vector y = tk_test::random_vector(27, rng);
      const double a = 1.7, b = -0.3;
      const Vector lhs = op->apply(a * x + b * y);
      const Vector rhs = a * op->apply(x) + b * op->apply(y);
      EXPECT_LE(tk_test::rel_err(lhs, rhs), 1e-12);
      if (op->is_symmetric()) {
        const double s1 = op->apply(x).dot(y);
        const double s2 = x.dot(op->apply(y));
        EXPECT_LE(std::abs(s1 - s2), 1e-12 * (std::abs(s1) + 1.0));
      }
    }
  }
  EXPECT_FALSE(ops[2]->is_symmetric());
}

TEST(LinopProperty, MatvecCountExact) {
  Rng rng(3);
  DenseOperator a(tk_test::random_spd(10, rng));
  const Vector x = Vector::Ones(10);
  Vector y(10);
  for (int k = 1; k <= 17; ++k) {
    a.apply(x, y);
    EXPECT_EQ(a.matvec_count(), static_cast<std::uint64_t>(k));
  }
}

TEST(LinopProperty, ConcurrentApplyCountsEveryCall) {
  const Tridiagonal l = dirichlet_laplacian_1d(6);
  KroneckerSum3D k(l, l, l);
  const Vector x = Vector::LinSpaced(static_cast<Eigen::Index>(k.dim()), 0.0, 1.0);
  const Vector ref = k.apply(x);
  constexpr int kThreads = 4, kCalls = 50;
  std::vector<std::thread> pool;
  std::vector<double> errs(kThreads, 0.0);
  for (int t = 0; t < kThreads; ++t) {
    pool.emplace_back([&, t] {
      Vector y(x.size());
      for (int c = 0; c < kCalls; ++c) {
        k.apply(x, y);
        errs[t] = std::max(errs[t], (y - ref).norm());
      }
    });
  }
  for (auto& th : pool) th.join();
  EXPECT_EQ(k.matvec_count(), 1u + kThreads * kCalls);
  for (double e : errs) EXPECT_EQ(e, 0.0);
}

TEST(SparseCsr, SortsAndSumsDuplicates) {
  SparseCSR a(3, {{2, 0, 1.0}, {0, 2, 2.0}, {0, 0, 1.0}, {0, 2, 3.0}, {1, 1, 4.0}});
  EXPECT_EQ(a.nnz(), 4u);
  const auto cols = a.col_idx();
  EXPECT_EQ(cols[0], 0);
  EXPECT_EQ(cols[1], 2);
  EXPECT_DOUBLE_EQ(a.values()[1], 5.0);
  EXPECT_FALSE(a.is_symmetric());
  const Vector y = a.apply(Vector::Ones(3));
  EXPECT_EQ(y, (Vector(3) << 6, 4, 1).finished());
}

TEST(SparseCsr, OutOfRangeEntryThrows) {
  EXPECT_THROW(SparseCSR(2, {{0, 2, 1.0}}), DimensionError);
}

TEST(MatrixMarket, GeneralAndSymmetric) {
  std::istringstream gen(
      "%%MatrixMarket matrix coordinate real general\n% comment\n2 2 3\n1 1 2.0\n1 2 -1\n2 2 3\n");
  const auto a = read_matrix_market(gen);
  EXPECT_FALSE(a->is_symmetric());
  EXPECT_EQ(assemble_dense(*a), (Matrix(2, 2) << 2, -1, 0, 3).finished());

  std::istringstream sym(
      "%%MatrixMarket matrix coordinate real symmetric\n3 3 3\n1 1 2\n2 1 -1\n3 3 1\n");
  const auto s = read_matrix_market(sym);
  EXPECT_TRUE(s->is_symmetric());
  const Matrix d = assemble_dense(*s);
  EXPECT_EQ(d(0, 1), -1.0);
  EXPECT_EQ(d(1, 0), -1.0);
}

TEST(MatrixMarket, RejectsMalformed) {
  std::istringstream bad("%%MatrixMarket matrix array real general\n2 2\n1\n2\n3\n4\n");
  EXPECT_THROW((void)read_matrix_market(bad), Error);
  std::istringstream rect("%%MatrixMarket matrix coordinate real general\n2 3 0\n");
  EXPECT_THROW((void)read_matrix_market(rect), DimensionError);
  std::istringstream shortf("%%MatrixMarket matrix coordinate real general\n2 2 2\n1 1 1\n");
  EXPECT_THROW((void)read_matrix_market(shortf), Error);
}

TEST(VectorDump, RoundTrip) {
  Rng rng(5);
  const Vector x = tk_test::random_vector(13, rng);
  std::stringstream ss;
  write_vector_binary(ss, x);
  std::string header;
  std::getline(ss, header);
  EXPECT_EQ(header, "n 13");
  ss.seekg(0);
  EXPECT_EQ(read_vector_binary(ss), x);
}
