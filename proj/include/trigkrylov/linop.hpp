#pragma once

// Matrix-free linear operators with matvec accounting.

#include <atomic>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "trigkrylov/error.hpp"

namespace trigkrylov {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Abstract y = A x provider.
///
/// Operators are immutable after construction except for the matvec counter,
/// which is atomic; apply() may be called concurrently on distinct vectors.
class LinearOperator {
 public:
  virtual ~LinearOperator() = default;
  LinearOperator(const LinearOperator&) = delete;
  LinearOperator& operator=(const LinearOperator&) = delete;

  [[nodiscard]] std::size_t dim() const { return dim_; }
  [[nodiscard]] bool is_symmetric() const { return symmetric_; }

  /// y = A x. Throws DimensionError if the sizes do not match dim().
  void apply(const Vector& x, Vector& y) const;
  [[nodiscard]] Vector apply(const Vector& x) const;
  void apply(std::span<const double> x, std::span<double> y) const;

  [[nodiscard]] std::uint64_t matvec_count() const { return count_.load(); }

 protected:
  LinearOperator(std::size_t dim, bool symmetric) : dim_(dim), symmetric_(symmetric) {}

  virtual void do_apply(std::span<const double> x, std::span<double> y) const = 0;

  // Only for derived constructors that learn symmetry after building storage.
  void set_symmetric(bool symmetric) { symmetric_ = symmetric; }

 private:
  std::size_t dim_;
  bool symmetric_;
  mutable std::atomic<std::uint64_t> count_{0};
};

using OperatorPtr = std::shared_ptr<const LinearOperator>;

class IdentityOperator final : public LinearOperator {
 public:
  explicit IdentityOperator(std::size_t n) : LinearOperator(n, true) {}

 protected:
  void do_apply(std::span<const double> x, std::span<double> y) const override;
};

class DiagonalOperator final : public LinearOperator {
 public:
  explicit DiagonalOperator(Vector d);
  [[nodiscard]] const Vector& diagonal() const { return d_; }

 protected:
  void do_apply(std::span<const double> x, std::span<double> y) const override;

 private:
  Vector d_;
};

/// Explicit dense matrix; symmetric flag is detected exactly unless given.
class DenseOperator final : public LinearOperator {
 public:
  explicit DenseOperator(Matrix a);
  DenseOperator(Matrix a, bool symmetric);
  [[nodiscard]] const Matrix& matrix() const { return a_; }

 protected:
  void do_apply(std::span<const double> x, std::span<double> y) const override;

 private:
  Matrix a_;
};

struct Triplet {
  std::int64_t row;
  std::int64_t col;
  double value;
};

/// Square compressed-sparse-row matrix. Column indices are sorted per row and
/// duplicates are summed on construction.
class SparseCSR final : public LinearOperator {
 public:
  /// When `symmetric` is not given it is detected from the pattern and values.
  SparseCSR(std::size_t n, std::vector<Triplet> entries,
            std::optional<bool> symmetric = std::nullopt);

  [[nodiscard]] std::span<const std::int64_t> row_ptr() const { return row_ptr_; }
  [[nodiscard]] std::span<const std::int64_t> col_idx() const { return col_idx_; }
  [[nodiscard]] std::span<const double> values() const { return values_; }
  [[nodiscard]] std::size_t nnz() const { return values_.size(); }

 protected:
  void do_apply(std::span<const double> x, std::span<double> y) const override;

 private:
  std::vector<std::int64_t> row_ptr_;
  std::vector<std::int64_t> col_idx_;
  std::vector<double> values_;
};

/// Tridiagonal matrix stored by diagonals.
struct Tridiagonal {
  std::vector<double> lower;  // size n-1
  std::vector<double> diag;   // size n
  std::vector<double> upper;  // size n-1

  [[nodiscard]] std::size_t size() const { return diag.size(); }
  [[nodiscard]] bool is_symmetric() const { return lower == upper; }
  [[nodiscard]] Tridiagonal scaled(double c) const;
  [[nodiscard]] Matrix dense() const;
};

/// (1/h^2) tridiag(-1, 2, -1) with h = 1/(n+1): the SPD Dirichlet Laplacian.
Tridiagonal dirichlet_laplacian_1d(std::size_t n);

/// (1/2h) tridiag(-1, 0, 1) with h = 1/(n+1): centered first derivative.
Tridiagonal centered_difference_1d(std::size_t n);

/// A = Lz (x) I (x) I + I (x) Ly (x) I + I (x) I (x) Lx with x running fastest.
class KroneckerSum3D final : public LinearOperator {
 public:
  KroneckerSum3D(Tridiagonal lx, Tridiagonal ly, Tridiagonal lz);

  [[nodiscard]] const Tridiagonal& factor_x() const { return lx_; }
  [[nodiscard]] const Tridiagonal& factor_y() const { return ly_; }
  [[nodiscard]] const Tridiagonal& factor_z() const { return lz_; }

  /// The same matrix assembled explicitly.
  [[nodiscard]] std::unique_ptr<SparseCSR> assemble() const;

 protected:
  void do_apply(std::span<const double> x, std::span<double> y) const override;

 private:
  Tridiagonal lx_, ly_, lz_;
};

/// The 2n x 2n first-order block operator [[0, -I], [A, 0]] acting on [x; y].
/// One block apply costs (and counts) one inner matvec.
class BlockFirstOrderOperator final : public LinearOperator {
 public:
  explicit BlockFirstOrderOperator(OperatorPtr inner);
  [[nodiscard]] const LinearOperator& inner() const { return *inner_; }

 protected:
  void do_apply(std::span<const double> x, std::span<double> y) const override;

 private:
  OperatorPtr inner_;
};

inline constexpr std::size_t kDefaultDenseCap = 4096;

/// Column j of the result is op.apply(e_j). Consumes dim() matvecs.
Matrix assemble_dense(const LinearOperator& op, std::size_t cap = kDefaultDenseCap);

}  // namespace trigkrylov
